use std::path::PathBuf;

/// Errors raised by every fallible operation in the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("index {index:?} out of range for counts {counts:?}")]
    Index { index: Vec<usize>, counts: Vec<usize> },

    #[error("unsupported dimension d = {0} (only 2 and 3 are implemented)")]
    UnsupportedDimension(usize),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid {field}: {reason}")]
    Invalid { field: &'static str, reason: String },

    #[error("phantom support exceeds grid: {0}")]
    Support(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("ray truncated: s_max = {s_max} does not cover the support (needs at least {needed})")]
    Truncation { s_max: f64, needed: f64 },

    #[error("weight exponent mismatch: expected p = {expected}, found p = {found}")]
    Weight { expected: f64, found: f64 },

    #[error("frequency {k} is not on the discrete lattice (spacing {spacing})")]
    Lattice { k: f64, spacing: f64 },

    #[error("format error at byte {offset}: {reason}")]
    Format { offset: u64, reason: String },

    #[error("checksum mismatch: header {expected:#010x}, payload {found:#010x}")]
    Checksum { expected: u32, found: u32 },

    #[error("truncated payload: expected {expected} bytes, found {found}")]
    TruncatedPayload { expected: u64, found: u64 },

    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Error::Invalid { field, reason: reason.into() }
    }

    /// Short machine-readable tag used on the CLI's `ERROR <code>:` line.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Index { .. } => "index",
            Error::UnsupportedDimension(_) => "dimension",
            Error::Shape(_) => "shape",
            Error::Invalid { .. } => "invalid",
            Error::Support(_) => "support",
            Error::Domain(_) => "domain",
            Error::Truncation { .. } => "truncation",
            Error::Weight { .. } => "weight",
            Error::Lattice { .. } => "lattice",
            Error::Format { .. } => "format",
            Error::Checksum { .. } => "checksum",
            Error::TruncatedPayload { .. } => "truncated",
            Error::Parse { .. } => "parse",
            Error::NonFinite(_) => "numerical",
            Error::Io { .. } => "io",
        }
    }

    /// Process exit status for this error: 2 for numerical failure, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NonFinite(_) => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
