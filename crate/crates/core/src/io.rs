//! Binary field and sinogram files, the key-value experiment config, and CSV
//! slice export.
//!
//! Both binary formats are little-endian: a fixed header, the CRC32 of the
//! payload, then the values as f64 in storage order (y fastest for fields,
//! theta fastest for sinograms).

use std::f64::consts::FRAC_PI_2;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::grid::{Axis, ConeSinogram, ConeSinogramGrid, Dim, Point, VolumeField, VolumeGrid};
use crate::phantom::{Bump, BumpKind, PhantomSpec};
use crate::reconstruct::{Method, ReconstructionConfig};
use crate::transforms::Window;

pub const FIELD_MAGIC: &[u8; 4] = b"CRTF";
pub const SINOGRAM_MAGIC: &[u8; 4] = b"CRTS";
pub const FORMAT_VERSION: u32 = 1;

fn put_axis(out: &mut Vec<u8>, axis: &Axis) {
    out.extend_from_slice(&axis.min.to_le_bytes());
    out.extend_from_slice(&axis.max.to_le_bytes());
    out.extend_from_slice(&(axis.n as u64).to_le_bytes());
}

fn put_payload(out: &mut Vec<u8>, values: &[f64]) {
    let mut payload = Vec::with_capacity(8 * values.len());
    for v in values {
        payload.extend_from_slice(&v.to_le_bytes());
    }
    out.extend_from_slice(&crc32fast::hash(&payload).to_le_bytes());
    out.extend_from_slice(&payload);
}

fn put_preamble(out: &mut Vec<u8>, magic: &[u8; 4], dim: Dim) {
    out.extend_from_slice(magic);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    out.extend_from_slice(&(dim.get() as u32).to_le_bytes());
}

pub fn encode_field(field: &VolumeField) -> Vec<u8> {
    let grid = field.grid();
    let mut out = Vec::new();
    put_preamble(&mut out, FIELD_MAGIC, grid.dim());
    for axis in grid.x_axes().iter().chain(std::iter::once(grid.y_axis())) {
        put_axis(&mut out, axis);
    }
    put_payload(&mut out, field.values());
    out
}

pub fn encode_sinogram(sinogram: &ConeSinogram) -> Vec<u8> {
    let grid = sinogram.grid();
    let mut out = Vec::new();
    put_preamble(&mut out, SINOGRAM_MAGIC, grid.dim());
    out.extend_from_slice(&sinogram.p().to_le_bytes());
    for axis in grid.u_axes().iter().chain(std::iter::once(grid.theta())) {
        put_axis(&mut out, axis);
    }
    put_payload(&mut out, sinogram.values());
    out
}

/// Cursor over a byte buffer that reports the offset of every failure.
struct Cursor<'a> {
    bytes: &'a [u8],
    offset: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8]> {
        if self.bytes.len() - self.offset < n {
            return Err(format_error(self.offset, format!("header ends before {what}")));
        }
        let s = &self.bytes[self.offset..self.offset + n];
        self.offset += n;
        Ok(s)
    }

    fn u32(&mut self, what: &str) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4, what)?.try_into().expect("4 bytes")))
    }

    fn u64(&mut self, what: &str) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8, what)?.try_into().expect("8 bytes")))
    }

    fn f64(&mut self, what: &str) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8, what)?.try_into().expect("8 bytes")))
    }

    fn axis(&mut self, what: &str) -> Result<Axis> {
        let at = self.offset;
        let min = self.f64(what)?;
        let max = self.f64(what)?;
        let n = self.u64(what)?;
        let n = usize::try_from(n).map_err(|_| format_error(at, format!("{what}: count {n} too large")))?;
        Axis::new(min, max, n).map_err(|e| format_error(at, format!("{what}: {e}")))
    }

    fn preamble(&mut self, magic: &[u8; 4]) -> Result<Dim> {
        let found = self.take(4, "magic")?;
        if found != magic {
            return Err(format_error(
                0,
                format!(
                    "bad magic {:?}, expected {:?}",
                    String::from_utf8_lossy(found),
                    String::from_utf8_lossy(magic)
                ),
            ));
        }
        let version = self.u32("version")?;
        if version != FORMAT_VERSION {
            return Err(format_error(4, format!("unsupported version {version}, expected {FORMAT_VERSION}")));
        }
        let d = self.u32("dimension")?;
        Dim::new(d as usize).map_err(|_| format_error(8, format!("unsupported dimension {d}")))
    }

    /// Reads the checksum and `count` values, verifying length and CRC.
    fn payload(&mut self, count: usize) -> Result<Vec<f64>> {
        let expected_crc = self.u32("checksum")?;
        let rest = &self.bytes[self.offset..];
        let expected = 8 * count as u64;
        if (rest.len() as u64) < expected {
            return Err(Error::TruncatedPayload { expected, found: rest.len() as u64 });
        }
        if rest.len() as u64 > expected {
            return Err(format_error(
                self.offset + expected as usize,
                format!("{} trailing bytes after the payload", rest.len() as u64 - expected),
            ));
        }
        let found = crc32fast::hash(rest);
        if found != expected_crc {
            return Err(Error::Checksum { expected: expected_crc, found });
        }
        Ok(rest.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes"))).collect())
    }
}

fn format_error(offset: usize, reason: String) -> Error {
    Error::Format { offset: offset as u64, reason }
}

pub fn decode_field(bytes: &[u8]) -> Result<VolumeField> {
    let mut c = Cursor { bytes, offset: 0 };
    let dim = c.preamble(FIELD_MAGIC)?;
    let x_axes = (0..dim.horizontal()).map(|_| c.axis("x axis")).collect::<Result<Vec<_>>>()?;
    let at = c.offset;
    let y_axis = c.axis("y axis")?;
    let grid = VolumeGrid::new(dim, x_axes, y_axis).map_err(|e| format_error(at, e.to_string()))?;
    let values = c.payload(grid.len())?;
    VolumeField::new(grid, values)
}

pub fn decode_sinogram(bytes: &[u8]) -> Result<ConeSinogram> {
    let mut c = Cursor { bytes, offset: 0 };
    let dim = c.preamble(SINOGRAM_MAGIC)?;
    let p_at = c.offset;
    let p = c.f64("p")?;
    if !p.is_finite() {
        return Err(format_error(p_at, format!("weight exponent {p} is not finite")));
    }
    let u_axes = (0..dim.horizontal()).map(|_| c.axis("u axis")).collect::<Result<Vec<_>>>()?;
    let at = c.offset;
    let theta = c.axis("theta axis")?;
    let grid = ConeSinogramGrid::new(dim, u_axes, theta).map_err(|e| format_error(at, e.to_string()))?;
    let values = c.payload(grid.len())?;
    ConeSinogram::new(grid, p, values)
}

fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

pub fn write_field(path: impl AsRef<Path>, field: &VolumeField) -> Result<()> {
    write_bytes(path.as_ref(), &encode_field(field))
}

pub fn read_field(path: impl AsRef<Path>) -> Result<VolumeField> {
    decode_field(&read_bytes(path.as_ref())?)
}

pub fn write_sinogram(path: impl AsRef<Path>, sinogram: &ConeSinogram) -> Result<()> {
    write_bytes(path.as_ref(), &encode_sinogram(sinogram))
}

pub fn read_sinogram(path: impl AsRef<Path>) -> Result<ConeSinogram> {
    decode_sinogram(&read_bytes(path.as_ref())?)
}

/// Everything an experiment config can describe. Grid and phantom entries are
/// optional; subcommands report the ones they need but did not get.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub dim: Dim,
    pub phantom: Option<PhantomSpec>,
    pub volume: Option<VolumeGrid>,
    pub sinogram: Option<ConeSinogramGrid>,
    pub reconstruction: ReconstructionConfig,
    pub p: f64,
    pub ray_nodes: usize,
    /// Circle nodes for forward projection in three dimensions.
    pub forward_sphere_nodes: usize,
}

/// Raw values collected while parsing, before cross-key validation.
#[derive(Default)]
struct Pending {
    dim: Option<usize>,
    x_extent: Option<(f64, f64)>,
    x_count: Option<usize>,
    y_extent: Option<(f64, f64)>,
    y_count: Option<usize>,
    u_extent: Option<(f64, f64)>,
    u_count: Option<usize>,
    theta_min: Option<f64>,
    theta_max: Option<f64>,
    theta_count: Option<usize>,
    bumps: Vec<(usize, PendingBump)>,
}

#[derive(Default)]
struct PendingBump {
    kind: Option<BumpKind>,
    center: Option<Vec<f64>>,
    radius: Option<f64>,
    sigma: Option<f64>,
    amplitude: Option<f64>,
}

fn parse_error(line: usize, reason: impl Into<String>) -> Error {
    Error::Parse { line, reason: reason.into() }
}

fn number<T: std::str::FromStr>(line: usize, key: &str, value: &str) -> Result<T> {
    value.parse().map_err(|_| parse_error(line, format!("`{key}`: cannot parse `{value}`")))
}

fn list(line: usize, key: &str, value: &str) -> Result<Vec<f64>> {
    value.split(',').map(|v| number(line, key, v.trim())).collect()
}

fn pair(line: usize, key: &str, value: &str) -> Result<(f64, f64)> {
    match list(line, key, value)?.as_slice() {
        [a, b] => Ok((*a, *b)),
        _ => Err(parse_error(line, format!("`{key}` needs two comma-separated numbers"))),
    }
}

/// Splits `key = value` or `k1=v1 k2=v2 ...` into pairs.
fn assignments(line: usize, text: &str) -> Result<Vec<(String, String)>> {
    let text = text.trim();
    if text.is_empty() {
        return Ok(Vec::new());
    }
    let tokens: Vec<&str> = if text.matches('=').count() == 1 { vec![text] } else { text.split_whitespace().collect() };
    tokens
        .into_iter()
        .map(|t| match t.split_once('=') {
            Some((k, v)) if !k.trim().is_empty() && !v.trim().is_empty() => {
                Ok((k.trim().to_string(), v.trim().to_string()))
            }
            _ => Err(parse_error(line, format!("expected `key = value`, found `{t}`"))),
        })
        .collect()
}

fn theta_bound(line: usize, key: &str, value: &str) -> Result<f64> {
    let v: f64 = number(line, key, value)?;
    if !(v > 0.0 && v < FRAC_PI_2) {
        return Err(parse_error(line, format!("`{key}` = {v} must lie strictly inside (0, pi/2)")));
    }
    Ok(v)
}

fn positive_count(line: usize, key: &str, value: &str) -> Result<usize> {
    let n: usize = number(line, key, value)?;
    if n == 0 {
        return Err(parse_error(line, format!("`{key}` must be positive")));
    }
    Ok(n)
}

fn top_level(line: usize, key: &str, value: &str, pending: &mut Pending, out: &mut ExperimentConfig) -> Result<()> {
    let filter = &mut out.reconstruction.filter;
    let wrap = |e: Error| parse_error(line, e.to_string());
    match key {
        "dim" => pending.dim = Some(number(line, key, value)?),
        "x_extent" => pending.x_extent = Some(pair(line, key, value)?),
        "x_count" => pending.x_count = Some(positive_count(line, key, value)?),
        "y_extent" => pending.y_extent = Some(pair(line, key, value)?),
        "y_count" => pending.y_count = Some(positive_count(line, key, value)?),
        "u_extent" => pending.u_extent = Some(pair(line, key, value)?),
        "u_count" => pending.u_count = Some(positive_count(line, key, value)?),
        "theta_min" => pending.theta_min = Some(theta_bound(line, key, value)?),
        "theta_max" => pending.theta_max = Some(theta_bound(line, key, value)?),
        "theta_count" => pending.theta_count = Some(positive_count(line, key, value)?),
        "p" => out.p = number(line, key, value)?,
        "method" => out.reconstruction.method = value.parse::<Method>().map_err(wrap)?,
        "band_fraction" => filter.band_fraction = number(line, key, value)?,
        "window" => filter.window = value.parse::<Window>().map_err(wrap)?,
        "pad" => filter.pad_factor = number(line, key, value)?,
        "sphere_nodes" => out.reconstruction.sphere_nodes = positive_count(line, key, value)?,
        "forward_sphere_nodes" => out.forward_sphere_nodes = positive_count(line, key, value)?,
        "ray_nodes" => out.ray_nodes = positive_count(line, key, value)?,
        other => return Err(parse_error(line, format!("unknown key `{other}`"))),
    }
    Ok(())
}

fn bump_key(line: usize, key: &str, value: &str, bump: &mut PendingBump) -> Result<()> {
    match key {
        "kind" => bump.kind = Some(value.parse().map_err(|e: Error| parse_error(line, e.to_string()))?),
        "center" => bump.center = Some(list(line, key, value)?),
        "radius" => bump.radius = Some(number(line, key, value)?),
        "sigma" => bump.sigma = Some(number(line, key, value)?),
        "amplitude" => bump.amplitude = Some(number(line, key, value)?),
        other => return Err(parse_error(line, format!("unknown key `{other}` in [bump]"))),
    }
    Ok(())
}

fn build_bump(line: usize, dim: Dim, b: &PendingBump) -> Result<Bump> {
    let missing = |key: &str| parse_error(line, format!("[bump] is missing `{key}`"));
    let kind = b.kind.ok_or_else(|| missing("kind"))?;
    let c = b.center.as_ref().ok_or_else(|| missing("center"))?;
    let center = match (dim, c.as_slice()) {
        (Dim::Two, [x, y]) => Point::new2(*x, *y),
        (Dim::Three, [x0, x1, y]) => Point::new3(*x0, *x1, *y),
        _ => return Err(parse_error(line, format!("[bump] center needs {} coordinates", dim.get()))),
    };
    let amplitude = b.amplitude.unwrap_or(1.0);
    Ok(match kind {
        BumpKind::Mollifier => {
            if b.sigma.is_some() {
                return Err(parse_error(line, "`sigma` does not apply to a mollifier"));
            }
            Bump::mollifier(center, b.radius.ok_or_else(|| missing("radius"))?, amplitude)
        }
        BumpKind::TruncatedGaussian => {
            let sigma = b.sigma.ok_or_else(|| missing("sigma"))?;
            Bump::gaussian_with_cutoff(center, sigma, b.radius.unwrap_or(4.0 * sigma), amplitude)
        }
    })
}

/// Parses the line-oriented experiment config.
///
/// Top-level keys describe grids and reconstruction settings; each `[bump]`
/// section adds one bump to the phantom. A section header may carry its
/// assignments on the same line. Unknown keys are errors.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let mut pending = Pending::default();
    let mut out = ExperimentConfig {
        dim: Dim::Two,
        phantom: None,
        volume: None,
        sinogram: None,
        reconstruction: ReconstructionConfig::default(),
        p: 0.0,
        ray_nodes: 400,
        forward_sphere_nodes: 256,
    };
    let mut in_bump = false;
    let mut settings_line = 0;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let mut body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        if let Some(rest) = body.strip_prefix('[') {
            let Some((name, tail)) = rest.split_once(']') else {
                return Err(parse_error(line, "unterminated section header"));
            };
            if name.trim() != "bump" {
                return Err(parse_error(line, format!("unknown section `[{}]`", name.trim())));
            }
            in_bump = true;
            pending.bumps.push((line, PendingBump::default()));
            body = tail;
        }
        for (key, value) in assignments(line, body)? {
            if in_bump {
                let bump = &mut pending.bumps.last_mut().expect("section opened").1;
                bump_key(line, &key, &value, bump)?;
            } else {
                top_level(line, &key, &value, &mut pending, &mut out)?;
                settings_line = line;
            }
        }
    }
    finish(pending, out, settings_line)
}

fn finish(pending: Pending, mut out: ExperimentConfig, line: usize) -> Result<ExperimentConfig> {
    let wrap = |e: Error| parse_error(line, e.to_string());
    out.dim = Dim::new(pending.dim.unwrap_or(2)).map_err(wrap)?;
    let dim = out.dim;
    if !pending.bumps.is_empty() {
        let bumps = pending.bumps.iter().map(|(l, b)| build_bump(*l, dim, b)).collect::<Result<Vec<_>>>()?;
        let at = pending.bumps[0].0;
        out.phantom = Some(PhantomSpec::new(dim, bumps).map_err(|e| parse_error(at, e.to_string()))?);
    }
    if let (Some(x), Some(nx), Some(y), Some(ny)) =
        (pending.x_extent, pending.x_count, pending.y_extent, pending.y_count)
    {
        let x_axis = Axis::new(x.0, x.1, nx).map_err(wrap)?;
        let y_axis = Axis::new(y.0, y.1, ny).map_err(wrap)?;
        out.volume = Some(VolumeGrid::new(dim, vec![x_axis; dim.horizontal()], y_axis).map_err(wrap)?);
    } else if pending.x_extent.is_some()
        || pending.x_count.is_some()
        || pending.y_extent.is_some()
        || pending.y_count.is_some()
    {
        return Err(parse_error(line, "volume grid needs x_extent, x_count, y_extent and y_count"));
    }
    if let (Some(u), Some(nu), Some(nt)) = (pending.u_extent, pending.u_count, pending.theta_count) {
        let (lo, hi) = (pending.theta_min.unwrap_or(0.01), pending.theta_max.unwrap_or(1.54));
        let u_axis = Axis::new(u.0, u.1, nu).map_err(wrap)?;
        let theta = Axis::new(lo, hi, nt).map_err(wrap)?;
        out.sinogram = Some(ConeSinogramGrid::new(dim, vec![u_axis; dim.horizontal()], theta).map_err(wrap)?);
    } else if pending.u_extent.is_some() || pending.u_count.is_some() || pending.theta_count.is_some() {
        return Err(parse_error(line, "sinogram grid needs u_extent, u_count and theta_count"));
    }
    out.reconstruction.validate(dim).map_err(wrap)?;
    Ok(out)
}

/// Index of a named field axis: `x` (or `x0`), `x1` in three dimensions, `y`.
pub fn field_axis_index(dim: Dim, name: &str) -> Result<usize> {
    match (dim, name) {
        (_, "x" | "x0") => Ok(0),
        (Dim::Three, "x1") => Ok(1),
        (_, "y") => Ok(dim.horizontal()),
        _ => Err(Error::invalid("axis", format!("no axis `{name}` in {} dimensions", dim.get()))),
    }
}

/// CSV of the field with axis `axis` held at node `index`: a `coord,value`
/// column in two dimensions, a matrix with coordinate header row and column in
/// three.
pub fn field_slice_csv(field: &VolumeField, axis: usize, index: usize) -> Result<String> {
    let grid = field.grid();
    let counts = grid.counts();
    if axis >= counts.len() || index >= counts[axis] {
        return Err(Error::Index { index: vec![axis, index], counts });
    }
    let axes: Vec<Axis> = grid.x_axes().iter().copied().chain(std::iter::once(*grid.y_axis())).collect();
    let free: Vec<usize> = (0..counts.len()).filter(|a| *a != axis).collect();
    let at = |pick: &[(usize, usize)]| {
        let mut linear = 0;
        for (a, &n) in counts.iter().enumerate() {
            let i = if a == axis { index } else { pick.iter().find(|(b, _)| *b == a).expect("free axis").1 };
            linear = linear * n + i;
        }
        field.values()[linear]
    };
    let mut out = String::new();
    match free.as_slice() {
        [a] => {
            out.push_str("coord,value\n");
            for i in 0..counts[*a] {
                let _ = writeln!(out, "{},{}", axes[*a].coord(i), at(&[(*a, i)]));
            }
        }
        [a, b] => {
            let header: Vec<String> = (0..counts[*b]).map(|j| axes[*b].coord(j).to_string()).collect();
            let _ = writeln!(out, ",{}", header.join(","));
            for i in 0..counts[*a] {
                let row: Vec<String> = (0..counts[*b]).map(|j| at(&[(*a, i), (*b, j)]).to_string()).collect();
                let _ = writeln!(out, "{},{}", axes[*a].coord(i), row.join(","));
            }
        }
        _ => unreachable!("fields have two or three axes"),
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field() -> VolumeField {
        let grid =
            VolumeGrid::new(Dim::Two, vec![Axis::new(-1.0, 1.0, 3).unwrap()], Axis::new(0.5, 2.5, 4).unwrap()).unwrap();
        let values = (0..12).map(|i| (i as f64).sin() * 1e-3 + i as f64).collect();
        VolumeField::new(grid, values).unwrap()
    }

    fn sinogram() -> ConeSinogram {
        let u = Axis::new(-2.0, 2.0, 3).unwrap();
        let grid = ConeSinogramGrid::new(Dim::Three, vec![u, u], Axis::new(0.1, 1.2, 2).unwrap()).unwrap();
        let values = (0..18).map(|i| (i as f64).cos()).collect();
        ConeSinogram::new(grid, 1.5, values).unwrap()
    }

    #[test]
    fn round_trips_are_bit_exact() {
        let f = field();
        let back = decode_field(&encode_field(&f)).unwrap();
        assert_eq!(back.grid(), f.grid());
        assert!(back.values().iter().zip(f.values()).all(|(a, b)| a.to_bits() == b.to_bits()));
        let s = sinogram();
        let back = decode_sinogram(&encode_sinogram(&s)).unwrap();
        assert_eq!(back.p(), 1.5);
        assert_eq!(back.grid(), s.grid());
        assert_eq!(back.values(), s.values());
    }

    #[test]
    fn header_layout() {
        let bytes = encode_field(&field());
        assert_eq!(&bytes[..4], b"CRTF");
        assert_eq!(u32::from_le_bytes(bytes[4..8].try_into().unwrap()), 1);
        assert_eq!(u32::from_le_bytes(bytes[8..12].try_into().unwrap()), 2);
        // two axes of 24 bytes, a 4-byte checksum, then 12 values
        assert_eq!(bytes.len(), 12 + 48 + 4 + 96);
    }

    #[test]
    fn corruption_is_detected() {
        let mut bytes = encode_field(&field());
        let last = bytes.len() - 3;
        bytes[last] ^= 0x10;
        assert!(matches!(decode_field(&bytes), Err(Error::Checksum { .. })));

        let bytes = encode_field(&field());
        assert!(matches!(decode_field(&bytes[..bytes.len() - 8]), Err(Error::TruncatedPayload { .. })));
        assert!(matches!(decode_field(&bytes[..20]), Err(Error::Format { offset: 20, .. })));

        let mut bytes = encode_field(&field());
        bytes[4] = 2;
        assert!(matches!(decode_field(&bytes), Err(Error::Format { offset: 4, .. })));

        let s = encode_sinogram(&sinogram());
        assert!(matches!(decode_field(&s), Err(Error::Format { offset: 0, .. })));
    }

    #[test]
    fn parses_phantom_and_grids() {
        let text = "\
# reference setup
dim = 2
x_extent = -1.05, 1.05
x_count = 16
y_extent = 0.95, 3.05
y_count = 8
u_extent = -4, 4
u_count = 32
theta_min = 0.1
theta_max = 1.2
theta_count = 10
method = fbp-spatial
window = hann
[bump] kind=mollifier center=0,2 radius=1 amplitude=1
";
        let c = parse_config(text).unwrap();
        let bumps = c.phantom.as_ref().unwrap().bumps().to_vec();
        assert_eq!(bumps, vec![Bump::mollifier(Point::new2(0.0, 2.0), 1.0, 1.0)]);
        assert_eq!(c.volume.unwrap().counts(), vec![16, 8]);
        let s = c.sinogram.unwrap();
        assert_eq!((s.theta().min, s.theta().max, s.theta().n), (0.1, 1.2, 10));
        assert_eq!(c.reconstruction.method, Method::FbpSpatial);
        assert_eq!(c.reconstruction.filter.window, Window::Hann);
    }

    #[test]
    fn multi_line_bump_sections() {
        let text = "dim = 3\n[bump]\nkind = gaussian\ncenter = 0, 0, 2\nsigma = 0.25\n[bump]\nkind = mollifier\ncenter = 0.5,0,2\nradius = 0.5\n";
        let c = parse_config(text).unwrap();
        let bumps = c.phantom.unwrap().bumps().to_vec();
        assert_eq!(bumps.len(), 2);
        assert_eq!(bumps[0].radius, 1.0);
        assert_eq!(bumps[1].center, Point::new3(0.5, 0.0, 2.0));
    }

    #[test]
    fn rejects_bad_configs_with_line_numbers() {
        match parse_config("dim = 2\ntheta_max = 1.6\n") {
            Err(Error::Parse { line: 2, reason }) => assert!(reason.contains("theta_max")),
            other => panic!("{other:?}"),
        }
        match parse_config("[bump] kind=gaussian center=0,2 sigma_x=1\n") {
            Err(Error::Parse { line: 1, reason }) => assert!(reason.contains("sigma_x")),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_config("\n\nfoo = 1"), Err(Error::Parse { line: 3, .. })));
        assert!(matches!(
            parse_config("[bump] kind=mollifier center=0,0.5 radius=1"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(parse_config("band_fraction = 1.5"), Err(Error::Parse { .. })));
        assert!(matches!(parse_config("x_count = 4"), Err(Error::Parse { .. })));
        assert!(matches!(parse_config("[grid]"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn csv_slices() {
        let f = field();
        let csv = field_slice_csv(&f, 0, 1).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 5);
        assert_eq!(lines[1], format!("0.5,{}", f.values()[4]));
        assert!(field_slice_csv(&f, 0, 3).is_err());
        assert_eq!(field_axis_index(Dim::Two, "y").unwrap(), 1);
        assert!(field_axis_index(Dim::Two, "x1").is_err());
    }
}
