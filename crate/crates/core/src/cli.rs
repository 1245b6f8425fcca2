use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use conical_radon::forward::{forward_project, weight_relation_deviation, RayQuadratureConfig};
use conical_radon::fourier_slice::{check_slice_identity, SliceSampleSet};
use conical_radon::grid::field_l2_error;
use conical_radon::io::{self, ExperimentConfig};
use conical_radon::phantom::rasterize;
use conical_radon::reconstruct::{reconstruct, Method, ReconstructionConfig};
use conical_radon::transforms::Window;
use conical_radon::{Axis, ConeSinogramGrid, Error, Result, SphereQuadrature, VolumeField};

#[derive(Debug, Parser)]
#[command(name = "conerad", version, about = "Conical Radon transform: phantoms, projection, reconstruction, checks")]
pub struct Cli {
    /// Worker threads for projection and reconstruction (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Rasterize the config's phantom onto its volume grid.
    Phantom {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        csv: CsvArgs,
    },
    /// Project the config's phantom onto its sinogram grid.
    Forward {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        p: Option<f64>,
        #[command(flatten)]
        theta: ThetaArgs,
        /// Trapezoid nodes along each ray.
        #[arg(long)]
        ray_nodes: Option<usize>,
        /// Circle nodes for three-dimensional projection.
        #[arg(long)]
        sphere_nodes: Option<usize>,
    },
    /// Reconstruct a field on the config's volume grid from a sinogram file.
    Reconstruct {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Expected weight exponent; must match the sinogram header.
        #[arg(long, allow_hyphen_values = true)]
        p: Option<f64>,
        #[command(flatten)]
        method: MethodArgs,
        #[command(flatten)]
        csv: CsvArgs,
    },
    /// Compare both sides of the Fourier slice identity on random samples.
    CheckSlice {
        #[arg(long)]
        field: PathBuf,
        #[arg(long)]
        sinogram: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        p: Option<f64>,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        /// Largest |k| as a fraction of the Nyquist frequency.
        #[arg(long, default_value_t = 0.5)]
        k_fraction: f64,
        #[arg(long, default_value_t = 2024)]
        seed: u64,
        /// Move sample angles onto sinogram nodes.
        #[arg(long)]
        snap_theta: bool,
    },
    /// Maximum normalized deviation of the p / p=0 weight relation.
    CheckLemma {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        p: Option<f64>,
        #[command(flatten)]
        theta: ThetaArgs,
    },
    /// L2, relative L2 and max differences between two fields (second is the reference).
    Diff { a: PathBuf, b: PathBuf },
}

#[derive(Debug, Args)]
struct ThetaArgs {
    #[arg(long)]
    theta_min: Option<f64>,
    #[arg(long)]
    theta_max: Option<f64>,
}

#[derive(Debug, Args)]
struct MethodArgs {
    /// fbp-angular, fbp-spatial or fourier-hankel.
    #[arg(long)]
    method: Option<String>,
    #[arg(long)]
    band_fraction: Option<f64>,
    /// none, cosine or hann.
    #[arg(long)]
    window: Option<String>,
    /// Zero-padding factor: 1, 2 or 4.
    #[arg(long)]
    pad: Option<usize>,
    /// Circle nodes for three-dimensional angular back-projection.
    #[arg(long)]
    sphere_nodes: Option<usize>,
}

#[derive(Debug, Args)]
struct CsvArgs {
    /// Also write one slice of the output field as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Axis held fixed for the slice: x, x1 or y.
    #[arg(long, default_value = "x")]
    csv_axis: String,
    /// Node index along the fixed axis (default: middle).
    #[arg(long)]
    csv_index: Option<usize>,
}

fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
    io::parse_config(&text)
}

fn required<T: Clone>(value: &Option<T>, what: &'static str) -> Result<T> {
    value.clone().ok_or_else(|| Error::Invalid { field: what, reason: "missing from the config".into() })
}

fn with_theta(grid: &ConeSinogramGrid, args: &ThetaArgs) -> Result<ConeSinogramGrid> {
    let t = grid.theta();
    let theta = Axis::new(args.theta_min.unwrap_or(t.min), args.theta_max.unwrap_or(t.max), t.n)?;
    ConeSinogramGrid::new(grid.dim(), grid.u_axes().to_vec(), theta)
}

fn apply_method(mut config: ReconstructionConfig, args: &MethodArgs) -> Result<ReconstructionConfig> {
    if let Some(m) = &args.method {
        config.method = m.parse::<Method>()?;
    }
    if let Some(b) = args.band_fraction {
        config.filter.band_fraction = b;
    }
    if let Some(w) = &args.window {
        config.filter.window = w.parse::<Window>()?;
    }
    if let Some(p) = args.pad {
        config.filter.pad_factor = p;
    }
    if let Some(n) = args.sphere_nodes {
        config.sphere_nodes = n;
    }
    Ok(config)
}

fn ensure_finite(values: &[f64], what: &str) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(what.to_string()))
    }
}

fn write_csv(field: &VolumeField, args: &CsvArgs) -> Result<()> {
    let Some(path) = &args.csv else { return Ok(()) };
    let axis = io::field_axis_index(field.grid().dim(), &args.csv_axis)?;
    let index = args.csv_index.unwrap_or(field.grid().counts()[axis] / 2);
    let text = io::field_slice_csv(field, axis, index)?;
    std::fs::write(path, text).map_err(|source| Error::Io { path: path.clone(), source })
}

fn write_field_output(field: &VolumeField, out: &Path, csv: &CsvArgs, what: &str) -> Result<()> {
    ensure_finite(field.values(), what)?;
    io::write_field(out, field)?;
    write_csv(field, csv)
}

fn run(cli: Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Error::Invalid { field: "threads", reason: "must be positive".into() });
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Invalid { field: "threads", reason: e.to_string() })?;
    }
    match cli.command {
        Command::Phantom { config, out, csv } => {
            let c = load_config(&config)?;
            let field = rasterize(&required(&c.phantom, "phantom")?, &required(&c.volume, "volume grid")?)?;
            write_field_output(&field, &out, &csv, "phantom field")
        }
        Command::Forward { config, out, p, theta, ray_nodes, sphere_nodes } => {
            let c = load_config(&config)?;
            let phantom = required(&c.phantom, "phantom")?;
            let grid = with_theta(&required(&c.sinogram, "sinogram grid")?, &theta)?;
            let sphere = SphereQuadrature::new(c.dim, sphere_nodes.unwrap_or(c.forward_sphere_nodes))?;
            let ray = RayQuadratureConfig::for_phantom(&phantom, ray_nodes.unwrap_or(c.ray_nodes))?;
            let g = forward_project(&phantom, &grid, p.unwrap_or(c.p), &sphere, &ray)?;
            ensure_finite(g.values(), "sinogram")?;
            io::write_sinogram(&out, &g)
        }
        Command::Reconstruct { input, config, out, p, method, csv } => {
            let c = load_config(&config)?;
            let g = io::read_sinogram(&input)?;
            if let Some(p) = p {
                if p != g.p() {
                    return Err(Error::Weight { expected: p, found: g.p() });
                }
            }
            let settings = apply_method(c.reconstruction, &method)?;
            let field = reconstruct(&g, &required(&c.volume, "volume grid")?, &settings)?;
            write_field_output(&field, &out, &csv, "reconstructed field")
        }
        Command::CheckSlice { field, sinogram, p, samples, k_fraction, seed, snap_theta } => {
            let f = io::read_field(&field)?;
            let g = io::read_sinogram(&sinogram)?;
            let mut set = SliceSampleSet::random(f.grid(), g.grid(), samples, k_fraction, seed)?;
            if snap_theta {
                set = set.snap_theta(g.grid().theta())?;
            }
            let report = check_slice_identity(&f, &g, &set, p.unwrap_or(g.p()))?;
            let errs: Vec<f64> = report.rows.iter().map(|r| r.rel_err).collect();
            ensure_finite(&errs, "slice report")?;
            print!("{}", report.to_table());
            Ok(())
        }
        Command::CheckLemma { config, p, theta } => {
            let c = load_config(&config)?;
            let phantom = required(&c.phantom, "phantom")?;
            let grid = with_theta(&required(&c.sinogram, "sinogram grid")?, &theta)?;
            let sphere = SphereQuadrature::new(c.dim, c.forward_sphere_nodes)?;
            let ray = RayQuadratureConfig::for_phantom(&phantom, c.ray_nodes)?;
            let p = p.unwrap_or(c.p);
            let dev = weight_relation_deviation(&phantom, &grid, p, &sphere, &ray)?;
            ensure_finite(&[dev], "weight relation deviation")?;
            println!("p = {p}");
            println!("max_deviation = {dev:e}");
            Ok(())
        }
        Command::Diff { a, b } => {
            let fa = io::read_field(&a)?;
            let fb = io::read_field(&b)?;
            let (abs, rel) = field_l2_error(&fa, &fb)?;
            let max = fa.values().iter().zip(fb.values()).fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()));
            ensure_finite(&[abs, max], "difference")?;
            println!("l2 = {abs}");
            println!("relative_l2 = {rel}");
            println!("max_abs = {max}");
            Ok(())
        }
    }
}

/// Parses `args` and runs the subcommand, returning the process exit status.
pub fn main_with_args(args: impl IntoIterator<Item = String>) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return 0;
        }
        Err(e) => {
            let text = e.to_string();
            let first = text.lines().next().unwrap_or("").trim_start_matches("error: ");
            eprintln!("ERROR usage: {first}");
            eprint!("{text}");
            return 1;
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("ERROR {}: {e}", e.code());
            e.exit_code()
        }
    }
}
