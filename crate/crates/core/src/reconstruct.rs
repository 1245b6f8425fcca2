//! Filtered back-projection.
//!
//! The data are filtered with the Riesz multiplier `|k|^{d-1}` along u and
//! then back-projected over every cone through the reconstruction point,
//! either by opening angle and direction (`fbp-angular`)
//!
//! ```text
//! f(x, y) = y^p / (2 pi)^{d-1} int cos(theta)^{-(1+p)} int_S q(x + y tan(theta) n, theta) dn dtheta
//! ```
//!
//! or by vertex position (`fbp-spatial`)
//!
//! ```text
//! f(x, y) = 1 / (2 pi)^{d-1} int (|u - x|^2 + y^2)^{(p-1)/2} / |u - x|^{d-2} q(u, atan(|u - x| / y)) du
//! ```

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fourier_slice::reconstruct_fourier_hankel;
use crate::grid::{check_p, ConeSinogram, Dim, SphereQuadrature, VolumeField, VolumeGrid};
use crate::transforms::{riesz_potential, FilterConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    FbpAngular,
    FbpSpatial,
    FourierHankel,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::FbpAngular => "fbp-angular",
            Method::FbpSpatial => "fbp-spatial",
            Method::FourierHankel => "fourier-hankel",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fbp-angular" => Ok(Method::FbpAngular),
            "fbp-spatial" => Ok(Method::FbpSpatial),
            "fourier-hankel" => Ok(Method::FourierHankel),
            other => Err(Error::invalid("method", format!("unknown method `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Interpolation {
    Linear,
}

impl std::str::FromStr for Interpolation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear" => Ok(Interpolation::Linear),
            other => Err(Error::invalid("interpolation", format!("unknown interpolation `{other}`"))),
        }
    }
}

/// Smallest circle quadrature accepted for three-dimensional back-projection.
pub const MIN_SPHERE_NODES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReconstructionConfig {
    pub method: Method,
    pub filter: FilterConfig,
    pub interpolation: Interpolation,
    /// Circle nodes for the angular back-projection in three dimensions.
    pub sphere_nodes: usize,
}

impl Default for ReconstructionConfig {
    fn default() -> Self {
        ReconstructionConfig {
            method: Method::FbpAngular,
            filter: FilterConfig::default(),
            interpolation: Interpolation::Linear,
            sphere_nodes: 64,
        }
    }
}

impl ReconstructionConfig {
    pub fn validate(&self, dim: Dim) -> Result<()> {
        self.filter.validate()?;
        if dim == Dim::Three && self.sphere_nodes < MIN_SPHERE_NODES {
            return Err(Error::invalid(
                "sphere_nodes",
                format!("need at least {MIN_SPHERE_NODES} in three dimensions, got {}", self.sphere_nodes),
            ));
        }
        Ok(())
    }
}

/// Riesz filtering of every theta slice; the weight tag is kept.
pub fn filter_sinogram(g: &ConeSinogram, config: &FilterConfig) -> Result<ConeSinogram> {
    riesz_potential(g, config)
}

fn check_dims(q: &ConeSinogram, grid: &VolumeGrid) -> Result<()> {
    if q.grid().dim() != grid.dim() {
        return Err(Error::Shape("sinogram and volume grid dimensions differ".into()));
    }
    Ok(())
}

/// Theta-major copy of the sinogram so each angle's u-plane is contiguous.
fn theta_planes(q: &ConeSinogram) -> Vec<Vec<f64>> {
    (0..q.grid().theta().n).map(|t| q.theta_slice(t)).collect()
}

/// Bilinear (or linear) read of one u-plane; zero outside the sampled box.
#[inline]
fn sample_plane(plane: &[f64], q: &ConeSinogram, u: [f64; 2]) -> f64 {
    let axes = q.grid().u_axes();
    let Some((i, wi)) = axes[0].stencil(u[0]) else {
        return 0.0;
    };
    if axes.len() == 1 {
        return (1.0 - wi) * plane[i] + wi * plane[i + 1];
    }
    let Some((j, wj)) = axes[1].stencil(u[1]) else {
        return 0.0;
    };
    let n1 = axes[1].n;
    let row0 = i * n1 + j;
    let row1 = row0 + n1;
    (1.0 - wi) * ((1.0 - wj) * plane[row0] + wj * plane[row0 + 1])
        + wi * ((1.0 - wj) * plane[row1] + wj * plane[row1 + 1])
}

/// Back-projection over opening angle and direction.
///
/// The theta integral uses the trapezoid rule on the sinogram's angles;
/// `sphere_nodes` is ignored in two dimensions.
pub fn backproject_angular(q: &ConeSinogram, grid: &VolumeGrid, p: f64, sphere_nodes: usize) -> Result<VolumeField> {
    check_p(q.p(), p)?;
    check_dims(q, grid)?;
    let dim = grid.dim();
    let sphere = SphereQuadrature::new(dim, sphere_nodes)?;
    let theta = *q.grid().theta();
    let planes = theta_planes(q);
    // Per angle: tan(theta) and the trapezoid weight times cos(theta)^{-(1+p)}.
    let angles: Vec<(f64, f64)> = (0..theta.n)
        .map(|t| {
            let th = theta.coord(t);
            (th.tan(), theta.trapezoid_weight(t) * th.cos().powf(-(1.0 + p)))
        })
        .collect();
    let scale = (2.0 * PI).powi(-(dim.get() as i32 - 1));
    let values = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let pt = grid.point_at(i);
            let mut total = 0.0;
            for ((tan_t, w), plane) in angles.iter().zip(&planes) {
                let reach = pt.y * tan_t;
                let ring =
                    sphere.integrate(|n| sample_plane(plane, q, [pt.x[0] + reach * n[0], pt.x[1] + reach * n[1]]));
                total += w * ring;
            }
            scale * pt.y.powf(p) * total
        })
        .collect();
    VolumeField::new(grid.clone(), values)
}

/// `int int 1/sqrt(s^2 + t^2)` over `[0, a] x [0, b]`, signed by quadrant.
fn inverse_distance_corner(a: f64, b: f64) -> f64 {
    let (x, y) = (a.abs(), b.abs());
    if x == 0.0 || y == 0.0 {
        return 0.0;
    }
    let v = x * (y / x).asinh() + y * (x / y).asinh();
    v * a.signum() * b.signum()
}

/// Exact integral of `1/|u|` over the rectangle `[s0, s1] x [t0, t1]`.
pub(crate) fn inverse_distance_cell(s0: f64, s1: f64, t0: f64, t1: f64) -> f64 {
    inverse_distance_corner(s1, t1) - inverse_distance_corner(s0, t1) - inverse_distance_corner(s1, t0)
        + inverse_distance_corner(s0, t0)
}

/// Back-projection over vertex positions.
///
/// Trapezoid sum over the sinogram's u-grid with `q` interpolated linearly in
/// theta. In three dimensions, vertices closer than one spacing to `x` use the
/// exact cell integral of `1/|u - x|` instead of the point value.
pub fn backproject_spatial(q: &ConeSinogram, grid: &VolumeGrid, p: f64) -> Result<VolumeField> {
    check_p(q.p(), p)?;
    check_dims(q, grid)?;
    let dim = grid.dim();
    let sgrid = q.grid();
    let theta = *sgrid.theta();
    let nt = theta.n;
    let axes = sgrid.u_axes().to_vec();
    let u0: Vec<f64> = axes[0].coords();
    let w0: Vec<f64> = (0..axes[0].n).map(|i| axes[0].trapezoid_weight(i)).collect();
    let (u1, w1) = if dim == Dim::Three {
        (axes[1].coords(), (0..axes[1].n).map(|i| axes[1].trapezoid_weight(i)).collect())
    } else {
        (vec![0.0], vec![1.0])
    };
    let n1 = u1.len();
    let tan_max = theta.max.tan();
    let exponent = 0.5 * (p - 1.0);
    let values = q.values();
    let scale = (2.0 * PI).powi(-(dim.get() as i32 - 1));

    let field = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let pt = grid.point_at(i);
            let y = pt.y;
            // Vertices farther than y tan(theta_max) see only out-of-range angles.
            let reach = y * tan_max;
            let range = |axis: &crate::grid::Axis, c: f64| {
                let lo = axis.position(c - reach).floor().max(0.0) as usize;
                let hi = (axis.position(c + reach).ceil().max(0.0) as usize).min(axis.n - 1);
                (lo, hi)
            };
            let (a_lo, a_hi) = range(&axes[0], pt.x[0]);
            let (b_lo, b_hi) = if dim == Dim::Three { range(&axes[1], pt.x[1]) } else { (0, 0) };
            let mut total = 0.0;
            for a in a_lo..=a_hi {
                let dx = u0[a] - pt.x[0];
                for b in b_lo..=b_hi {
                    let dz = if dim == Dim::Three { u1[b] - pt.x[1] } else { 0.0 };
                    let r2 = dx * dx + dz * dz;
                    let r = r2.sqrt();
                    let Some((t, w)) = theta.stencil((r / y).atan()) else {
                        continue;
                    };
                    let base = (a * n1 + b) * nt + t;
                    let qv = (1.0 - w) * values[base] + w * values[base + 1];
                    if qv == 0.0 {
                        continue;
                    }
                    let radial = if p == 1.0 { 1.0 } else { (r2 + y * y).powf(exponent) };
                    let measure = if dim == Dim::Two {
                        w0[a]
                    } else {
                        let (h0, h1) = (axes[0].spacing(), axes[1].spacing());
                        if dx.abs() < h0 && dz.abs() < h1 {
                            inverse_distance_cell(dx - 0.5 * h0, dx + 0.5 * h0, dz - 0.5 * h1, dz + 0.5 * h1)
                        } else {
                            w0[a] * w1[b] / r
                        }
                    };
                    total += measure * radial * qv;
                }
            }
            scale * total
        })
        .collect();
    VolumeField::new(grid.clone(), field)
}

/// Filter, then back-project with the configured method.
pub fn reconstruct_fbp(g: &ConeSinogram, grid: &VolumeGrid, config: &ReconstructionConfig) -> Result<VolumeField> {
    config.validate(grid.dim())?;
    check_dims(g, grid)?;
    let q = filter_sinogram(g, &config.filter)?;
    match config.method {
        Method::FbpAngular => backproject_angular(&q, grid, g.p(), config.sphere_nodes),
        Method::FbpSpatial => backproject_spatial(&q, grid, g.p()),
        Method::FourierHankel => {
            Err(Error::invalid("method", "fourier-hankel is not a filtered back-projection method"))
        }
    }
}

/// Dispatches to the filtered back-projection or the Fourier–Hankel route.
pub fn reconstruct(g: &ConeSinogram, grid: &VolumeGrid, config: &ReconstructionConfig) -> Result<VolumeField> {
    match config.method {
        Method::FourierHankel => reconstruct_fourier_hankel(g, grid, config),
        _ => reconstruct_fbp(g, grid, config),
    }
}
