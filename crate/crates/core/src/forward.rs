//! Forward projection: integrals of `f` over one-sided cones with vertex `(u, 0)`.
//!
//! ```text
//! R^(p) f(u, theta) = int_0^inf s^-p int_{S^{d-2}} f(u + s sin(theta) n, s cos(theta)) (s sin(theta))^{d-2} dn ds
//! ```
//!
//! The ray integral uses the trapezoid rule on `[0, s_max]`. The integrand is
//! taken to be zero at `s = 0` for every `p`, which is exact because phantoms
//! vanish on a strip above the vertex plane.

use std::f64::consts::FRAC_PI_2;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{ConeSinogram, ConeSinogramGrid, Dim, SphereQuadrature};
use crate::phantom::{Phantom, YWeighted};

/// Where the ray quadrature stops.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RayExtent {
    /// The same `s_max` for every cone.
    Fixed(f64),
    /// `s_max(theta) = (top + margin) / cos(theta)`: the ray reaches height
    /// `top + margin`, above the support.
    Support { top: f64, margin: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayQuadratureConfig {
    pub extent: RayExtent,
    /// Trapezoid nodes on `[0, s_max]`, endpoints included.
    pub n_s: usize,
}

/// Minimum number of ray nodes.
pub const MIN_RAY_NODES: usize = 16;

impl RayQuadratureConfig {
    pub fn fixed(s_max: f64, n_s: usize) -> Result<Self> {
        if !(s_max > 0.0 && s_max.is_finite()) {
            return Err(Error::invalid("s_max", format!("must be positive, got {s_max}")));
        }
        Self::checked(RayExtent::Fixed(s_max), n_s)
    }

    /// Ray extent derived from the phantom's vertical support, with a 5% margin.
    pub fn for_phantom<P: Phantom + ?Sized>(f: &P, n_s: usize) -> Result<Self> {
        let top = f.vertical_support().map_or(1.0, |(_, top)| top);
        Self::checked(RayExtent::Support { top, margin: 0.05 * top }, n_s)
    }

    fn checked(extent: RayExtent, n_s: usize) -> Result<Self> {
        if n_s < MIN_RAY_NODES {
            return Err(Error::invalid("n_s", format!("need at least {MIN_RAY_NODES} ray nodes, got {n_s}")));
        }
        Ok(RayQuadratureConfig { extent, n_s })
    }

    pub fn s_max(&self, theta: f64) -> f64 {
        match self.extent {
            RayExtent::Fixed(s) => s,
            RayExtent::Support { top, margin } => (top + margin) / theta.cos(),
        }
    }
}

fn check_theta(theta: f64) -> Result<()> {
    if theta > 0.0 && theta < FRAC_PI_2 {
        Ok(())
    } else {
        Err(Error::Domain(format!("theta = {theta} is outside (0, pi/2)")))
    }
}

/// Integral of `f` over the cone with vertex `(u, 0)` and half-angle `theta`,
/// weighted by `s^-p`.
pub fn cone_integral<P: Phantom + ?Sized>(
    f: &P,
    u: [f64; 2],
    theta: f64,
    p: f64,
    sphere: &SphereQuadrature,
    ray: &RayQuadratureConfig,
) -> Result<f64> {
    let (sin_t, cos_t, s_max) = prepare(f, theta, sphere, ray)?;
    Ok(ray_sum(f, u, sin_t, cos_t, p, sphere, s_max, ray.n_s, f.vertical_support()))
}

/// Validates one cone and returns `(sin(theta), cos(theta), s_max)`.
fn prepare<P: Phantom + ?Sized>(
    f: &P,
    theta: f64,
    sphere: &SphereQuadrature,
    ray: &RayQuadratureConfig,
) -> Result<(f64, f64, f64)> {
    check_theta(theta)?;
    if f.dim() != sphere.dim() {
        return Err(Error::Shape("phantom and sphere quadrature dimensions differ".into()));
    }
    if ray.n_s < MIN_RAY_NODES {
        return Err(Error::invalid("n_s", format!("need at least {MIN_RAY_NODES} ray nodes")));
    }
    let s_max = ray.s_max(theta);
    let (sin_t, cos_t) = theta.sin_cos();
    if let Some((_, top)) = f.vertical_support() {
        if s_max * cos_t < top {
            return Err(Error::Truncation { s_max, needed: top / cos_t });
        }
    }
    Ok((sin_t, cos_t, s_max))
}

#[allow(clippy::too_many_arguments)]
#[inline]
fn ray_sum<P: Phantom + ?Sized>(
    f: &P,
    u: [f64; 2],
    sin_t: f64,
    cos_t: f64,
    p: f64,
    sphere: &SphereQuadrature,
    s_max: f64,
    n_s: usize,
    support: Option<(f64, f64)>,
) -> f64 {
    let h = s_max / (n_s - 1) as f64;
    let last = n_s - 1;
    // Nodes below the support contribute exact zeros; start past them.
    let first = match support {
        Some((bottom, _)) => ((bottom / (cos_t * h)).floor() as usize).max(1),
        None => 1,
    };
    let three = sphere.dim() == Dim::Three;
    let mut total = 0.0;
    for i in first..=last {
        let s = if i == last { s_max } else { i as f64 * h };
        let ring = f.ring_integral(u, s * sin_t, s * cos_t, sphere);
        if ring == 0.0 {
            continue;
        }
        let mut term = ring;
        if p != 0.0 {
            term *= s.powf(-p);
        }
        if three {
            term *= s * sin_t;
        }
        total += if i == last { 0.5 * h * term } else { h * term };
    }
    total
}

/// Evaluates [`cone_integral`] at every node of `grid`.
///
/// Nodes are independent; the output does not depend on the thread count.
pub fn forward_project<P: Phantom + ?Sized>(
    f: &P,
    grid: &ConeSinogramGrid,
    p: f64,
    sphere: &SphereQuadrature,
    ray: &RayQuadratureConfig,
) -> Result<ConeSinogram> {
    if f.dim() != grid.dim() || sphere.dim() != grid.dim() {
        return Err(Error::Shape("phantom, sinogram grid and sphere quadrature dimensions differ".into()));
    }
    let support = f.vertical_support();
    let nt = grid.theta().n;
    let angles = (0..nt).map(|t| prepare(f, grid.theta().coord(t), sphere, ray)).collect::<Result<Vec<_>>>()?;
    let values: Vec<f64> = (0..grid.len())
        .into_par_iter()
        .map(|offset| {
            let (j, t) = (offset / nt, offset % nt);
            let (sin_t, cos_t, s_max) = angles[t];
            ray_sum(f, grid.vertex(j), sin_t, cos_t, p, sphere, s_max, ray.n_s, support)
        })
        .collect();
    ConeSinogram::new(grid.clone(), p, values)
}

/// Largest deviation between `R^(p) f` and `cos(theta)^p R^(0)(y^(-p) f)` over
/// the grid, normalized by `max |R^(p) f|`. Both sides share the ray nodes, so
/// the result measures rounding only.
pub fn weight_relation_deviation<P: Phantom + ?Sized>(
    f: &P,
    grid: &ConeSinogramGrid,
    p: f64,
    sphere: &SphereQuadrature,
    ray: &RayQuadratureConfig,
) -> Result<f64> {
    let direct = forward_project(f, grid, p, sphere, ray)?;
    let base = forward_project(&YWeighted { inner: f, p }, grid, 0.0, sphere, ray)?;
    let nt = grid.theta().n;
    let scale = direct.max_abs();
    if scale == 0.0 {
        return Ok(0.0);
    }
    let worst = direct.values().iter().zip(base.values()).enumerate().fold(0.0_f64, |m, (i, (a, b))| {
        let cos_p = grid.theta().coord(i % nt).cos().powf(p);
        m.max((a - cos_p * b).abs())
    });
    Ok(worst / scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Axis, Point};
    use crate::phantom::{Bump, PhantomSpec};
    use std::f64::consts::{FRAC_PI_4, PI};

    fn reference2() -> PhantomSpec {
        PhantomSpec::new(Dim::Two, vec![Bump::mollifier(Point::new2(0.0, 2.0), 1.0, 1.0)]).unwrap()
    }

    fn sino_grid2(nu: usize, nt: usize) -> ConeSinogramGrid {
        ConeSinogramGrid::new(Dim::Two, vec![Axis::new(-6.0, 6.0, nu).unwrap()], Axis::new(0.1, 1.2, nt).unwrap())
            .unwrap()
    }

    #[test]
    fn empty_phantom_projects_to_zero() {
        let f = PhantomSpec::empty(Dim::Two);
        let sphere = SphereQuadrature::new(Dim::Two, 1).unwrap();
        let ray = RayQuadratureConfig::fixed(10.0, 64).unwrap();
        for p in [-1.0, 0.0, 2.0] {
            assert_eq!(cone_integral(&f, [0.3, 0.0], 0.7, p, &sphere, &ray).unwrap(), 0.0);
        }
        let s = forward_project(&f, &sino_grid2(9, 5), 1.0, &sphere, &ray).unwrap();
        assert!(s.values().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn rejects_bad_angles_and_short_rays() {
        let f = reference2();
        let sphere = SphereQuadrature::new(Dim::Two, 1).unwrap();
        let ray = RayQuadratureConfig::fixed(10.0, 64).unwrap();
        assert!(matches!(cone_integral(&f, [0.0; 2], 0.0, 0.0, &sphere, &ray), Err(Error::Domain(_))));
        assert!(matches!(cone_integral(&f, [0.0; 2], FRAC_PI_2, 0.0, &sphere, &ray), Err(Error::Domain(_))));
        let short = RayQuadratureConfig::fixed(2.0, 64).unwrap();
        assert!(matches!(cone_integral(&f, [0.0; 2], 0.5, 0.0, &sphere, &short), Err(Error::Truncation { .. })));
        assert!(RayQuadratureConfig::fixed(10.0, 8).is_err());
    }

    #[test]
    fn weight_relation_between_p1_and_p0() {
        let f = reference2();
        let sphere = SphereQuadrature::new(Dim::Two, 1).unwrap();
        let ray = RayQuadratureConfig::for_phantom(&f, 400).unwrap();
        let weighted = YWeighted { inner: &f, p: 1.0 };
        for &(u, theta) in &[(0.0, 0.3), (0.8, 0.9), (-2.0, 1.1)] {
            let lhs = cone_integral(&f, [u, 0.0], theta, 1.0, &sphere, &ray).unwrap();
            let rhs = theta.cos() * cone_integral(&weighted, [u, 0.0], theta, 0.0, &sphere, &ray).unwrap();
            assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1e-300), "{lhs} {rhs}");
        }
    }

    #[test]
    fn weight_relation_over_a_grid() {
        let f = reference2();
        let sphere = SphereQuadrature::new(Dim::Two, 1).unwrap();
        let ray = RayQuadratureConfig::for_phantom(&f, 200).unwrap();
        for p in [-1.0, 2.0] {
            assert!(weight_relation_deviation(&f, &sino_grid2(9, 6), p, &sphere, &ray).unwrap() < 1e-12);
        }
        let empty = PhantomSpec::empty(Dim::Two);
        assert_eq!(weight_relation_deviation(&empty, &sino_grid2(5, 3), 1.0, &sphere, &ray).unwrap(), 0.0);
    }

    #[test]
    fn gaussian_example_matches_line_integral() {
        // Two rays y = |x| from the origin through a gaussian centred at (0, 2):
        // the untruncated value is 2 sigma sqrt(2 pi) exp(-4).
        let f = PhantomSpec::new(Dim::Two, vec![Bump::gaussian_with_cutoff(Point::new2(0.0, 2.0), 0.5, 1.99, 1.0)])
            .unwrap();
        let sphere = SphereQuadrature::new(Dim::Two, 1).unwrap();
        let ray = RayQuadratureConfig::for_phantom(&f, 4000).unwrap();
        let v = cone_integral(&f, [0.0, 0.0], FRAC_PI_4, 0.0, &sphere, &ray).unwrap();
        let analytic = 2.0 * 0.5 * (2.0 * PI).sqrt() * (-4.0f64).exp();
        assert!((v - analytic).abs() / analytic < 0.02, "{v} vs {analytic}");
    }

    #[test]
    fn misses_support_gives_zero() {
        let f = reference2();
        let sphere = SphereQuadrature::new(Dim::Two, 1).unwrap();
        let ray = RayQuadratureConfig::for_phantom(&f, 200).unwrap();
        // Narrow cone far to the side: rays x = u +- y tan(0.1) never reach |x| < 1.
        assert_eq!(cone_integral(&f, [5.0, 0.0], 0.1, 0.0, &sphere, &ray).unwrap(), 0.0);
        // Wide cone straddling the bump: both rays pass outside the ball.
        assert_eq!(cone_integral(&f, [0.0, 0.0], 1.2, 0.0, &sphere, &ray).unwrap(), 0.0);
    }

    #[test]
    fn projection_is_linear() {
        let a = reference2();
        let b = PhantomSpec::new(Dim::Two, vec![Bump::gaussian(Point::new2(0.5, 2.2), 0.2, 1.0)]).unwrap();
        let sphere = SphereQuadrature::new(Dim::Two, 1).unwrap();
        let both = a.union(&b).unwrap();
        let ray = RayQuadratureConfig::for_phantom(&both, 300).unwrap();
        let grid = sino_grid2(33, 12);
        let sa = forward_project(&a, &grid, 0.5, &sphere, &ray).unwrap();
        let sb = forward_project(&b, &grid, 0.5, &sphere, &ray).unwrap();
        let sab = forward_project(&both, &grid, 0.5, &sphere, &ray).unwrap();
        let scale = sab.max_abs();
        for ((x, y), z) in sa.values().iter().zip(sb.values()).zip(sab.values()) {
            assert!((x + y - z).abs() <= 1e-13 * scale);
        }
    }

    #[test]
    fn rejects_mismatched_dimensions() {
        let f = reference2();
        let sphere = SphereQuadrature::new(Dim::Three, 8).unwrap();
        let ray = RayQuadratureConfig::for_phantom(&f, 64).unwrap();
        assert!(matches!(forward_project(&f, &sino_grid2(5, 4), 0.0, &sphere, &ray), Err(Error::Shape(_))));
    }
}
