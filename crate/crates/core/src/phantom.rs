//! Smooth, compactly supported test functions in the upper half space.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{Dim, Point, SphereQuadrature, VolumeField, VolumeGrid};

/// Anything the forward projector can sample pointwise.
pub trait Phantom: Sync {
    fn dim(&self) -> Dim;

    fn eval(&self, point: &Point) -> f64;

    /// `(y_bottom, y_top)` bounding the support in y, when known.
    fn vertical_support(&self) -> Option<(f64, f64)>;

    /// Sphere quadrature of `n -> f(center + radius n, y)` on the horizontal
    /// slice at height `y`.
    fn ring_integral(&self, center: [f64; 2], radius: f64, y: f64, sphere: &SphereQuadrature) -> f64 {
        sphere.integrate(|n| self.eval(&Point { x: [center[0] + radius * n[0], center[1] + radius * n[1]], y }))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BumpKind {
    /// `exp(1 - 1/(1 - r^2))` inside the unit ball, peak value 1.
    Mollifier,
    /// `exp(-|x - c|^2 / (2 sigma^2))` cut off at `radius`.
    TruncatedGaussian,
}

impl BumpKind {
    pub fn name(self) -> &'static str {
        match self {
            BumpKind::Mollifier => "mollifier",
            BumpKind::TruncatedGaussian => "truncated-gaussian",
        }
    }
}

impl std::str::FromStr for BumpKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mollifier" => Ok(BumpKind::Mollifier),
            "truncated-gaussian" | "gaussian" => Ok(BumpKind::TruncatedGaussian),
            other => Err(Error::invalid("kind", format!("unknown bump kind `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bump {
    pub kind: BumpKind,
    pub center: Point,
    /// Support radius (mollifier) or cutoff radius (gaussian).
    pub radius: f64,
    /// Gaussian width; unused by the mollifier.
    pub sigma: f64,
    pub amplitude: f64,
}

impl Bump {
    pub fn mollifier(center: Point, radius: f64, amplitude: f64) -> Self {
        Bump { kind: BumpKind::Mollifier, center, radius, sigma: 0.0, amplitude }
    }

    /// Gaussian with the conventional cutoff `radius = 4 sigma`.
    pub fn gaussian(center: Point, sigma: f64, amplitude: f64) -> Self {
        Self::gaussian_with_cutoff(center, sigma, 4.0 * sigma, amplitude)
    }

    pub fn gaussian_with_cutoff(center: Point, sigma: f64, radius: f64, amplitude: f64) -> Self {
        Bump { kind: BumpKind::TruncatedGaussian, center, radius, sigma, amplitude }
    }

    fn validate(&self) -> Result<()> {
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return Err(Error::invalid("radius", format!("must be positive, got {}", self.radius)));
        }
        if !self.amplitude.is_finite() {
            return Err(Error::invalid("amplitude", "must be finite"));
        }
        if self.kind == BumpKind::TruncatedGaussian && !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::invalid("sigma", format!("must be positive, got {}", self.sigma)));
        }
        if !(self.center.x.iter().all(|c| c.is_finite()) && self.center.y.is_finite()) {
            return Err(Error::invalid("center", "must be finite"));
        }
        if self.center.y - self.radius <= 0.0 {
            return Err(Error::invalid(
                "center",
                format!(
                    "support must stay above the vertex plane: center_y - radius = {}",
                    self.center.y - self.radius
                ),
            ));
        }
        Ok(())
    }

    #[inline]
    pub fn eval(&self, point: &Point) -> f64 {
        let dist = point.distance(&self.center);
        if dist >= self.radius {
            return 0.0;
        }
        match self.kind {
            BumpKind::Mollifier => {
                let r = dist / self.radius;
                self.amplitude * (1.0 - 1.0 / (1.0 - r * r)).exp()
            }
            BumpKind::TruncatedGaussian => self.amplitude * (-dist * dist / (2.0 * self.sigma * self.sigma)).exp(),
        }
    }
}

/// A sum of bumps; every bump is supported strictly above `y = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhantomSpec {
    dim: Dim,
    bumps: Vec<Bump>,
}

impl PhantomSpec {
    pub fn new(dim: Dim, bumps: Vec<Bump>) -> Result<Self> {
        for b in &bumps {
            b.validate()?;
            if dim == Dim::Two && b.center.x[1] != 0.0 {
                return Err(Error::invalid("center", "a 2-D bump has one horizontal coordinate"));
            }
        }
        Ok(PhantomSpec { dim, bumps })
    }

    pub fn empty(dim: Dim) -> Self {
        PhantomSpec { dim, bumps: Vec::new() }
    }

    pub fn bumps(&self) -> &[Bump] {
        &self.bumps
    }

    /// The spec whose bumps are those of `self` followed by those of `other`.
    pub fn union(&self, other: &PhantomSpec) -> Result<PhantomSpec> {
        if self.dim != other.dim {
            return Err(Error::Shape("cannot combine phantoms of different dimension".into()));
        }
        let bumps = self.bumps.iter().chain(&other.bumps).copied().collect();
        Ok(PhantomSpec { dim: self.dim, bumps })
    }

    /// Every bump shifted horizontally by `shift`.
    pub fn translated(&self, shift: [f64; 2]) -> PhantomSpec {
        let bumps = self
            .bumps
            .iter()
            .map(|b| {
                let mut b = *b;
                b.center.x[0] += shift[0];
                if self.dim == Dim::Three {
                    b.center.x[1] += shift[1];
                }
                b
            })
            .collect();
        PhantomSpec { dim: self.dim, bumps }
    }
}

impl Phantom for PhantomSpec {
    fn dim(&self) -> Dim {
        self.dim
    }

    #[inline]
    fn eval(&self, point: &Point) -> f64 {
        self.bumps.iter().map(|b| b.eval(point)).sum()
    }

    fn vertical_support(&self) -> Option<(f64, f64)> {
        if self.bumps.is_empty() {
            return None;
        }
        let lo = self.bumps.iter().map(|b| b.center.y - b.radius).fold(f64::INFINITY, f64::min);
        let hi = self.bumps.iter().map(|b| b.center.y + b.radius).fold(f64::NEG_INFINITY, f64::max);
        Some((lo, hi))
    }

    fn ring_integral(&self, center: [f64; 2], radius: f64, y: f64, sphere: &SphereQuadrature) -> f64 {
        if sphere.dim() == Dim::Two {
            return sphere.integrate(|n| self.eval(&Point { x: [center[0] + radius * n[0], 0.0], y }));
        }
        // Equispaced circle: visit only the nodes on the arc that can meet each ball.
        let nodes = sphere.nodes();
        let weights = sphere.weights();
        let count = nodes.len();
        let step = 2.0 * PI / count as f64;
        let mut total = 0.0;
        for b in &self.bumps {
            let dy = y - b.center.y;
            let disk2 = b.radius * b.radius - dy * dy;
            if disk2 <= 0.0 {
                continue;
            }
            let disk = disk2.sqrt();
            let ox = b.center.x[0] - center[0];
            let oy = b.center.x[1] - center[1];
            let dist = (ox * ox + oy * oy).sqrt();
            if (radius - dist).abs() >= disk {
                continue;
            }
            let visit = |j: usize, total: &mut f64| {
                let n = nodes[j];
                let p = Point { x: [center[0] + radius * n[0], center[1] + radius * n[1]], y };
                *total += weights[j] * b.eval(&p);
            };
            if radius + dist <= disk || dist == 0.0 || radius == 0.0 {
                for j in 0..count {
                    visit(j, &mut total);
                }
                continue;
            }
            let cos_half = ((radius * radius + dist * dist - disk2) / (2.0 * radius * dist)).clamp(-1.0, 1.0);
            let half = cos_half.acos();
            let mid = oy.atan2(ox);
            let first = ((mid - half) / step).floor() as i64 - 1;
            let last = ((mid + half) / step).ceil() as i64 + 1;
            if (last - first + 1) as usize >= count {
                for j in 0..count {
                    visit(j, &mut total);
                }
                continue;
            }
            for j in first..=last {
                visit(j.rem_euclid(count as i64) as usize, &mut total);
            }
        }
        total
    }
}

/// `(x, y) -> y^(-p) f(x, y)`, the reweighting that relates `R^(p)` to `R^(0)`.
#[derive(Debug, Clone, Copy)]
pub struct YWeighted<'a, P: ?Sized> {
    pub inner: &'a P,
    pub p: f64,
}

impl<P: Phantom + ?Sized> Phantom for YWeighted<'_, P> {
    fn dim(&self) -> Dim {
        self.inner.dim()
    }

    #[inline]
    fn eval(&self, point: &Point) -> f64 {
        let v = self.inner.eval(point);
        if v == 0.0 {
            0.0
        } else {
            v * point.y.powf(-self.p)
        }
    }

    fn vertical_support(&self) -> Option<(f64, f64)> {
        self.inner.vertical_support()
    }

    fn ring_integral(&self, center: [f64; 2], radius: f64, y: f64, sphere: &SphereQuadrature) -> f64 {
        let v = self.inner.ring_integral(center, radius, y, sphere);
        if v == 0.0 {
            0.0
        } else {
            v * y.powf(-self.p)
        }
    }
}

/// Samples `f` at every node of `grid`.
///
/// Fails with a support error when a bump's ball is not contained in the grid
/// box, since the raster would silently clip it.
pub fn rasterize(spec: &PhantomSpec, grid: &VolumeGrid) -> Result<VolumeField> {
    if spec.dim != grid.dim() {
        return Err(Error::Shape("phantom and grid dimensions differ".into()));
    }
    for (i, b) in spec.bumps.iter().enumerate() {
        let mut ok = grid.y_axis().contains(b.center.y - b.radius) && grid.y_axis().contains(b.center.y + b.radius);
        for (a, axis) in grid.x_axes().iter().enumerate() {
            ok &= axis.contains(b.center.x[a] - b.radius) && axis.contains(b.center.x[a] + b.radius);
        }
        if !ok {
            return Err(Error::Support(format!("bump {i} extends beyond the grid extents")));
        }
    }
    Ok(sample(spec, grid))
}

/// Pointwise samples of any phantom, without the support check.
pub fn sample<P: Phantom + ?Sized>(f: &P, grid: &VolumeGrid) -> VolumeField {
    let values = (0..grid.len()).into_par_iter().map(|i| f.eval(&grid.point_at(i))).collect();
    VolumeField::new(grid.clone(), values).expect("length matches grid")
}
