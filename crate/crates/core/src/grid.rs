//! Grids, fields, sinograms and sphere quadrature shared by the rest of the crate.
//!
//! Points are stored with a fixed-size horizontal part `x: [f64; 2]`. In two
//! dimensions only `x[0]` is meaningful and `x[1]` is always zero, which lets
//! the projector and back-projectors use one code path for both dimensions.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};

/// Spatial dimension of the problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Dim {
    Two,
    Three,
}

impl Dim {
    pub fn new(d: usize) -> Result<Self> {
        match d {
            2 => Ok(Dim::Two),
            3 => Ok(Dim::Three),
            other => Err(Error::UnsupportedDimension(other)),
        }
    }

    /// The number `d`.
    pub fn get(self) -> usize {
        match self {
            Dim::Two => 2,
            Dim::Three => 3,
        }
    }

    /// Number of horizontal axes, `d - 1`.
    pub fn horizontal(self) -> usize {
        self.get() - 1
    }
}

/// A point `(x, y)` in the upper half space; see the module docs for the 2-D convention.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: [f64; 2],
    pub y: f64,
}

impl Point {
    pub fn new2(x: f64, y: f64) -> Self {
        Point { x: [x, 0.0], y }
    }

    pub fn new3(x0: f64, x1: f64, y: f64) -> Self {
        Point { x: [x0, x1], y }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        let a = self.x[0] - other.x[0];
        let b = self.x[1] - other.x[1];
        let c = self.y - other.y;
        (a * a + b * b + c * c).sqrt()
    }
}

/// Uniformly sampled closed interval, endpoints inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub n: usize,
}

impl Axis {
    pub fn new(min: f64, max: f64, n: usize) -> Result<Self> {
        if !(min.is_finite() && max.is_finite()) {
            return Err(Error::invalid("axis", "extent must be finite"));
        }
        if max <= min {
            return Err(Error::invalid("axis", format!("empty extent [{min}, {max}]")));
        }
        if n < 2 {
            return Err(Error::invalid("axis", format!("need at least 2 samples, got {n}")));
        }
        Ok(Axis { min, max, n })
    }

    pub fn spacing(&self) -> f64 {
        (self.max - self.min) / (self.n - 1) as f64
    }

    pub fn coord(&self, i: usize) -> f64 {
        if i + 1 == self.n {
            self.max
        } else {
            self.min + i as f64 * self.spacing()
        }
    }

    pub fn coords(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.coord(i)).collect()
    }

    /// Fractional sample position of `v` (0 at `min`, `n - 1` at `max`).
    pub fn position(&self, v: f64) -> f64 {
        (v - self.min) / self.spacing()
    }

    /// Index of the node closest to `v`, clamped to the axis.
    pub fn nearest(&self, v: f64) -> usize {
        let i = self.position(v).round();
        if i <= 0.0 {
            0
        } else {
            (i as usize).min(self.n - 1)
        }
    }

    pub fn contains(&self, v: f64) -> bool {
        v >= self.min && v <= self.max
    }

    /// Trapezoid weight of node `i`.
    pub fn trapezoid_weight(&self, i: usize) -> f64 {
        if i == 0 || i + 1 == self.n {
            0.5 * self.spacing()
        } else {
            self.spacing()
        }
    }

    /// Linear interpolation stencil `(i, w)` meaning `(1-w)·v[i] + w·v[i+1]`,
    /// or `None` outside the closed interval.
    #[inline]
    pub fn stencil(&self, v: f64) -> Option<(usize, f64)> {
        let t = self.position(v);
        if !(t >= 0.0 && t <= (self.n - 1) as f64) {
            return None;
        }
        let i = (t.floor() as usize).min(self.n - 2);
        Some((i, t - i as f64))
    }
}

/// Regular grid on `R^{d-1} x [y_min, y_max]` with `y_min > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct VolumeGrid {
    dim: Dim,
    x_axes: Vec<Axis>,
    y_axis: Axis,
}

impl VolumeGrid {
    pub fn new(dim: Dim, x_axes: Vec<Axis>, y_axis: Axis) -> Result<Self> {
        if x_axes.len() != dim.horizontal() {
            return Err(Error::Shape(format!(
                "d = {} needs {} horizontal axes, got {}",
                dim.get(),
                dim.horizontal(),
                x_axes.len()
            )));
        }
        if y_axis.min <= 0.0 {
            return Err(Error::invalid("y_min", format!("must be > 0, got {}", y_axis.min)));
        }
        Ok(VolumeGrid { dim, x_axes, y_axis })
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn x_axes(&self) -> &[Axis] {
        &self.x_axes
    }

    pub fn y_axis(&self) -> &Axis {
        &self.y_axis
    }

    /// Horizontal counts padded to two entries (`[n0, 1]` in 2-D).
    pub(crate) fn x_counts(&self) -> [usize; 2] {
        [self.x_axes[0].n, self.x_axes.get(1).map_or(1, |a| a.n)]
    }

    /// Per-axis counts in storage order (horizontal axes, then y).
    pub fn counts(&self) -> Vec<usize> {
        self.x_axes.iter().map(|a| a.n).chain(std::iter::once(self.y_axis.n)).collect()
    }

    pub fn len(&self) -> usize {
        self.counts().iter().product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Product of the axis spacings.
    pub fn cell_volume(&self) -> f64 {
        self.x_axes.iter().map(Axis::spacing).product::<f64>() * self.y_axis.spacing()
    }

    /// Coordinates of the node at `index` (horizontal indices first, y last).
    pub fn grid_coordinates(&self, index: &[usize]) -> Result<Point> {
        let counts = self.counts();
        if index.len() != counts.len() || index.iter().zip(&counts).any(|(i, n)| i >= n) {
            return Err(Error::Index { index: index.to_vec(), counts });
        }
        let mut p = Point { x: [0.0; 2], y: self.y_axis.coord(index[counts.len() - 1]) };
        for (a, (axis, &i)) in self.x_axes.iter().zip(index).enumerate() {
            p.x[a] = axis.coord(i);
        }
        Ok(p)
    }

    /// Index of the node nearest to `p`.
    pub fn nearest_index(&self, p: &Point) -> Vec<usize> {
        let mut idx: Vec<usize> = self.x_axes.iter().enumerate().map(|(a, axis)| axis.nearest(p.x[a])).collect();
        idx.push(self.y_axis.nearest(p.y));
        idx
    }

    /// Point at a linear storage offset (y fastest).
    pub(crate) fn point_at(&self, linear: usize) -> Point {
        let ny = self.y_axis.n;
        let [_, n1] = self.x_counts();
        let iy = linear % ny;
        let rest = linear / ny;
        let i1 = rest % n1;
        let i0 = rest / n1;
        let x1 = if self.x_axes.len() > 1 { self.x_axes[1].coord(i1) } else { 0.0 };
        Point { x: [self.x_axes[0].coord(i0), x1], y: self.y_axis.coord(iy) }
    }

    pub(crate) fn is_boundary(&self, linear: usize) -> bool {
        let ny = self.y_axis.n;
        let [n0, n1] = self.x_counts();
        let iy = linear % ny;
        let rest = linear / ny;
        let i1 = rest % n1;
        let i0 = rest / n1;
        let edge = |i: usize, n: usize| i == 0 || i + 1 == n;
        edge(iy, ny) || edge(i0, n0) || (self.x_axes.len() > 1 && edge(i1, n1))
    }
}

/// Samples of `f` on a [`VolumeGrid`], stored row-major with y fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct VolumeField {
    grid: VolumeGrid,
    values: Vec<f64>,
}

impl VolumeField {
    pub fn new(grid: VolumeGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Shape(format!("field has {} values, grid needs {}", values.len(), grid.len())));
        }
        Ok(VolumeField { grid, values })
    }

    pub fn zeros(grid: VolumeGrid) -> Self {
        let values = vec![0.0; grid.len()];
        VolumeField { grid, values }
    }

    pub fn grid(&self) -> &VolumeGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Largest magnitude on the outermost shell of nodes.
    pub fn boundary_max(&self) -> f64 {
        self.values
            .iter()
            .enumerate()
            .filter(|(i, _)| self.grid.is_boundary(*i))
            .fold(0.0_f64, |m, (_, v)| m.max(v.abs()))
    }

    pub fn l2_norm(&self) -> f64 {
        (self.values.iter().map(|v| v * v).sum::<f64>() * self.grid.cell_volume()).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }
}

/// Discrete L2 distance between two fields on the same grid.
///
/// Returns `(absolute, relative)` with `relative = absolute / ||b||`. A zero
/// reference gives `0` when `a` is also zero and `+inf` otherwise.
pub fn field_l2_error(a: &VolumeField, b: &VolumeField) -> Result<(f64, f64)> {
    if a.grid != b.grid {
        return Err(Error::Shape("fields live on different grids".into()));
    }
    let dv = a.grid.cell_volume();
    let diff: f64 = a.values.iter().zip(&b.values).map(|(x, y)| (x - y) * (x - y)).sum();
    let abs = (diff * dv).sqrt();
    let norm_b = b.l2_norm();
    let rel = if norm_b > 0.0 {
        abs / norm_b
    } else if abs > 0.0 {
        f64::INFINITY
    } else {
        0.0
    };
    Ok((abs, rel))
}

/// `(u, theta)` sampling of a cone sinogram; theta strictly inside `(0, pi/2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConeSinogramGrid {
    dim: Dim,
    u_axes: Vec<Axis>,
    theta: Axis,
}

impl ConeSinogramGrid {
    pub fn new(dim: Dim, u_axes: Vec<Axis>, theta: Axis) -> Result<Self> {
        if u_axes.len() != dim.horizontal() {
            return Err(Error::Shape(format!(
                "d = {} needs {} vertex axes, got {}",
                dim.get(),
                dim.horizontal(),
                u_axes.len()
            )));
        }
        if !(theta.min > 0.0 && theta.max < FRAC_PI_2) {
            return Err(Error::invalid(
                "theta",
                format!("range [{}, {}] must lie strictly inside (0, pi/2)", theta.min, theta.max),
            ));
        }
        Ok(ConeSinogramGrid { dim, u_axes, theta })
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn u_axes(&self) -> &[Axis] {
        &self.u_axes
    }

    pub fn theta(&self) -> &Axis {
        &self.theta
    }

    pub(crate) fn u_counts(&self) -> [usize; 2] {
        [self.u_axes[0].n, self.u_axes.get(1).map_or(1, |a| a.n)]
    }

    pub fn counts(&self) -> Vec<usize> {
        self.u_axes.iter().map(|a| a.n).chain(std::iter::once(self.theta.n)).collect()
    }

    pub fn len(&self) -> usize {
        self.counts().iter().product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn vertex_count(&self) -> usize {
        self.u_axes.iter().map(|a| a.n).product()
    }

    /// Vertex position of the `j`-th vertex (row-major over the u axes).
    pub(crate) fn vertex(&self, j: usize) -> [f64; 2] {
        let [_, n1] = self.u_counts();
        let u1 = if self.u_axes.len() > 1 { self.u_axes[1].coord(j % n1) } else { 0.0 };
        [self.u_axes[0].coord(j / n1), u1]
    }
}

/// Samples of `R^(p) f` on a [`ConeSinogramGrid`], theta fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct ConeSinogram {
    grid: ConeSinogramGrid,
    p: f64,
    values: Vec<f64>,
}

impl ConeSinogram {
    pub fn new(grid: ConeSinogramGrid, p: f64, values: Vec<f64>) -> Result<Self> {
        if !p.is_finite() {
            return Err(Error::invalid("p", "weight exponent must be finite"));
        }
        if values.len() != grid.len() {
            return Err(Error::Shape(format!("sinogram has {} values, grid needs {}", values.len(), grid.len())));
        }
        Ok(ConeSinogram { grid, p, values })
    }

    pub fn zeros(grid: ConeSinogramGrid, p: f64) -> Self {
        let values = vec![0.0; grid.len()];
        ConeSinogram { grid, p, values }
    }

    pub fn grid(&self) -> &ConeSinogramGrid {
        &self.grid
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Errors unless `other` carries the same weight exponent.
    pub fn ensure_same_p(&self, other: &ConeSinogram) -> Result<()> {
        check_p(self.p, other.p)
    }

    /// Values of one theta column, in vertex order.
    pub fn theta_slice(&self, t: usize) -> Vec<f64> {
        let nt = self.grid.theta.n;
        self.values.iter().skip(t).step_by(nt).copied().collect()
    }

    pub(crate) fn set_theta_slice(&mut self, t: usize, slice: &[f64]) {
        let nt = self.grid.theta.n;
        for (j, v) in slice.iter().enumerate() {
            self.values[j * nt + t] = *v;
        }
    }
}

pub(crate) fn check_p(expected: f64, found: f64) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::Weight { expected, found })
    }
}

/// Nodes and weights discretizing the unit sphere `S^{d-2}` of `R^{d-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereQuadrature {
    dim: Dim,
    nodes: Vec<[f64; 2]>,
    weights: Vec<f64>,
}

impl SphereQuadrature {
    /// Two points `{+1, -1}` for `d = 2`; `n` equispaced angles on the circle for `d = 3`.
    pub fn new(dim: Dim, n: usize) -> Result<Self> {
        match dim {
            Dim::Two => Ok(SphereQuadrature { dim, nodes: vec![[1.0, 0.0], [-1.0, 0.0]], weights: vec![1.0, 1.0] }),
            Dim::Three => {
                if n == 0 {
                    return Err(Error::invalid("sphere_nodes", "need at least one node"));
                }
                let step = 2.0 * PI / n as f64;
                let nodes = (0..n)
                    .map(|j| {
                        let a = step * j as f64;
                        [a.cos(), a.sin()]
                    })
                    .collect();
                Ok(SphereQuadrature { dim, nodes, weights: vec![step; n] })
            }
        }
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn nodes(&self) -> &[[f64; 2]] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Quadrature of `g` over the sphere.
    pub fn integrate(&self, mut g: impl FnMut([f64; 2]) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(n, w)| w * g(*n)).sum()
    }
}

/// Surface measure of `S^{d-2}`.
pub fn sphere_measure(dim: Dim) -> f64 {
    match dim {
        Dim::Two => 2.0,
        Dim::Three => 2.0 * PI,
    }
}
