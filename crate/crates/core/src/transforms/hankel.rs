use std::ops::{Add, Mul};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{Axis, Dim};
use crate::transforms::bessel_j;

/// Hankel / Bessel orders that occur in two and three dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BesselOrder {
    /// `-1/2`, the two-dimensional case.
    MinusHalf,
    /// `0`, the three-dimensional case.
    Zero,
}

impl BesselOrder {
    /// The order `(d - 3) / 2`.
    pub fn for_dim(dim: Dim) -> Self {
        match dim {
            Dim::Two => BesselOrder::MinusHalf,
            Dim::Three => BesselOrder::Zero,
        }
    }

    pub fn from_value(nu: f64) -> Result<Self> {
        if nu == -0.5 {
            Ok(BesselOrder::MinusHalf)
        } else if nu == 0.0 {
            Ok(BesselOrder::Zero)
        } else {
            Err(Error::invalid("nu", format!("unsupported Hankel order {nu}; only -1/2 and 0 are implemented")))
        }
    }

    pub fn value(self) -> f64 {
        match self {
            BesselOrder::MinusHalf => -0.5,
            BesselOrder::Zero => 0.0,
        }
    }
}

/// Trapezoid rule for `int J_nu(lambda y) g(y) y dy` over the nodes of `axis`,
/// evaluated at every `lambda`.
///
/// For order -1/2 the factor `y J(lambda y)` tends to 0 as `y -> 0`, so a node
/// at `y = 0` contributes nothing; `lambda = 0` is a domain error there.
pub fn hankel_transform(order: BesselOrder, axis: &Axis, g: &[f64], lambdas: &[f64]) -> Result<Vec<f64>> {
    let (nodes, weights) = trapezoid(axis)?;
    hankel_sum(order, &nodes, &weights, g, lambdas)
}

pub(crate) fn hankel_transform_complex(
    order: BesselOrder,
    axis: &Axis,
    g: &[Complex64],
    lambdas: &[f64],
) -> Result<Vec<Complex64>> {
    let (nodes, weights) = trapezoid(axis)?;
    hankel_sum(order, &nodes, &weights, g, lambdas)
}

fn trapezoid(axis: &Axis) -> Result<(Vec<f64>, Vec<f64>)> {
    if axis.min < 0.0 {
        return Err(Error::Domain(format!("Hankel nodes must be non-negative, axis starts at {}", axis.min)));
    }
    Ok((axis.coords(), (0..axis.n).map(|i| axis.trapezoid_weight(i)).collect()))
}

/// `sum_i w_i y_i J_nu(lambda y_i) g_i` for every `lambda`, with arbitrary
/// non-negative nodes `y_i` and weights `w_i`.
pub fn hankel_sum<T>(order: BesselOrder, nodes: &[f64], weights: &[f64], g: &[T], lambdas: &[f64]) -> Result<Vec<T>>
where
    T: Copy + Send + Sync + Default + Add<Output = T> + Mul<f64, Output = T>,
{
    if g.len() != nodes.len() || weights.len() != nodes.len() {
        return Err(Error::Shape(format!("expected {} samples, got {}", nodes.len(), g.len())));
    }
    for &lambda in lambdas {
        if !(lambda >= 0.0 && lambda.is_finite()) || (order == BesselOrder::MinusHalf && lambda == 0.0) {
            return Err(Error::Domain(format!("Hankel evaluation point {lambda} is outside the domain")));
        }
    }
    let scaled: Vec<f64> = nodes.iter().zip(weights).map(|(y, w)| y * w).collect();
    lambdas
        .par_iter()
        .map(|&lambda| {
            let mut acc = T::default();
            for ((&y, &w), &v) in nodes.iter().zip(&scaled).zip(g) {
                if w == 0.0 {
                    continue;
                }
                acc = acc + v * (w * bessel_j(order, lambda * y)?);
            }
            Ok(acc)
        })
        .collect()
}
