//! Fourier multipliers along the u-axes: Hilbert, derivative and the Riesz
//! potential `|k|^{d-1}` used as the reconstruction filter.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{ConeSinogram, Dim};
use crate::transforms::{SpectralAxis, SpectralGrid};

/// Apodization applied to the Riesz multiplier inside the retained band.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Window {
    None,
    Cosine,
    Hann,
}

impl Window {
    pub fn name(self) -> &'static str {
        match self {
            Window::None => "none",
            Window::Cosine => "cosine",
            Window::Hann => "hann",
        }
    }

    /// Taper at `|k|` for the cutoff frequency `cutoff`; zero beyond it.
    pub fn weight(self, k: f64, cutoff: f64) -> f64 {
        if k > cutoff {
            return 0.0;
        }
        match self {
            Window::None => 1.0,
            Window::Cosine => (0.5 * PI * k / cutoff).cos(),
            Window::Hann => 0.5 * (1.0 + (PI * k / cutoff).cos()),
        }
    }
}

impl std::str::FromStr for Window {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(Window::None),
            "cosine" => Ok(Window::Cosine),
            "hann" => Ok(Window::Hann),
            other => Err(Error::invalid("window", format!("unknown window `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterConfig {
    /// Fraction of the Nyquist frequency kept, in (0, 1].
    pub band_fraction: f64,
    pub window: Window,
    /// Zero-padding multiple along each u-axis: 1, 2 or 4.
    pub pad_factor: usize,
}

impl Default for FilterConfig {
    fn default() -> Self {
        FilterConfig { band_fraction: 0.9, window: Window::Cosine, pad_factor: 2 }
    }
}

impl FilterConfig {
    pub fn new(band_fraction: f64, window: Window, pad_factor: usize) -> Result<Self> {
        let c = FilterConfig { band_fraction, window, pad_factor };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.band_fraction > 0.0 && self.band_fraction <= 1.0) {
            return Err(Error::invalid("band_fraction", format!("must lie in (0, 1], got {}", self.band_fraction)));
        }
        if ![1, 2, 4].contains(&self.pad_factor) {
            return Err(Error::invalid("pad_factor", format!("must be 1, 2 or 4, got {}", self.pad_factor)));
        }
        Ok(())
    }
}

/// Applies a real-valued-output multiplier `m(j, k)` to one real line.
fn apply_1d(g: &[f64], spacing: f64, multiplier: impl Fn(&SpectralAxis, usize) -> Complex64) -> Result<Vec<f64>> {
    if g.len() < 2 {
        return Err(Error::Shape(format!("need at least 2 samples, got {}", g.len())));
    }
    let axis = SpectralAxis::new(g.len(), spacing, 0.0)?;
    let grid = SpectralGrid::new(vec![axis])?;
    let mut data: Vec<Complex64> = g.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    grid.forward_in_place(&mut data)?;
    for (j, v) in data.iter_mut().enumerate() {
        *v *= multiplier(&axis, j);
    }
    grid.inverse_in_place(&mut data)?;
    Ok(data.into_iter().map(|c| c.re).collect())
}

/// Periodic Hilbert transform: multiplier `-i sign(k)`, with the DC and
/// Nyquist bins sent to zero.
pub fn hilbert_1d(g: &[f64]) -> Result<Vec<f64>> {
    apply_1d(g, 1.0, |axis, j| {
        let s = axis.signed_index(j);
        if s == 0 || axis.is_nyquist_bin(j) {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(0.0, -(s.signum() as f64))
        }
    })
}

/// Periodic derivative with sample spacing `spacing`: multiplier `i k`,
/// Nyquist bin zeroed.
pub fn spectral_derivative_1d(g: &[f64], spacing: f64) -> Result<Vec<f64>> {
    apply_1d(g, spacing, |axis, j| {
        if axis.is_nyquist_bin(j) {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(0.0, axis.frequency(j))
        }
    })
}

/// Applies `|k|^{d-1} W(|k|)` to every theta slice of `g` along the u-axes.
///
/// Each slice is zero-padded to `pad_factor` times its length per axis,
/// filtered, and cropped back. Nyquist bins are zeroed. The window cutoff is
/// `band_fraction` times the smallest per-axis Nyquist frequency.
pub fn riesz_potential(g: &ConeSinogram, config: &FilterConfig) -> Result<ConeSinogram> {
    config.validate()?;
    let grid = g.grid();
    let dim = grid.dim();
    let power = (dim.get() - 1) as i32;
    let counts = grid.u_counts();
    let axes: Vec<SpectralAxis> = grid
        .u_axes()
        .iter()
        .map(|a| SpectralAxis::new(a.n * config.pad_factor, a.spacing(), 0.0))
        .collect::<Result<_>>()?;
    let padded = [axes[0].n, if dim == Dim::Three { axes[1].n } else { 1 }];
    let spectral = SpectralGrid::new(axes.clone())?;
    let cutoff = config.band_fraction * spectral.nyquist();

    // The multiplier depends only on the bin, so tabulate it once.
    let multiplier: Vec<f64> = (0..spectral.len())
        .map(|offset| {
            let idx = spectral.unravel(offset);
            if idx.iter().zip(&axes).any(|(&j, a)| a.is_nyquist_bin(j)) {
                return 0.0;
            }
            let k = spectral.frequency(&idx).iter().map(|v| v * v).sum::<f64>().sqrt();
            k.powi(power) * config.window.weight(k, cutoff)
        })
        .collect();

    let nt = grid.theta().n;
    let slices: Vec<Vec<f64>> = (0..nt)
        .into_par_iter()
        .map(|t| -> Result<Vec<f64>> {
            let slice = g.theta_slice(t);
            let mut data = vec![Complex64::new(0.0, 0.0); spectral.len()];
            for a in 0..counts[0] {
                for b in 0..counts[1] {
                    data[a * padded[1] + b] = Complex64::new(slice[a * counts[1] + b], 0.0);
                }
            }
            spectral.forward_in_place(&mut data)?;
            for (v, m) in data.iter_mut().zip(&multiplier) {
                *v *= *m;
            }
            spectral.inverse_in_place(&mut data)?;
            let mut out = vec![0.0; counts[0] * counts[1]];
            for a in 0..counts[0] {
                for b in 0..counts[1] {
                    out[a * counts[1] + b] = data[a * padded[1] + b].re;
                }
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;

    let mut out = ConeSinogram::zeros(grid.clone(), g.p());
    for (t, slice) in slices.iter().enumerate() {
        out.set_theta_slice(t, slice);
    }
    Ok(out)
}
