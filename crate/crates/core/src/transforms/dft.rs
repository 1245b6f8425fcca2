//! DFT along the horizontal axes with continuous-transform normalization.
//!
//! For samples `g_n = g(u_0 + n du)` the forward transform approximates
//! `G(k) = int e^{-iku} g(u) du` on the lattice `k_j = 2 pi j / (N du)`:
//!
//! ```text
//! G(k_j) = du * e^{-i k_j u_0} * sum_n g_n e^{-2 pi i j n / N}
//! ```
//!
//! and the inverse multiplies by `dk / (2 pi) = 1 / (N du)`. The phase factor
//! makes spectra taken on grids with different origins directly comparable.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// One periodic axis of a spectral grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralAxis {
    pub n: usize,
    pub spacing: f64,
    pub origin: f64,
}

impl SpectralAxis {
    pub fn new(n: usize, spacing: f64, origin: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Shape("spectral axis needs at least one node".into()));
        }
        if !(spacing > 0.0 && spacing.is_finite()) {
            return Err(Error::invalid("spacing", format!("must be positive, got {spacing}")));
        }
        Ok(SpectralAxis { n, spacing, origin })
    }

    /// Lattice spacing `2 pi / (N du)`.
    pub fn frequency_step(&self) -> f64 {
        2.0 * PI / (self.n as f64 * self.spacing)
    }

    /// Signed DFT index of bin `j`: `0, 1, .., N/2, -(N - 1)/2, .., -1`.
    pub fn signed_index(&self, j: usize) -> i64 {
        if 2 * j <= self.n {
            j as i64
        } else {
            j as i64 - self.n as i64
        }
    }

    pub fn frequency(&self, j: usize) -> f64 {
        self.signed_index(j) as f64 * self.frequency_step()
    }

    pub fn nyquist(&self) -> f64 {
        PI / self.spacing
    }

    /// True for the unpaired bin `j = N/2` of an even-length axis.
    pub fn is_nyquist_bin(&self, j: usize) -> bool {
        2 * j == self.n
    }

    /// Bin whose frequency equals `k`, or a lattice error.
    pub fn bin_of(&self, k: f64) -> Result<usize> {
        let step = self.frequency_step();
        let m = (k / step).round();
        if (k - m * step).abs() > 1e-9 * step.max(k.abs()) {
            return Err(Error::Lattice { k, spacing: step });
        }
        let n = self.n as i64;
        let m = m as i64;
        if 2 * m.abs() > n || (2 * m == -n) {
            return Err(Error::Lattice { k, spacing: step });
        }
        Ok(m.rem_euclid(n) as usize)
    }
}

/// Row-major product of spectral axes (last axis fastest).
#[derive(Clone)]
pub struct SpectralGrid {
    axes: Vec<SpectralAxis>,
    forward: Vec<Arc<dyn Fft<f64>>>,
    inverse: Vec<Arc<dyn Fft<f64>>>,
}

impl std::fmt::Debug for SpectralGrid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpectralGrid").field("axes", &self.axes).finish()
    }
}

impl SpectralGrid {
    pub fn new(axes: Vec<SpectralAxis>) -> Result<Self> {
        if axes.is_empty() {
            return Err(Error::Shape("spectral grid needs at least one axis".into()));
        }
        let mut planner = FftPlanner::new();
        let forward = axes.iter().map(|a| planner.plan_fft_forward(a.n)).collect();
        let inverse = axes.iter().map(|a| planner.plan_fft_inverse(a.n)).collect();
        Ok(SpectralGrid { axes, forward, inverse })
    }

    pub fn axes(&self) -> &[SpectralAxis] {
        &self.axes
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.n).product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Smallest per-axis Nyquist frequency.
    pub fn nyquist(&self) -> f64 {
        self.axes.iter().map(SpectralAxis::nyquist).fold(f64::INFINITY, f64::min)
    }

    /// Multi-index of a linear bin offset.
    pub fn unravel(&self, mut offset: usize) -> Vec<usize> {
        let mut idx = vec![0; self.axes.len()];
        for (a, axis) in self.axes.iter().enumerate().rev() {
            idx[a] = offset % axis.n;
            offset /= axis.n;
        }
        idx
    }

    pub fn ravel(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.axes).fold(0, |acc, (i, a)| acc * a.n + i)
    }

    /// Frequency vector of a bin multi-index.
    pub fn frequency(&self, idx: &[usize]) -> Vec<f64> {
        idx.iter().zip(&self.axes).map(|(&j, a)| a.frequency(j)).collect()
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.len() {
            return Err(Error::Shape(format!("expected {} samples, got {len}", self.len())));
        }
        Ok(())
    }

    /// Unnormalized FFT of every line along `axis`, in place.
    fn transform_axis(&self, data: &mut [Complex64], axis: usize, inverse: bool) {
        let n = self.axes[axis].n;
        let inner: usize = self.axes[axis + 1..].iter().map(|a| a.n).product();
        let outer = data.len() / (n * inner);
        let plan = if inverse { &self.inverse[axis] } else { &self.forward[axis] };
        if inner == 1 {
            plan.process(data);
            return;
        }
        let mut line = vec![Complex64::new(0.0, 0.0); n];
        for o in 0..outer {
            for i in 0..inner {
                let base = o * n * inner + i;
                for (m, v) in line.iter_mut().enumerate() {
                    *v = data[base + m * inner];
                }
                plan.process(&mut line);
                for (m, v) in line.iter().enumerate() {
                    data[base + m * inner] = *v;
                }
            }
        }
    }

    /// Per-bin phase `e^{-i k . u_0}` (or its conjugate).
    fn apply_phase(&self, data: &mut [Complex64], sign: f64) {
        if self.axes.iter().all(|a| a.origin == 0.0) {
            return;
        }
        let phases: Vec<Vec<Complex64>> = self
            .axes
            .iter()
            .map(|a| (0..a.n).map(|j| Complex64::from_polar(1.0, sign * a.frequency(j) * a.origin)).collect())
            .collect();
        for (offset, v) in data.iter_mut().enumerate() {
            let idx = self.unravel(offset);
            for (a, &j) in idx.iter().enumerate() {
                *v *= phases[a][j];
            }
        }
    }

    /// Forward transform of complex samples, in place.
    pub fn forward_in_place(&self, data: &mut [Complex64]) -> Result<()> {
        self.check_len(data.len())?;
        for a in 0..self.axes.len() {
            self.transform_axis(data, a, false);
        }
        let scale: f64 = self.axes.iter().map(|a| a.spacing).product();
        for v in data.iter_mut() {
            *v *= scale;
        }
        self.apply_phase(data, -1.0);
        Ok(())
    }

    /// Inverse transform, in place.
    pub fn inverse_in_place(&self, data: &mut [Complex64]) -> Result<()> {
        self.check_len(data.len())?;
        self.apply_phase(data, 1.0);
        for a in 0..self.axes.len() {
            self.transform_axis(data, a, true);
        }
        let scale: f64 = self.axes.iter().map(|a| 1.0 / (a.n as f64 * a.spacing)).product();
        for v in data.iter_mut() {
            *v *= scale;
        }
        Ok(())
    }
}

/// Spectrum of real samples.
pub fn dft_forward(grid: &SpectralGrid, samples: &[f64]) -> Result<Vec<Complex64>> {
    let mut data: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    grid.forward_in_place(&mut data)?;
    Ok(data)
}

/// Real part of the inverse transform.
pub fn dft_inverse(grid: &SpectralGrid, spectrum: &[Complex64]) -> Result<Vec<f64>> {
    let mut data = spectrum.to_vec();
    grid.inverse_in_place(&mut data)?;
    Ok(data.into_iter().map(|c| c.re).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn grid1(n: usize, du: f64, u0: f64) -> SpectralGrid {
        SpectralGrid::new(vec![SpectralAxis::new(n, du, u0).unwrap()]).unwrap()
    }

    #[test]
    fn constant_maps_to_domain_length() {
        let n = 40;
        let l = 3.0;
        let g = grid1(n, l / n as f64, 0.0);
        let spec = dft_forward(&g, &vec![1.0; n]).unwrap();
        assert!((spec[0].re - l).abs() < 1e-12 && spec[0].im.abs() < 1e-12);
        assert!(spec[1..].iter().all(|c| c.norm() < 1e-12));
    }

    #[test]
    fn pure_harmonic_is_one_bin() {
        let (n0, n1) = (16, 12);
        let axes = vec![SpectralAxis::new(n0, 0.25, -2.0).unwrap(), SpectralAxis::new(n1, 0.5, 1.0).unwrap()];
        let g = SpectralGrid::new(axes.clone()).unwrap();
        let (j0, j1) = (3usize, n1 - 2);
        let k = [axes[0].frequency(j0), axes[1].frequency(j1)];
        let mut data = vec![Complex64::new(0.0, 0.0); n0 * n1];
        for a in 0..n0 {
            for b in 0..n1 {
                let u = [axes[0].origin + a as f64 * 0.25, axes[1].origin + b as f64 * 0.5];
                data[a * n1 + b] = Complex64::from_polar(1.0, k[0] * u[0] + k[1] * u[1]);
            }
        }
        g.forward_in_place(&mut data).unwrap();
        let area = (n0 as f64 * 0.25) * (n1 as f64 * 0.5);
        for (off, v) in data.iter().enumerate() {
            if off == j0 * n1 + j1 {
                assert!((v.norm() - area).abs() < 1e-10);
            } else {
                assert!(v.norm() < 1e-10, "{off}: {v}");
            }
        }
    }

    #[test]
    fn round_trip_and_parseval() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let axes = vec![SpectralAxis::new(24, 0.3, -1.7).unwrap(), SpectralAxis::new(15, 0.11, 0.4).unwrap()];
        let g = SpectralGrid::new(axes).unwrap();
        let x: Vec<f64> = (0..g.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let spec = dft_forward(&g, &x).unwrap();
        let back = dft_inverse(&g, &spec).unwrap();
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let err = x.iter().zip(&back).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        assert!(err / norm < 1e-12);

        let e_space: f64 = x.iter().map(|v| v * v).sum::<f64>() * 0.3 * 0.11;
        let dk: f64 = g.axes().iter().map(SpectralAxis::frequency_step).product();
        let e_freq: f64 = spec.iter().map(|c| c.norm_sqr()).sum::<f64>() * dk / (2.0 * PI).powi(2);
        assert!((e_space - e_freq).abs() / e_space < 1e-10);
    }

    #[test]
    fn size_mismatch_is_shape_error() {
        let g = grid1(8, 0.1, 0.0);
        assert!(matches!(dft_forward(&g, &[0.0; 7]), Err(Error::Shape(_))));
    }

    #[test]
    fn lattice_lookup() {
        let a = SpectralAxis::new(16, 0.5, 0.0).unwrap();
        let step = a.frequency_step();
        assert_eq!(a.bin_of(3.0 * step).unwrap(), 3);
        assert_eq!(a.bin_of(-2.0 * step).unwrap(), 14);
        assert_eq!(a.bin_of(8.0 * step).unwrap(), 8);
        assert!(matches!(a.bin_of(2.5 * step), Err(Error::Lattice { .. })));
        assert!(matches!(a.bin_of(9.0 * step), Err(Error::Lattice { .. })));
    }
}
