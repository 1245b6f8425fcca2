//! Fourier slice identity and the Fourier–Hankel reconstruction route.
//!
//! Transforming `y^{nu - p} f` in the vertex-plane directions and applying the
//! Hankel transform of order `nu = (d - 3)/2` in y gives, on the surface
//! `lambda = |k| tan(theta)`, a rescaled u-spectrum of the cone data:
//!
//! ```text
//! H_nu F[y^{nu-p} f](k, |k| tan theta)
//!     = (2 pi)^{(1-d)/2} cos(theta)^{1-p} tan(theta)^{-(d-1)/2} |k|^nu F[R^(p) f](k, theta)
//! ```

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{check_p, Axis, ConeSinogram, ConeSinogramGrid, Dim, VolumeField, VolumeGrid};
use crate::reconstruct::ReconstructionConfig;
use crate::transforms::{hankel_sum, hankel_transform_complex};
use crate::transforms::{BesselOrder, SpectralAxis, SpectralGrid};

/// Guard added to `|lhs|` in relative errors.
pub const RELATIVE_ERROR_GUARD: f64 = 1e-300;

/// Frequency / angle pairs at which the identity is evaluated.
#[derive(Debug, Clone, PartialEq)]
pub struct SliceSampleSet {
    samples: Vec<(Vec<f64>, f64)>,
}

impl SliceSampleSet {
    pub fn new(samples: Vec<(Vec<f64>, f64)>) -> Result<Self> {
        for (k, theta) in &samples {
            if k.iter().all(|v| *v == 0.0) {
                return Err(Error::invalid("k", "slice samples need a nonzero frequency"));
            }
            if !(*theta > 0.0 && *theta < 0.5 * PI) {
                return Err(Error::Domain(format!("theta = {theta} is outside (0, pi/2)")));
            }
        }
        Ok(SliceSampleSet { samples })
    }

    /// `count` random pairs with `k` on both the field and the sinogram
    /// lattices, `0 < |k| <= k_fraction * k_nyquist`, and theta drawn
    /// uniformly from the open sinogram angle range.
    pub fn random(
        field: &VolumeGrid,
        sinogram: &ConeSinogramGrid,
        count: usize,
        k_fraction: f64,
        seed: u64,
    ) -> Result<Self> {
        if field.dim() != sinogram.dim() {
            return Err(Error::Shape("field and sinogram dimensions differ".into()));
        }
        let f_axes = field_spectral_axes(field)?;
        let s_axes = sinogram_spectral_axes(sinogram)?;
        let nyquist = f_axes.iter().chain(&s_axes).map(SpectralAxis::nyquist).fold(f64::INFINITY, f64::min);
        let k_max = k_fraction * nyquist;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let theta = sinogram.theta();
        let mut samples = Vec::with_capacity(count);
        let mut attempts = 0usize;
        while samples.len() < count {
            attempts += 1;
            if attempts > 1000 * count.max(1) {
                return Err(Error::invalid(
                    "samples",
                    format!("could not draw {count} frequencies shared by the field and sinogram lattices below |k| = {k_max}"),
                ));
            }
            let k: Vec<f64> = f_axes
                .iter()
                .map(|a| {
                    let steps = (k_max / a.frequency_step()).floor() as i64;
                    rng.gen_range(-steps..=steps) as f64 * a.frequency_step()
                })
                .collect();
            let norm = k.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm == 0.0 || norm > k_max {
                continue;
            }
            if k.iter().zip(&s_axes).any(|(&v, a)| a.bin_of(v).is_err()) {
                continue;
            }
            let t: f64 = rng.gen_range(theta.min..theta.max);
            if t <= theta.min {
                continue;
            }
            samples.push((k, t));
        }
        Ok(SliceSampleSet { samples })
    }

    /// Moves every angle to the nearest interior node of `theta`, so that the
    /// right-hand side reads measured columns without interpolating.
    pub fn snap_theta(&self, theta: &Axis) -> Result<Self> {
        if theta.n < 3 {
            return Err(Error::invalid("theta", "snapping needs at least one interior node"));
        }
        let samples = self
            .samples
            .iter()
            .map(|(k, t)| (k.clone(), theta.coord(theta.nearest(*t).clamp(1, theta.n - 2))))
            .collect();
        SliceSampleSet::new(samples)
    }

    pub fn samples(&self) -> &[(Vec<f64>, f64)] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

fn field_spectral_axes(grid: &VolumeGrid) -> Result<Vec<SpectralAxis>> {
    grid.x_axes().iter().map(|a| SpectralAxis::new(a.n, a.spacing(), a.min)).collect()
}

fn sinogram_spectral_axes(grid: &ConeSinogramGrid) -> Result<Vec<SpectralAxis>> {
    grid.u_axes().iter().map(|a| SpectralAxis::new(a.n, a.spacing(), a.min)).collect()
}

fn check_k(k: &[f64], axes: &[SpectralAxis]) -> Result<()> {
    if k.len() != axes.len() {
        return Err(Error::Shape(format!("frequency has {} components, expected {}", k.len(), axes.len())));
    }
    for (&v, a) in k.iter().zip(axes) {
        a.bin_of(v)?;
    }
    Ok(())
}

/// `du e^{-i k u}` at every node of `axis`.
fn phase_row(axis: &Axis, k: f64) -> Vec<Complex64> {
    let h = axis.spacing();
    axis.coords().iter().map(|&u| Complex64::from_polar(h, -k * u)).collect()
}

fn norm(k: &[f64]) -> f64 {
    k.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Left side: Fourier transform in x, Hankel transform in y of `y^{nu - p} f`.
pub fn slice_lhs(f: &VolumeField, k: &[f64], theta: f64, p: f64) -> Result<Complex64> {
    let grid = f.grid();
    let axes = field_spectral_axes(grid)?;
    check_k(k, &axes)?;
    let order = BesselOrder::for_dim(grid.dim());
    let exponent = order.value() - p;
    let y_axis = *grid.y_axis();
    let ny = y_axis.n;
    let [n0, n1] = grid.x_counts();
    let e0 = phase_row(&grid.x_axes()[0], k[0]);
    let e1 = if grid.dim() == Dim::Three { phase_row(&grid.x_axes()[1], k[1]) } else { vec![Complex64::new(1.0, 0.0)] };
    let values = f.values();
    let mut spectrum = vec![Complex64::new(0.0, 0.0); ny];
    for (a, &p0) in e0.iter().enumerate().take(n0) {
        for (b, &p1) in e1.iter().enumerate().take(n1) {
            let phase = p0 * p1;
            let base = (a * n1 + b) * ny;
            for (iy, s) in spectrum.iter_mut().enumerate() {
                let v = values[base + iy];
                if v != 0.0 {
                    *s += phase * v;
                }
            }
        }
    }
    if exponent != 0.0 {
        for (iy, s) in spectrum.iter_mut().enumerate() {
            *s *= y_axis.coord(iy).powf(exponent);
        }
    }
    let lambda = norm(k) * theta.tan();
    Ok(hankel_transform_complex(order, &y_axis, &spectrum, &[lambda])?[0])
}

/// Scale factor carrying the sinogram spectrum onto the slice surface.
fn rhs_prefactor(dim: Dim, p: f64, k_norm: f64, theta: f64) -> f64 {
    let d = dim.get() as f64;
    (2.0 * PI).powf(0.5 * (1.0 - d))
        * theta.cos().powf(1.0 - p)
        * theta.tan().powf(-0.5 * (d - 1.0))
        * k_norm.powf(0.5 * (d - 3.0))
}

/// u-spectrum of one theta column at frequency `k`.
fn column_spectrum(g: &ConeSinogram, e0: &[Complex64], e1: &[Complex64], t: usize) -> Complex64 {
    let nt = g.grid().theta().n;
    let n1 = e1.len();
    let values = g.values();
    let mut acc = Complex64::new(0.0, 0.0);
    for (a, pa) in e0.iter().enumerate() {
        for (b, pb) in e1.iter().enumerate() {
            let v = values[(a * n1 + b) * nt + t];
            if v != 0.0 {
                acc += pa * pb * v;
            }
        }
    }
    acc
}

/// Right side: rescaled u-spectrum of the cone data, linear in theta between nodes.
pub fn slice_rhs(g: &ConeSinogram, k: &[f64], theta: f64) -> Result<Complex64> {
    let grid = g.grid();
    let axes = sinogram_spectral_axes(grid)?;
    check_k(k, &axes)?;
    let Some((t, w)) = grid.theta().stencil(theta) else {
        return Err(Error::Domain(format!(
            "theta = {theta} is outside the sinogram range [{}, {}]",
            grid.theta().min,
            grid.theta().max
        )));
    };
    let e0 = phase_row(&grid.u_axes()[0], k[0]);
    let e1 = if grid.dim() == Dim::Three { phase_row(&grid.u_axes()[1], k[1]) } else { vec![Complex64::new(1.0, 0.0)] };
    let lo = column_spectrum(g, &e0, &e1, t);
    let hi = if w > 0.0 { column_spectrum(g, &e0, &e1, t + 1) } else { Complex64::new(0.0, 0.0) };
    let spectrum = lo * (1.0 - w) + hi * w;
    Ok(spectrum * rhs_prefactor(grid.dim(), g.p(), norm(k), theta))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SliceRow {
    pub k: Vec<f64>,
    pub theta: f64,
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub rel_err: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SliceReport {
    pub rows: Vec<SliceRow>,
    pub max: f64,
    pub median: f64,
}

impl SliceReport {
    /// Plain-text table with columns `k theta |lhs| |rhs| rel_err`.
    pub fn to_table(&self) -> String {
        let mut out = String::from("# k theta |lhs| |rhs| rel_err\n");
        for r in &self.rows {
            let k: Vec<String> = r.k.iter().map(|v| format!("{v:.6}")).collect();
            let _ = writeln!(
                out,
                "{} {:.6} {:.9e} {:.9e} {:.3e}",
                k.join(","),
                r.theta,
                r.lhs.norm(),
                r.rhs.norm(),
                r.rel_err
            );
        }
        let _ = writeln!(out, "# max_rel_err = {:.3e}", self.max);
        let _ = writeln!(out, "# median_rel_err = {:.3e}", self.median);
        out
    }
}

/// Evaluates both sides at every sample.
pub fn check_slice_identity(
    f: &VolumeField,
    g: &ConeSinogram,
    samples: &SliceSampleSet,
    p: f64,
) -> Result<SliceReport> {
    check_p(p, g.p())?;
    if f.grid().dim() != g.grid().dim() {
        return Err(Error::Shape("field and sinogram dimensions differ".into()));
    }
    let rows = samples
        .samples()
        .par_iter()
        .map(|(k, theta)| {
            let lhs = slice_lhs(f, k, *theta, p)?;
            let rhs = slice_rhs(g, k, *theta)?;
            let diff = (lhs - rhs).norm();
            let rel_err = if diff == 0.0 { 0.0 } else { diff / (lhs.norm() + RELATIVE_ERROR_GUARD) };
            Ok(SliceRow { k: k.clone(), theta: *theta, lhs, rhs, rel_err })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut errs: Vec<f64> = rows.iter().map(|r| r.rel_err).collect();
    errs.sort_by(f64::total_cmp);
    let max = errs.last().copied().unwrap_or(0.0);
    let median = match errs.len() {
        0 => 0.0,
        n if n % 2 == 1 => errs[n / 2],
        n => 0.5 * (errs[n / 2 - 1] + errs[n / 2]),
    };
    Ok(SliceReport { rows, max, median })
}

/// Number of uniform lambda nodes on `[0, lambda_max]`: twice the y count,
/// raised if needed so that `d_lambda * y_max <= pi`, which keeps the aliased
/// copies of the inverse Hankel quadrature out of the grid.
fn lambda_count(ny: usize, lambda_max: f64, y_max: f64) -> usize {
    let needed = (lambda_max * y_max / PI).ceil() as usize;
    (2 * ny).max(needed)
}

/// Reconstruction through the u-spectrum of the data and an inverse
/// Fourier–Hankel transform.
///
/// Frequencies come from the sinogram's u-lattice. Columns with
/// `|k| > band_fraction * k_nyquist`, the Nyquist bins and the `k = 0` column
/// are left empty.
pub fn reconstruct_fourier_hankel(
    g: &ConeSinogram,
    grid: &VolumeGrid,
    config: &ReconstructionConfig,
) -> Result<VolumeField> {
    config.validate(grid.dim())?;
    let dim = grid.dim();
    let sgrid = g.grid();
    if sgrid.dim() != dim {
        return Err(Error::Shape("sinogram and volume grid dimensions differ".into()));
    }
    if grid.y_axis().min <= 0.0 {
        return Err(Error::Domain("the Fourier–Hankel route needs y_min > 0".into()));
    }
    let p = g.p();
    let order = BesselOrder::for_dim(dim);
    let exponent = order.value() - p;
    let theta = *sgrid.theta();
    let nt = theta.n;

    // (i) u-spectrum of every theta column on the sinogram lattice.
    let axes = sinogram_spectral_axes(sgrid)?;
    let spectral = SpectralGrid::new(axes.clone())?;
    let kn = spectral.nyquist();
    let k_cut = config.filter.band_fraction * kn;
    let columns: Vec<Vec<Complex64>> = (0..nt)
        .into_par_iter()
        .map(|t| {
            let mut data: Vec<Complex64> = g.theta_slice(t).into_iter().map(|v| Complex64::new(v, 0.0)).collect();
            spectral.forward_in_place(&mut data)?;
            Ok(data)
        })
        .collect::<Result<_>>()?;

    // Bins that carry data.
    let bins: Vec<(usize, Vec<f64>)> = (0..spectral.len())
        .filter_map(|offset| {
            let idx = spectral.unravel(offset);
            if idx.iter().zip(&axes).any(|(&j, a)| a.is_nyquist_bin(j)) {
                return None;
            }
            let k = spectral.frequency(&idx);
            let kk = norm(&k);
            (kk > 0.0 && kk <= k_cut).then_some((offset, k))
        })
        .collect();

    let y_axis = *grid.y_axis();
    let y_nodes = y_axis.coords();
    let lambda_max = k_cut * theta.max.tan();
    // Midpoint nodes: the order -1/2 integrand is nonzero at lambda = 0, where
    // a closed rule would need the unmeasured theta = 0 column.
    let n_lambda = lambda_count(y_axis.n, lambda_max, y_axis.max);
    let d_lambda = lambda_max / n_lambda as f64;
    let lambdas: Vec<f64> = (0..n_lambda).map(|j| (j as f64 + 0.5) * d_lambda).collect();
    let lambda_weights = vec![d_lambda; n_lambda];

    // (ii)-(iii) per column: resample onto the lambda grid, inverse Hankel in y.
    let profiles: Vec<Vec<Complex64>> = bins
        .par_iter()
        .map(|(offset, k)| {
            let kk = norm(k);
            let samples: Vec<Complex64> = lambdas
                .iter()
                .map(|&lambda| {
                    let th = (lambda / kk).atan();
                    match theta.stencil(th) {
                        Some((t, w)) => {
                            let lo = columns[t][*offset];
                            let hi = if w > 0.0 { columns[t + 1][*offset] } else { Complex64::new(0.0, 0.0) };
                            (lo * (1.0 - w) + hi * w) * rhs_prefactor(dim, p, kk, th)
                        }
                        _ => Complex64::new(0.0, 0.0),
                    }
                })
                .collect();
            hankel_sum(order, &lambdas, &lambda_weights, &samples, &y_nodes)
        })
        .collect::<Result<_>>()?;

    // (iv) inverse Fourier sum at the grid's x nodes; (v) undo the y weight.
    let periods: Vec<f64> = axes.iter().map(|a| a.n as f64 * a.spacing).collect();
    let inv_area: f64 = periods.iter().map(|t| 1.0 / t).product();
    let [n0, n1] = grid.x_counts();
    let x0 = grid.x_axes()[0].coords();
    let x1 = if dim == Dim::Three { grid.x_axes()[1].coords() } else { vec![0.0] };
    let ny = y_axis.n;
    let weights: Vec<f64> = y_nodes.iter().map(|y| y.powf(-exponent)).collect();
    let values: Vec<f64> = (0..n0 * n1)
        .into_par_iter()
        .flat_map_iter(|xi| {
            let (a, b) = (xi / n1, xi % n1);
            let mut acc = vec![0.0; ny];
            for ((_, k), profile) in bins.iter().zip(&profiles) {
                let kx = k[0] * x0[a] + k.get(1).map_or(0.0, |k1| k1 * x1[b]);
                let phase = Complex64::from_polar(1.0, kx);
                for (s, v) in acc.iter_mut().zip(profile) {
                    *s += (phase * v).re;
                }
            }
            acc.into_iter().zip(weights.clone()).map(move |(s, w)| s * inv_area * w)
        })
        .collect();
    VolumeField::new(grid.clone(), values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forward::{forward_project, RayQuadratureConfig};
    use crate::grid::{Point, SphereQuadrature};
    use crate::phantom::{rasterize, Bump, PhantomSpec};

    fn pair(p: f64) -> (VolumeField, ConeSinogram) {
        let f = PhantomSpec::new(Dim::Two, vec![Bump::mollifier(Point::new2(0.0, 2.0), 1.0, 1.0)]).unwrap();
        let vg = VolumeGrid::new(Dim::Two, vec![Axis::new(-1.5, 1.5, 64).unwrap()], Axis::new(0.9, 3.1, 128).unwrap())
            .unwrap();
        let h = 3.0 / 63.0;
        // Sinogram period is four times the field period, so field frequencies sit on its lattice.
        let sg = ConeSinogramGrid::new(
            Dim::Two,
            vec![Axis::new(-127.0 * h, 127.0 * h, 128).unwrap()],
            Axis::new(0.05, 0.4, 60).unwrap(),
        )
        .unwrap();
        let sphere = SphereQuadrature::new(Dim::Two, 1).unwrap();
        let ray = RayQuadratureConfig::for_phantom(&f, 1000).unwrap();
        (rasterize(&f, &vg).unwrap(), forward_project(&f, &sg, p, &sphere, &ray).unwrap())
    }

    #[test]
    fn zero_inputs_give_zero_errors() {
        let (f, g) = pair(0.0);
        let zf = VolumeField::zeros(f.grid().clone());
        let zg = ConeSinogram::zeros(g.grid().clone(), 0.0);
        let set = SliceSampleSet::random(f.grid(), g.grid(), 10, 0.5, 1).unwrap();
        let report = check_slice_identity(&zf, &zg, &set, 0.0).unwrap();
        assert!(report.rows.iter().all(|r| r.rel_err == 0.0 && r.lhs.norm() == 0.0));
    }

    #[test]
    fn both_sides_agree_on_the_reference_phantom() {
        let (f, g) = pair(0.0);
        let set = SliceSampleSet::random(f.grid(), g.grid(), 20, 0.3, 11).unwrap();
        let report = check_slice_identity(&f, &g, &set, 0.0).unwrap();
        assert!(report.median < 2e-2, "{}", report.to_table());
    }

    #[test]
    fn off_lattice_and_out_of_range_are_errors() {
        let (f, g) = pair(0.0);
        let step = 2.0 * PI / (64.0 * 3.0 / 63.0);
        assert!(matches!(slice_lhs(&f, &[0.5 * step], 0.2, 0.0), Err(Error::Lattice { .. })));
        assert!(matches!(slice_rhs(&g, &[step], 0.5), Err(Error::Domain(_))));
        assert!(matches!(
            check_slice_identity(&f, &g, &SliceSampleSet::new(vec![]).unwrap(), 1.0),
            Err(Error::Weight { .. })
        ));
        assert!(SliceSampleSet::new(vec![(vec![0.0], 0.2)]).is_err());
    }

    #[test]
    fn prefactor_in_two_dimensions() {
        let (k, th) = (2.5f64, 0.7f64);
        let expect = (2.0 * PI).powf(-0.5) * th.cos() * th.tan().powf(-0.5) * k.powf(-0.5);
        assert!((rhs_prefactor(Dim::Two, 0.0, k, th) - expect).abs() < 1e-15);
    }

    #[test]
    fn zero_sinogram_reconstructs_to_zero() {
        let (f, g) = pair(0.0);
        let zg = ConeSinogram::zeros(g.grid().clone(), 0.0);
        let cfg = ReconstructionConfig::default();
        let out = reconstruct_fourier_hankel(&zg, f.grid(), &cfg).unwrap();
        assert!(out.values().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn snapping_lands_on_interior_theta_nodes() {
        let (f, g) = pair(0.0);
        let theta = *g.grid().theta();
        let set = SliceSampleSet::random(f.grid(), g.grid(), 30, 0.5, 5).unwrap().snap_theta(&theta).unwrap();
        for (_, t) in set.samples() {
            let i = theta.nearest(*t);
            assert!(i >= 1 && i + 2 <= theta.n);
            assert!((theta.coord(i) - t).abs() < 1e-15);
        }
    }

    #[test]
    fn table_has_one_line_per_sample() {
        let (f, g) = pair(0.0);
        let set = SliceSampleSet::random(f.grid(), g.grid(), 5, 0.5, 3).unwrap();
        let report = check_slice_identity(&f, &g, &set, 0.0).unwrap();
        assert_eq!(report.to_table().lines().filter(|l| !l.starts_with('#')).count(), 5);
    }
}
