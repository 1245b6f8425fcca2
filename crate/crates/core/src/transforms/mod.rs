//! Spectral primitives along the vertex-plane axes, plus the Hankel transform in y.

mod bessel;
mod dft;
mod filter;
mod hankel;

pub use bessel::bessel_j;
pub use dft::{dft_forward, dft_inverse, SpectralAxis, SpectralGrid};
pub use filter::{hilbert_1d, riesz_potential, spectral_derivative_1d, FilterConfig, Window};
pub(crate) use hankel::hankel_transform_complex;
pub use hankel::{hankel_sum, hankel_transform, BesselOrder};
