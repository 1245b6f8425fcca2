//! Conical Radon transform: forward projection over one-sided cones with
//! vertices on a hyperplane, filtered back-projection in two
//! parametrizations, and a Fourier–Hankel reconstruction route.

pub mod error;
pub mod forward;
pub mod fourier_slice;
pub mod grid;
pub mod io;
pub mod phantom;
pub mod reconstruct;
pub mod transforms;

pub use error::{Error, Result};
pub use grid::{Axis, ConeSinogram, ConeSinogramGrid, Dim, Point, SphereQuadrature, VolumeField, VolumeGrid};
