//! Spherical mean Radon transform with centers on the unit sphere: forward
//! model, range-condition residuals and two reconstruction methods in
//! dimensions 2 and 3.

// Guards written as `!(x > 0.0)` reject NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod forward;
pub mod grid;
pub mod invert;
pub mod io;
pub mod phantom;
pub mod range;
pub mod selftest;
pub mod specfun;
pub mod transforms;

pub use error::{Error, Result};
pub use forward::{forward_transform, spherical_mean, BoundaryData};
pub use grid::{CenterGrid, UniformGrid};
pub use phantom::{eval_phantom, project_to_harmonics, Bump, HarmonicTerm, Phantom, PolarField};
pub use range::{harmonic_decompose, range_report, HarmonicSpectrum, RangeConfig, RangeReport};
