//! Exact action spectra, barcodes, bottleneck distances and boundary-depth
//! certificates for radially symmetric piecewise-linear Hamiltonians on
//! monotone symplectic manifolds.
//!
//! Values and slopes are stored divided by 2π, so every action formula is a
//! rational expression. Radii are plain rationals.

pub mod barcodes;
pub mod embedding;
pub mod error;
pub mod homotopy;
pub mod params;
pub mod profile;
pub mod scalar;
pub mod spectrum;
pub mod tracker;

pub use error::{Error, Result};
pub use params::ManifoldParams;
pub use profile::{linear_combine, make_profile, oscillation, sup_distance, PLProfile};
pub use scalar::{ExtendedScalar, Quantity, Scalar};
