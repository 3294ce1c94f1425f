//! Lax pairs, Hamiltonians, coordinates and time maps of the twisted gl₂
//! isomonodromic system (the Painlevé 1 hierarchy), with numerical checks of
//! the closed-form identities.

pub mod algebra;
pub mod cli;
pub mod coeffs;
pub mod error;
pub mod lax;
pub mod ham;
pub mod flow;
pub mod symfun;
pub mod times;

pub use error::{P1Error, Result};

pub use num_complex::Complex64;

/// Complex scalar used by every public entry point.
pub type Scalar = Complex64;
/// Dual number carrying one derivative slot.
pub type DualScalar = algebra::Dual;
pub type CPoly = algebra::Poly<Scalar>;
pub type CMat2 = algebra::Mat2<CPoly>;
