//! Numerical laboratory for the semiclassical Schrodinger flow with linear
//! potential on the half-line (the "quantum bouncing ball").

pub mod airy;
pub mod bump;
pub mod error;
pub mod expsums;
pub mod params;
pub mod quadrature;
pub mod reflection;
pub mod regression;
pub mod spectral;
pub mod strichartz;
pub mod summation;

pub use airy::{AiryBranchValue, AiryZeroTable, ZeroEntry};
pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use params::{NormParams, PhysParams};
