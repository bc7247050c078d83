//! Formal power series engine for ambient metrics of conformal structures.
//!
//! The crate computes ambient metrics in normal form as exact truncated
//! series (including the logarithmic extension in even dimension), extracts
//! the obstruction tensor and evaluates scalar conformal invariants built
//! from the ambient curvature.

pub mod error;
pub mod scalar;
pub mod series;

pub use error::{Error, Result};
pub use scalar::{Real, Scalar, Q};
pub use series::{JetSpace, LogSeries, MultiJet};
pub mod ambient;
pub mod expr;
pub mod invariants;
pub mod linalg;
pub mod levi_civita;
pub mod riemann;
pub mod suite;
pub mod tensor;
