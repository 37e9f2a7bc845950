//! Positive-map classes, trace functionals and monotonicity inequalities.

pub mod duality;
pub mod ensembles;
pub mod error;
pub mod functionals;
pub mod inequalities;
pub mod matcore;
pub mod posclass;
pub mod suite;
pub mod supermap;

pub use error::{Error, Result};
