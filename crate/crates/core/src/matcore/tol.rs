use serde::{Deserialize, Serialize};

/// Relative tolerances used by the spectral invariants.
///
/// `pd_floor` is relative to the spectral norm of the matrix it guards; the
/// other values are relative to the matrix scale at the point of use.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub herm_tol: f64,
    pub psd_tol: f64,
    pub eig_tol: f64,
    pub pd_floor: f64,
    pub pinv_cut: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            herm_tol: 1e-10,
            psd_tol: 1e-10,
            eig_tol: 1e-10,
            pd_floor: 1e-10,
            pinv_cut: 1e-12,
        }
    }
}

/// `max(1, |values|...)`, the normalizer for scale-aware comparisons.
pub fn scale_of(values: &[f64]) -> f64 {
    values.iter().fold(1.0_f64, |acc, v| acc.max(v.abs()))
}
