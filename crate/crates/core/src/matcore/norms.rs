use serde::{Deserialize, Serialize};

use super::matrix::ComplexMatrix;
use super::spectral::{eig_of_matrix, HermitianMatrix};
use crate::error::{Error, Result};

/// Schatten p-(quasi)norm `(tr[(X†X)^{p/2}])^{1/p}` from the singular values.
pub fn schatten(x: &ComplexMatrix, p: f64) -> Result<f64> {
    if !(p > 0.0) || !p.is_finite() {
        return Err(Error::Domain(format!("Schatten exponent must be positive and finite, got {p}")));
    }
    let sv = x.singular_values();
    let max = sv.iter().copied().fold(0.0, f64::max);
    if max == 0.0 {
        return Ok(0.0);
    }
    // factor out the largest singular value to keep σ^p in range
    let sum: f64 = sv.iter().map(|s| (s / max).powf(p)).sum();
    Ok(max * sum.powf(1.0 / p))
}

/// Result of a Löwner comparison `A ⪰ B`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LoewnerResult {
    pub holds: bool,
    /// Minimum eigenvalue of `A − B`.
    pub min_eig: f64,
}

/// `A ⪰ B` iff `λ_min(A − B) ≥ −tol·max(1, ‖A‖, ‖B‖)`.
pub fn loewner_geq(a: &HermitianMatrix, b: &HermitianMatrix, tol: f64) -> Result<LoewnerResult> {
    if a.dim() != b.dim() {
        return Err(Error::InvalidInput(format!(
            "Löwner comparison of {}x{} with {}x{}",
            a.dim(),
            a.dim(),
            b.dim(),
            b.dim()
        )));
    }
    let diff = a.matrix() - b.matrix();
    let min_eig = eig_of_matrix(&diff)?.min();
    let scale = 1.0_f64.max(a.matrix().op_norm()).max(b.matrix().op_norm());
    Ok(LoewnerResult { holds: min_eig >= -tol * scale, min_eig })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::Tolerances;

    #[test]
    fn schatten_examples() {
        let id = ComplexMatrix::identity(5);
        assert!((schatten(&id, 2.0).unwrap() - 5f64.sqrt()).abs() < 1e-14);
        let d = ComplexMatrix::from_real_diagonal(&[3.0, 4.0]);
        assert!((schatten(&d, 1.0).unwrap() - 7.0).abs() < 1e-13);
        assert!((schatten(&d, 2.0).unwrap() - 5.0).abs() < 1e-13);
        // quasi-norm: (√3 + √4)^2
        let q = (3f64.sqrt() + 2.0).powi(2);
        assert!((schatten(&d, 0.5).unwrap() - q).abs() < 1e-12);
        assert_eq!(schatten(&ComplexMatrix::zeros(2, 2), 0.5).unwrap(), 0.0);
        assert!(schatten(&d, 0.0).is_err());
        assert!(schatten(&d, -1.0).is_err());
    }

    #[test]
    fn loewner_examples() {
        let t = Tolerances::default();
        let two = HermitianMatrix::new(ComplexMatrix::identity(2).scale(2.0), &t).unwrap();
        let one = HermitianMatrix::identity(2);
        let r = loewner_geq(&two, &one, 1e-10).unwrap();
        assert!(r.holds && (r.min_eig - 1.0).abs() < 1e-14);
        let r = loewner_geq(&one, &one, 1e-10).unwrap();
        assert!(r.holds && r.min_eig.abs() < 1e-15);
        let a = HermitianMatrix::from_real_diagonal(&[0.0, 1.0]);
        let b = HermitianMatrix::from_real_diagonal(&[1.0, 0.0]);
        let r = loewner_geq(&a, &b, 1e-10).unwrap();
        assert!(!r.holds && (r.min_eig + 1.0).abs() < 1e-14);
        assert!(loewner_geq(&a, &HermitianMatrix::identity(3), 1e-10).is_err());
    }
}
