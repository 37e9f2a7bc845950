//! Dense complex matrices, Hermitian eigendecompositions, matrix functions,
//! Schatten quasi-norms and Löwner-order comparisons.

mod matrix;
mod norms;
mod spectral;
mod tol;

pub use matrix::{ComplexMatrix, C64, ONE, ZERO};
pub use norms::{loewner_geq, schatten, LoewnerResult};
pub use spectral::{
    herm_eig, mat_pow, min_eigenvalue, pinv, HermitianMatrix, PdMatrix, PsdMatrix, SpectralDecomposition,
};
pub use tol::{scale_of, Tolerances};

pub(crate) use spectral::eig_of_matrix;

/// `Re tr[X]` after checking that `|Im tr[X]| ≤ 1e-10·scale`.
pub(crate) fn real_trace(
    z: C64,
    scale: f64,
    context: &'static str,
) -> crate::error::Result<f64> {
    let bound = 1e-10 * scale.max(1.0);
    if z.im.abs() > bound {
        return Err(crate::error::Error::ImaginaryResidue { context, residue: z.im.abs(), bound });
    }
    Ok(z.re)
}
