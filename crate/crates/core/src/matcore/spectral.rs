//! Hermitian eigendecompositions and the Hermitian / PSD / PD wrappers.
//!
//! Every matrix function routes through [`SpectralDecomposition`]. The PSD
//! and PD wrappers keep the decomposition computed while validating them, so
//! powers, logarithms and inverses cost a single `U f(Λ) U†` product.

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::matrix::{ComplexMatrix, C64};
use super::tol::Tolerances;
use crate::error::{Error, Result};

/// Square matrix equal to its adjoint within `herm_tol`. Stored symmetrized.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix(ComplexMatrix);

impl HermitianMatrix {
    pub fn new(m: ComplexMatrix, tol: &Tolerances) -> Result<Self> {
        m.require_square("HermitianMatrix::new")?;
        if !m.is_finite() {
            return Err(Error::InvalidInput("non-finite entry".into()));
        }
        let bound = tol.herm_tol * m.max_abs().max(1.0);
        let asym = m.hermitian_asymmetry();
        if asym > bound {
            return Err(Error::NotHermitian { asymmetry: asym, bound });
        }
        Ok(Self(m.hermitian_part()))
    }

    /// Takes `(M + M†)/2` without checking how far `M` was from Hermitian.
    pub fn symmetrize(m: &ComplexMatrix) -> Self {
        Self(m.hermitian_part())
    }

    pub fn identity(n: usize) -> Self {
        Self(ComplexMatrix::identity(n))
    }

    pub fn from_real_diagonal(d: &[f64]) -> Self {
        Self(ComplexMatrix::from_real_diagonal(d))
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    pub fn eig(&self) -> Result<SpectralDecomposition> {
        herm_eig(self)
    }
}

impl Serialize for HermitianMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

impl<'de> Deserialize<'de> for HermitianMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let m = ComplexMatrix::deserialize(d)?;
        HermitianMatrix::new(m, &Tolerances::default()).map_err(serde::de::Error::custom)
    }
}

/// Eigenvalues in ascending order with the unitary of eigenvectors (columns).
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max(&self) -> f64 {
        *self.eigenvalues.last().expect("nonempty spectrum")
    }

    /// Spectral norm `max |λ|`.
    pub fn norm(&self) -> f64 {
        self.min().abs().max(self.max().abs())
    }

    /// `U diag(f(λ)) U†` for a real function.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        self.apply_complex(|x| C64::new(f(x), 0.0))
    }

    /// `U diag(f(λ)) U†` for a complex-valued function.
    pub fn apply_complex(&self, f: impl Fn(f64) -> C64) -> ComplexMatrix {
        let u = &self.eigenvectors;
        let n = self.dim();
        let vals: Vec<C64> = self.eigenvalues.iter().map(|&x| f(x)).collect();
        let scaled = ComplexMatrix::from_fn(n, n, |i, j| u.get(i, j) * vals[j]);
        scaled.matmul(&u.adjoint())
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.apply(|x| x)
    }

    /// Eigenvector for the `k`-th smallest eigenvalue.
    pub fn eigenvector(&self, k: usize) -> Vec<C64> {
        (0..self.dim()).map(|i| self.eigenvectors.get(i, k)).collect()
    }

    /// Returns `(‖UΛU† − H‖_F / max(1, ‖H‖_F), ‖U†U − 1‖_F)`.
    pub fn residuals(&self, h: &ComplexMatrix) -> (f64, f64) {
        let recon = (&self.reconstruct() - h).frobenius_norm() / h.frobenius_norm().max(1.0);
        let unit = (&self.eigenvectors.adjoint().matmul(&self.eigenvectors)
            - &ComplexMatrix::identity(self.dim()))
            .frobenius_norm();
        (recon, unit)
    }
}

/// Eigendecomposition of `(H + H†)/2` with ascending eigenvalues.
pub fn herm_eig(h: &HermitianMatrix) -> Result<SpectralDecomposition> {
    eig_of_matrix(h.matrix())
}

pub(crate) fn eig_of_matrix(m: &ComplexMatrix) -> Result<SpectralDecomposition> {
    m.require_square("herm_eig")?;
    if !m.is_finite() {
        return Err(Error::InvalidInput("non-finite entry in eigendecomposition input".into()));
    }
    let sym = m.hermitian_part().into_nalgebra();
    let n = sym.nrows();
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok(SpectralDecomposition { eigenvalues, eigenvectors })
}

/// Minimum eigenvalue of the Hermitian part of `m`.
pub fn min_eigenvalue(m: &ComplexMatrix) -> Result<f64> {
    Ok(eig_of_matrix(m)?.min())
}

/// Positive semidefinite matrix: `λ_min ≥ −psd_tol·‖A‖`.
#[derive(Clone, Debug, PartialEq)]
pub struct PsdMatrix {
    herm: HermitianMatrix,
    spec: SpectralDecomposition,
}

impl PsdMatrix {
    pub fn new(h: HermitianMatrix, tol: &Tolerances) -> Result<Self> {
        let spec = herm_eig(&h)?;
        let bound = -tol.psd_tol * spec.norm();
        if spec.min() < bound {
            return Err(Error::NotPsd { min_eig: spec.min(), bound });
        }
        Ok(Self { herm: h, spec })
    }

    /// Validates Hermiticity and positivity of a raw matrix.
    pub fn from_matrix(m: &ComplexMatrix, tol: &Tolerances) -> Result<Self> {
        Self::new(HermitianMatrix::new(m.clone(), tol)?, tol)
    }

    /// For matrices that are PSD by construction up to rounding: symmetrizes,
    /// then checks positivity.
    pub fn from_symmetrized(m: &ComplexMatrix, tol: &Tolerances) -> Result<Self> {
        Self::new(HermitianMatrix::symmetrize(m), tol)
    }

    pub fn identity(n: usize) -> Self {
        Self::new(HermitianMatrix::identity(n), &Tolerances::default()).expect("identity is PSD")
    }

    pub fn dim(&self) -> usize {
        self.herm.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        self.herm.matrix()
    }

    pub fn hermitian(&self) -> &HermitianMatrix {
        &self.herm
    }

    pub fn spectrum(&self) -> &SpectralDecomposition {
        &self.spec
    }

    pub fn min_eig(&self) -> f64 {
        self.spec.min()
    }

    pub fn norm(&self) -> f64 {
        self.spec.norm()
    }

    pub fn trace(&self) -> f64 {
        self.spec.eigenvalues.iter().sum()
    }

    /// Eigenvalues clamped at zero.
    pub fn clamped_eigenvalues(&self) -> impl Iterator<Item = f64> + '_ {
        self.spec.eigenvalues.iter().map(|&x| x.max(0.0))
    }

    /// `tr[A^p]` for `p > 0`, with the same kernel cut as [`mat_pow`].
    pub fn trace_pow(&self, p: f64) -> f64 {
        let cut = Tolerances::default().pinv_cut * self.norm();
        self.spec.eigenvalues.iter().filter(|&&x| x > cut).map(|x| x.powf(p)).sum()
    }

    pub fn pow(&self, p: f64, tol: &Tolerances) -> Result<HermitianMatrix> {
        mat_pow(self, p, tol)
    }

    /// Promotes to a PD matrix with the given floor.
    pub fn into_pd(self, floor: f64) -> Result<PdMatrix> {
        PdMatrix::new(self, floor)
    }

    /// Promotes to PD using the default relative floor `pd_floor·‖A‖`.
    pub fn into_pd_default(self, tol: &Tolerances) -> Result<PdMatrix> {
        let floor = default_floor(self.norm(), tol);
        PdMatrix::new(self, floor)
    }
}

fn default_floor(norm: f64, tol: &Tolerances) -> f64 {
    (tol.pd_floor * norm).max(f64::MIN_POSITIVE)
}

impl Serialize for PsdMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.matrix().serialize(s)
    }
}

impl<'de> Deserialize<'de> for PsdMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let m = ComplexMatrix::deserialize(d)?;
        PsdMatrix::from_matrix(&m, &Tolerances::default()).map_err(serde::de::Error::custom)
    }
}

/// Positive definite matrix with an explicit eigenvalue floor.
#[derive(Clone, Debug, PartialEq)]
pub struct PdMatrix {
    psd: PsdMatrix,
    floor: f64,
}

impl PdMatrix {
    pub fn new(psd: PsdMatrix, floor: f64) -> Result<Self> {
        if !(floor > 0.0) || !floor.is_finite() {
            return Err(Error::InvalidInput(format!("pd_floor must be positive, got {floor}")));
        }
        if psd.min_eig() < floor {
            return Err(Error::SingularMatrix { min_eig: psd.min_eig(), floor });
        }
        Ok(Self { psd, floor })
    }

    pub fn from_matrix(m: &ComplexMatrix, tol: &Tolerances) -> Result<Self> {
        PsdMatrix::from_matrix(m, tol)?.into_pd_default(tol)
    }

    /// Symmetrizes, then checks positive definiteness with the default floor.
    pub fn from_symmetrized(m: &ComplexMatrix, tol: &Tolerances) -> Result<Self> {
        PsdMatrix::from_symmetrized(m, tol)?.into_pd_default(tol)
    }

    pub fn identity(n: usize) -> Self {
        Self::new(PsdMatrix::identity(n), 1e-10).expect("identity is PD")
    }

    pub fn floor(&self) -> f64 {
        self.floor
    }

    pub fn psd(&self) -> &PsdMatrix {
        &self.psd
    }

    pub fn dim(&self) -> usize {
        self.psd.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        self.psd.matrix()
    }

    pub fn spectrum(&self) -> &SpectralDecomposition {
        self.psd.spectrum()
    }

    pub fn trace(&self) -> f64 {
        self.psd.trace()
    }

    /// `A^p` for any real `p`; `A^0` is the identity.
    pub fn pow(&self, p: f64) -> ComplexMatrix {
        if p == 0.0 {
            return ComplexMatrix::identity(self.dim());
        }
        self.spectrum().apply(|x| x.powf(p))
    }

    /// `A^z = U diag(exp(z·ln λ)) U†` for complex `z`.
    pub fn pow_complex(&self, z: Complex64) -> ComplexMatrix {
        self.spectrum().apply_complex(|x| (z * x.ln()).exp())
    }

    pub fn log(&self) -> ComplexMatrix {
        self.spectrum().apply(f64::ln)
    }

    pub fn inverse(&self) -> ComplexMatrix {
        self.pow(-1.0)
    }

    /// `tr[A^p]` for any real `p`.
    pub fn trace_pow(&self, p: f64) -> f64 {
        self.spectrum().eigenvalues.iter().map(|x| x.powf(p)).sum()
    }
}

impl Serialize for PdMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.matrix().serialize(s)
    }
}

impl<'de> Deserialize<'de> for PdMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let m = ComplexMatrix::deserialize(d)?;
        PdMatrix::from_matrix(&m, &Tolerances::default()).map_err(serde::de::Error::custom)
    }
}

/// `A^p` through the spectral decomposition.
///
/// For `p > 0` eigenvalues at or below `pinv_cut·‖A‖` map to zero. For `p ≤ 0` every
/// eigenvalue must clear `pd_floor·‖A‖`; `A^0` is then the identity.
pub fn mat_pow(a: &PsdMatrix, p: f64, tol: &Tolerances) -> Result<HermitianMatrix> {
    if !p.is_finite() {
        return Err(Error::Domain(format!("non-finite exponent {p}")));
    }
    if p > 0.0 {
        // roundoff-level eigenvalues count as kernel, as in `pinv`
        let cut = tol.pinv_cut * a.norm();
        let m = a.spectrum().apply(|x| if x > cut { x.powf(p) } else { 0.0 });
        return Ok(HermitianMatrix::symmetrize(&m));
    }
    let floor = default_floor(a.norm(), tol);
    if a.min_eig() < floor {
        return Err(Error::SingularMatrix { min_eig: a.min_eig(), floor });
    }
    if p == 0.0 {
        return Ok(HermitianMatrix::identity(a.dim()));
    }
    Ok(HermitianMatrix::symmetrize(&a.spectrum().apply(|x| x.powf(p))))
}

/// Moore–Penrose inverse: eigenvalues below `pinv_cut·‖A‖` map to zero.
pub fn pinv(a: &PsdMatrix, tol: &Tolerances) -> PsdMatrix {
    let cut = tol.pinv_cut * a.norm();
    let m = a.spectrum().apply(|x| if x > cut { 1.0 / x } else { 0.0 });
    PsdMatrix::from_symmetrized(&m, tol).expect("pseudo-inverse of a PSD matrix is PSD")
}
