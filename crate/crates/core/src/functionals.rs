//! Trace functionals. All are pure evaluations returning real numbers; an
//! imaginary residue above `1e-10·scale` is reported as an error.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::{mat_pow, real_trace, ComplexMatrix, PdMatrix, PsdMatrix, Tolerances, C64};

/// Slack allowed on closed parameter bounds such as `s + t ≤ 1`.
const PARAM_SLACK: f64 = 1e-12;

/// `Re tr[A B]` with the residue bounded by `‖A‖_F ‖B‖_F`.
pub(crate) fn trace_product(a: &ComplexMatrix, b: &ComplexMatrix, context: &'static str) -> Result<f64> {
    if a.cols() != b.rows() || a.rows() != b.cols() {
        return Err(Error::DimensionMismatch {
            context,
            expected: format!("{}x{}", a.cols(), a.rows()),
            got: format!("{}x{}", b.rows(), b.cols()),
        });
    }
    let mut z = C64::new(0.0, 0.0);
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            z += a.get(i, j) * b.get(j, i);
        }
    }
    real_trace(z, a.frobenius_norm() * b.frobenius_norm(), context)
}

/// `tr[C^q]` for a matrix that should be PSD up to rounding.
pub(crate) fn psd_trace_pow(c: &ComplexMatrix, q: f64, context: &'static str) -> Result<f64> {
    let asym = c.hermitian_asymmetry();
    let bound = 1e-10 * c.max_abs().max(1.0);
    if asym > bound {
        return Err(Error::ImaginaryResidue { context, residue: asym, bound });
    }
    Ok(PsdMatrix::from_symmetrized(c, &Tolerances::default())?.trace_pow(q))
}

fn require_square_compatible(k: &ComplexMatrix, left: usize, right: usize, context: &'static str) -> Result<()> {
    if k.rows() != left || k.cols() != right {
        return Err(Error::DimensionMismatch {
            context,
            expected: format!("{left}x{right}"),
            got: format!("{}x{}", k.rows(), k.cols()),
        });
    }
    Ok(())
}

fn lieb_params(s: f64, t: f64, context: &str) -> Result<()> {
    if !(s >= 0.0 && t >= 0.0 && s + t <= 1.0 + PARAM_SLACK) {
        return Err(Error::Domain(format!("{context}: need s, t ≥ 0 and s + t ≤ 1, got s = {s}, t = {t}")));
    }
    Ok(())
}

/// `Re tr[K† A^s K B^t]` with `K` of shape `dim A × dim B`.
pub fn lieb_concave_form(k: &ComplexMatrix, a: &PsdMatrix, b: &PsdMatrix, s: f64, t: f64) -> Result<f64> {
    lieb_params(s, t, "lieb_concave_form")?;
    require_square_compatible(k, a.dim(), b.dim(), "lieb_concave_form")?;
    let tol = Tolerances::default();
    let as_ = mat_pow(a, s, &tol)?;
    let bt = mat_pow(b, t, &tol)?;
    let left = k.adjoint().matmul(as_.matrix());
    let right = k.matmul(bt.matrix());
    trace_product(&left, &right, "lieb_concave_form")
}

/// `Re tr[K† Y^{-s} K X^{-t}]` with `K` of shape `dim Y × dim X`.
pub fn lieb_convex_form(k: &ComplexMatrix, x: &PdMatrix, y: &PdMatrix, s: f64, t: f64) -> Result<f64> {
    lieb_params(s, t, "lieb_convex_form")?;
    require_square_compatible(k, y.dim(), x.dim(), "lieb_convex_form")?;
    let left = k.adjoint().matmul(&y.pow(-s));
    let right = k.matmul(&x.pow(-t));
    trace_product(&left, &right, "lieb_convex_form")
}

fn require_density(x: &PdMatrix, name: &str) -> Result<()> {
    let tr = x.trace();
    if (tr - 1.0).abs() > 1e-8 {
        return Err(Error::Domain(format!("{name} must have unit trace, got {tr}")));
    }
    Ok(())
}

/// Umegaki relative entropy `tr[X(log X − log Y)]`, natural logarithm.
pub fn umegaki(x: &PdMatrix, y: &PdMatrix) -> Result<f64> {
    require_density(x, "X")?;
    require_density(y, "Y")?;
    x.matrix().require_dim(y.dim(), "umegaki")?;
    let xlogx: f64 = x.spectrum().eigenvalues.iter().map(|l| l * l.ln()).sum();
    let xlogy = trace_product(x.matrix(), &y.log(), "umegaki")?;
    Ok(xlogx - xlogy)
}

/// `(1 − tr[Y^{1−t} X^t]) / (1 − t)`, which tends to `umegaki(X, Y)` as `t ↑ 1`.
pub fn renyi_limit_quotient(x: &PdMatrix, y: &PdMatrix, t: f64) -> Result<f64> {
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::Domain(format!("renyi_limit_quotient needs 0 < t < 1, got {t}")));
    }
    require_density(x, "X")?;
    require_density(y, "Y")?;
    x.matrix().require_dim(y.dim(), "renyi_limit_quotient")?;
    let tr = trace_product(&y.pow(1.0 - t), &x.pow(t), "renyi_limit_quotient")?;
    Ok((1.0 - tr) / (1.0 - t))
}

/// `tr[(B† A^p B)^{1/p}]`, `0 < p ≤ 1`.
pub fn epstein(a: &PsdMatrix, b: &ComplexMatrix, p: f64) -> Result<f64> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::Domain(format!("epstein needs 0 < p ≤ 1, got {p}")));
    }
    epstein_like(a, b, p, 1.0 / p, "epstein")
}

/// `tr[(B† A^s B)^{r/s}]`, `0 < s ≤ 1`, `0 < r ≤ 1`.
pub fn epstein_general(a: &PsdMatrix, b: &ComplexMatrix, s: f64, r: f64) -> Result<f64> {
    if !(s > 0.0 && s <= 1.0 && r > 0.0 && r <= 1.0) {
        return Err(Error::Domain(format!("epstein_general needs 0 < s, r ≤ 1, got s = {s}, r = {r}")));
    }
    epstein_like(a, b, s, r / s, "epstein_general")
}

fn epstein_like(a: &PsdMatrix, b: &ComplexMatrix, p: f64, q: f64, context: &'static str) -> Result<f64> {
    if b.rows() != a.dim() {
        return Err(Error::DimensionMismatch { context, expected: format!("{} rows", a.dim()), got: format!("{}", b.rows()) });
    }
    let ap = mat_pow(a, p, &Tolerances::default())?;
    let c = b.adjoint().matmul(ap.matrix()).matmul(b);
    psd_trace_pow(&c, q, context)
}

/// `tr[(B† A^{-s} B)^q]`, `0 ≤ s < 1`, `0 < q < 1`.
///
/// `B` may be singular here; the invertibility hypotheses of the convex
/// monotonicity theorems are enforced by the checks on their original-side
/// arguments.
pub fn neg_power_form(a: &PdMatrix, b: &ComplexMatrix, s: f64, q: f64) -> Result<f64> {
    if !(s >= 0.0 && s < 1.0 && q > 0.0 && q < 1.0) {
        return Err(Error::Domain(format!("neg_power_form needs 0 ≤ s < 1 and 0 < q < 1, got s = {s}, q = {q}")));
    }
    if b.rows() != a.dim() {
        return Err(Error::DimensionMismatch {
            context: "neg_power_form",
            expected: format!("{} rows", a.dim()),
            got: format!("{}", b.rows()),
        });
    }
    let c = b.adjoint().matmul(&a.pow(-s)).matmul(b);
    psd_trace_pow(&c, q, "neg_power_form")
}

/// `tr[(σ^γ ρ σ^γ)^α]` with `γ = (1−α)/(2α)`, `α > 1`.
pub fn sandwiched_trace(rho: &PsdMatrix, sigma: &PdMatrix, alpha: f64) -> Result<f64> {
    if !(alpha > 1.0) || !alpha.is_finite() {
        return Err(Error::Domain(format!("sandwiched_trace needs α > 1, got {alpha}")));
    }
    rho.matrix().require_dim(sigma.dim(), "sandwiched_trace")?;
    let g = sigma.pow((1.0 - alpha) / (2.0 * alpha));
    let c = g.matmul(rho.matrix()).matmul(&g);
    psd_trace_pow(&c, alpha, "sandwiched_trace")
}

/// `tr[(B† A^p B)^{r/p}]`, `1 < p ≤ 2`, `r ≥ 1`.
pub fn ando_form(a: &PdMatrix, b: &ComplexMatrix, p: f64, r: f64) -> Result<f64> {
    if !(p > 1.0 && p <= 2.0 && r >= 1.0 && r.is_finite()) {
        return Err(Error::Domain(format!("ando_form needs 1 < p ≤ 2 and r ≥ 1, got p = {p}, r = {r}")));
    }
    if b.rows() != a.dim() {
        return Err(Error::DimensionMismatch { context: "ando_form", expected: format!("{} rows", a.dim()), got: format!("{}", b.rows()) });
    }
    let c = b.adjoint().matmul(&a.pow(p)).matmul(b);
    psd_trace_pow(&c, r / p, "ando_form")
}

/// Registered functionals with their parameters.
///
/// Argument roles for [`FunctionalId::evaluate`]: `(a, b, k)` is
/// `(A, B, K)` for `LiebConcave`, `(X, Y, K)` for `LiebConvex`,
/// `(X, Y, -)` for the entropies, `(A, B, -)` for the Epstein-type forms and
/// `(ρ, σ, -)` for `Sandwiched`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "id", rename_all = "snake_case")]
pub enum FunctionalId {
    LiebConcave { s: f64, t: f64 },
    LiebConvex { s: f64, t: f64 },
    Umegaki,
    RenyiLimit { t: f64 },
    Epstein { p: f64 },
    EpsteinGeneral { s: f64, r: f64 },
    NegPower { s: f64, q: f64 },
    Sandwiched { alpha: f64 },
    Ando { p: f64, r: f64 },
}

impl FunctionalId {
    pub fn name(&self) -> &'static str {
        match self {
            FunctionalId::LiebConcave { .. } => "lieb_concave",
            FunctionalId::LiebConvex { .. } => "lieb_convex",
            FunctionalId::Umegaki => "umegaki",
            FunctionalId::RenyiLimit { .. } => "renyi_limit",
            FunctionalId::Epstein { .. } => "epstein",
            FunctionalId::EpsteinGeneral { .. } => "epstein_general",
            FunctionalId::NegPower { .. } => "neg_power",
            FunctionalId::Sandwiched { .. } => "sandwiched",
            FunctionalId::Ando { .. } => "ando",
        }
    }

    /// Whether `k` is an argument of the functional.
    pub fn uses_k(&self) -> bool {
        matches!(self, FunctionalId::LiebConcave { .. } | FunctionalId::LiebConvex { .. })
    }

    pub fn evaluate(&self, a: &ComplexMatrix, b: &ComplexMatrix, k: Option<&ComplexMatrix>) -> Result<f64> {
        let tol = Tolerances::default();
        let need_k = || k.ok_or_else(|| Error::InvalidInput(format!("{} needs K", self.name())));
        match *self {
            FunctionalId::LiebConcave { s, t } => lieb_concave_form(
                need_k()?,
                &PsdMatrix::from_matrix(a, &tol)?,
                &PsdMatrix::from_matrix(b, &tol)?,
                s,
                t,
            ),
            FunctionalId::LiebConvex { s, t } => {
                lieb_convex_form(need_k()?, &PdMatrix::from_matrix(a, &tol)?, &PdMatrix::from_matrix(b, &tol)?, s, t)
            }
            FunctionalId::Umegaki => umegaki(&PdMatrix::from_matrix(a, &tol)?, &PdMatrix::from_matrix(b, &tol)?),
            FunctionalId::RenyiLimit { t } => {
                renyi_limit_quotient(&PdMatrix::from_matrix(a, &tol)?, &PdMatrix::from_matrix(b, &tol)?, t)
            }
            FunctionalId::Epstein { p } => epstein(&PsdMatrix::from_matrix(a, &tol)?, b, p),
            FunctionalId::EpsteinGeneral { s, r } => epstein_general(&PsdMatrix::from_matrix(a, &tol)?, b, s, r),
            FunctionalId::NegPower { s, q } => neg_power_form(&PdMatrix::from_matrix(a, &tol)?, b, s, q),
            FunctionalId::Sandwiched { alpha } => {
                sandwiched_trace(&PsdMatrix::from_matrix(a, &tol)?, &PdMatrix::from_matrix(b, &tol)?, alpha)
            }
            FunctionalId::Ando { p, r } => ando_form(&PdMatrix::from_matrix(a, &tol)?, b, p, r),
        }
    }
}
