//! Variational formulas for trace powers with closed-form optimizers.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::ensembles::{gen_gaussian, gen_pd, gen_psd};
use crate::error::{Error, Result};
use crate::functionals::{epstein, psd_trace_pow, trace_product};
use crate::matcore::{schatten, ComplexMatrix, PdMatrix, PsdMatrix, Tolerances};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariationalReport {
    pub target: f64,
    pub optimizer: ComplexMatrix,
    pub value_at_optimizer: f64,
    /// Smallest normalized margin over the feasible samples; negative means
    /// a sample landed on the wrong side of the target.
    pub worst_margin: f64,
    pub samples: usize,
}

impl VariationalReport {
    /// `|target − value_at_optimizer| / max(1, |target|)`.
    pub fn attainment_error(&self) -> f64 {
        (self.target - self.value_at_optimizer).abs() / self.target.abs().max(1.0)
    }
}

fn holder_exponent(r: f64) -> Result<f64> {
    if r == 0.0 || r == 1.0 || !r.is_finite() {
        return Err(Error::Domain(format!("Hölder exponent must differ from 0 and 1, got {r}")));
    }
    Ok(r / (r - 1.0))
}

/// `Y = (tr X^r)^{(1−r)/r} X^{r−1}`: `tr[Y^{r/(r−1)}] = 1` and
/// `tr[XY] = (tr X^r)^{1/r}`.
pub fn holder_optimizer(x: &PdMatrix, r: f64) -> Result<PsdMatrix> {
    holder_exponent(r)?;
    let tr = x.trace_pow(r);
    let y = x.pow(r - 1.0).scale(tr.powf((1.0 - r) / r));
    PsdMatrix::from_symmetrized(&y, &Tolerances::default())
}

/// Rescales a PD sample so that `tr[Y^q] = 1`.
fn normalize_feasible(y0: &PdMatrix, q: f64) -> Result<PdMatrix> {
    let c = y0.trace_pow(q).powf(-1.0 / q);
    PdMatrix::from_symmetrized(&y0.matrix().scale(c), &Tolerances::default())
}

/// Samples feasible `Y` for `(tr X^r)^{1/r} = max/min tr[XY]` and checks
/// every sample against the target.
///
/// `r > 1` is the maximum over PSD `Y` with `tr[Y^{r/(r−1)}] = 1`; `0 < r < 1`
/// and `r < 0` are the minimum over PD `Y`. Half of the samples are PSD
/// perturbations of the optimizer.
pub fn verify_extremal(x: &PdMatrix, r: f64, rng: &mut impl Rng, trials: usize) -> Result<VariationalReport> {
    let q = holder_exponent(r)?;
    if trials == 0 {
        return Err(Error::InvalidInput("verify_extremal needs at least one sample".into()));
    }
    let n = x.dim();
    let target = x.trace_pow(r).powf(1.0 / r);
    let opt = holder_optimizer(x, r)?;
    let value_at_optimizer = trace_product(x.matrix(), opt.matrix(), "verify_extremal")?;
    let is_max = r > 1.0;
    let mut worst = f64::INFINITY;
    for i in 0..trials {
        let y0 = if i % 2 == 0 {
            gen_pd(n, rng, 1e-3)?
        } else {
            let eps: f64 = 10f64.powf(rng.random_range(-4.0..-1.0));
            let g = gen_psd(n, n, rng);
            let m = opt.matrix() + &g.matrix().scale(eps * opt.norm().max(1e-12) / g.norm().max(1e-300));
            PdMatrix::from_symmetrized(&(&m + &ComplexMatrix::identity(n).scale(1e-12 * opt.norm())), &Tolerances::default())?
        };
        let y = normalize_feasible(&y0, q)?;
        let val = trace_product(x.matrix(), y.matrix(), "verify_extremal")?;
        let margin = if is_max { target - val } else { val - target } / target.abs().max(val.abs()).max(1.0);
        worst = worst.min(margin);
    }
    Ok(VariationalReport { target, optimizer: opt.matrix().clone(), value_at_optimizer, worst_margin: worst, samples: trials })
}

/// `tr[XY] − (tr X^r)^{1/r} (tr Y^{r/(r−1)})^{(r−1)/r}` for `0 < r < 1` or `r < 0`;
/// nonnegative by the reverse Hölder inequality.
pub fn verify_reverse_holder(x: &PdMatrix, y: &PdMatrix, r: f64) -> Result<f64> {
    if !(r < 1.0) || r == 0.0 || !r.is_finite() {
        return Err(Error::Domain(format!("reverse Hölder needs 0 < r < 1 or r < 0, got {r}")));
    }
    let q = r / (r - 1.0);
    let xy = trace_product(x.matrix(), y.matrix(), "verify_reverse_holder")?;
    let bound = x.trace_pow(r).powf(1.0 / r) * y.trace_pow(q).powf(1.0 / q);
    Ok(xy - bound)
}

fn dual2_domain(p: f64) -> Result<()> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!("dual formula needs 0 < p < 1, got {p}")));
    }
    Ok(())
}

/// `(1/p) tr[B†HB] − ((1−p)/p) tr[(A^{-p/2} H A^{-p/2})^{1/(1−p)}]`.
pub fn dual2_value(a: &PdMatrix, b: &ComplexMatrix, p: f64, h: &PsdMatrix) -> Result<f64> {
    dual2_domain(p)?;
    if b.rows() != a.dim() || h.dim() != a.dim() {
        return Err(Error::DimensionMismatch {
            context: "dual2_value",
            expected: format!("B with {0} rows and H of size {0}", a.dim()),
            got: format!("B with {} rows, H of size {}", b.rows(), h.dim()),
        });
    }
    let lin = trace_product(&b.adjoint(), &h.matrix().matmul(b), "dual2_value")?;
    let g = a.pow(-p / 2.0);
    let inner = g.matmul(h.matrix()).matmul(&g);
    let pen = psd_trace_pow(&inner, 1.0 / (1.0 - p), "dual2_value")?;
    Ok(lin / p - (1.0 - p) / p * pen)
}

/// `H* = A^{p/2} (A^{p/2} B B† A^{p/2})^{(1−p)/p} A^{p/2}`, the maximizer of
/// [`dual2_value`], whose value there is `epstein(A, B, p)`.
pub fn dual2_optimizer(a: &PdMatrix, b: &ComplexMatrix, p: f64) -> Result<PsdMatrix> {
    dual2_domain(p)?;
    if b.rows() != a.dim() {
        return Err(Error::DimensionMismatch {
            context: "dual2_optimizer",
            expected: format!("{} rows", a.dim()),
            got: format!("{}", b.rows()),
        });
    }
    let tol = Tolerances::default();
    let half = a.pow(p / 2.0);
    let c = PsdMatrix::from_symmetrized(&half.matmul(b).matmul(&b.adjoint()).matmul(&half), &tol)?;
    let w = c.pow((1.0 - p) / p, &tol)?;
    PsdMatrix::from_symmetrized(&half.matmul(w.matrix()).matmul(&half), &tol)
}

/// `epstein(A, B, p)` evaluated for the dual formula's target.
pub fn dual2_target(a: &PdMatrix, b: &ComplexMatrix, p: f64) -> Result<f64> {
    epstein(a.psd(), b, p)
}

/// Random PSD competitor for [`dual2_value`], scaled to the optimizer's size
/// by a log-uniform factor in `[0.1, 10]`.
pub fn sample_dual2_competitor(h_star: &PsdMatrix, rng: &mut impl Rng) -> PsdMatrix {
    let n = h_star.dim();
    let rank = rng.random_range(1..=n);
    let g = gen_psd(n, rank, rng);
    let factor = 10f64.powf(rng.random_range(-1.0..1.0)) * h_star.norm().max(1e-12) / g.norm().max(1e-300);
    PsdMatrix::from_symmetrized(&g.matrix().scale(factor), &Tolerances::default()).expect("scaled PSD")
}

/// `‖X‖_{p1} ‖Y‖_{p2} − ‖XY‖_{p0}` normalized by `max(1, both sides)`, for
/// `1/p0 = 1/p1 + 1/p2`.
pub fn generalized_holder_margin(x: &ComplexMatrix, y: &ComplexMatrix, p1: f64, p2: f64) -> Result<f64> {
    if !(p1 > 0.0 && p2 > 0.0) {
        return Err(Error::Domain(format!("Hölder exponents must be positive, got {p1}, {p2}")));
    }
    let p0 = 1.0 / (1.0 / p1 + 1.0 / p2);
    let lhs = schatten(&x.matmul(y), p0)?;
    let rhs = schatten(x, p1)? * schatten(y, p2)?;
    Ok((rhs - lhs) / lhs.max(rhs).max(1.0))
}

/// Draws a Gaussian pair for the generalized Hölder bound.
pub fn sample_holder_pair(n: usize, rng: &mut impl Rng) -> (ComplexMatrix, ComplexMatrix) {
    (gen_gaussian(n, n, rng), gen_gaussian(n, n, rng))
}
