use super::{
    as_pd, evaluate, image_pd, image_psd, require_invertible, CheckOutcome, Evaluation, Instance, Requirements,
    PARAM_SLACK,
};
use crate::error::{Error, Result};
use crate::functionals::{epstein_general, neg_power_form};
use crate::matcore::ComplexMatrix;
use crate::supermap::SuperMap;

fn concave_params(s: f64, r: f64) -> Result<bool> {
    if !(s > 0.0 && s <= r + PARAM_SLACK && r <= 1.0 + PARAM_SLACK) {
        return Err(Error::Domain(format!("need 0 < s ≤ r ≤ 1, got s = {s}, r = {r}")));
    }
    Ok((r - 1.0).abs() > PARAM_SLACK)
}

fn convex_params(s: f64, q: f64) -> Result<bool> {
    if !(s >= 0.0 && s < 1.0) {
        return Err(Error::Domain(format!("need 0 ≤ s < 1, got s = {s}")));
    }
    let q0 = 1.0 / (2.0 - s);
    if !(q >= q0 - PARAM_SLACK && q < 1.0) {
        return Err(Error::Precondition(format!("need 1/(2−s) ≤ q < 1, got s = {s}, q = {q} (lower bound {q0})")));
    }
    Ok((q - q0).abs() > PARAM_SLACK)
}

/// `tr[(Φ(B)† A^s Φ(B))^{r/s}] ≤ c^{1−r} tr[(B† Φ†(A)^s B)^{r/s}]` with
/// `A ∈ M_{d_out}` PD and `B ∈ M_{d_in}`. Reported as `Ep1` when `r = 1`.
#[allow(clippy::too_many_arguments)]
pub fn check_epstein_monotone(
    map: &SuperMap,
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    s: f64,
    r: f64,
    force: bool,
    tol: f64,
) -> Result<CheckOutcome> {
    let id = if concave_params(s, r)? { "Ep2" } else { "Ep1" };
    evaluate(id, &Instance::Epstein { map: map.clone(), a: a.clone(), b: b.clone(), s, r, force }, tol)
}

/// `tr[(Φ†(B)† Φ†(A)^{-s} Φ†(B))^q] ≤ c^{(2−s)q−1} tr[(B† A^{-s} B)^q]` with
/// `A` PD and `B` invertible in `M_{d_out}`. Reported as `Ep3A` when
/// `q = 1/(2−s)`.
#[allow(clippy::too_many_arguments)]
pub fn check_epstein_convex_monotone(
    map: &SuperMap,
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    s: f64,
    q: f64,
    force: bool,
    tol: f64,
) -> Result<CheckOutcome> {
    let id = if convex_params(s, q)? { "Ep3" } else { "Ep3A" };
    evaluate(id, &Instance::EpsteinConvex { map: map.clone(), a: a.clone(), b: b.clone(), s, q, force }, tol)
}

pub(super) fn eval(instance: &Instance) -> Result<Evaluation> {
    match instance {
        Instance::Epstein { map, a, b, s, r, force } => {
            let bounded = concave_params(*s, *r)?;
            let req = Requirements { schwarz: true, unital: true, semiunital: bounded, ..Default::default() };
            let exploratory = req.gate(map, *force, "epstein monotonicity")?;
            a.require_dim(map.d_out(), "epstein A")?;
            b.require_dim(map.d_in(), "epstein B")?;
            let a_pd = as_pd(a, "A")?;
            let lhs = epstein_general(a_pd.psd(), &map.apply(b)?, *s, *r)?;
            let pa = image_psd(&map.apply_adjoint(a)?)?;
            let rhs = map.d_ratio().powf(1.0 - r) * epstein_general(&pa, b, *s, *r)?;
            Ok(Evaluation::new(lhs, rhs).exploratory(exploratory))
        }
        Instance::EpsteinConvex { map, a, b, s, q, force } => {
            let bounded = convex_params(*s, *q)?;
            let req = Requirements { schwarz: true, unital: true, semiunital: bounded, ..Default::default() };
            let exploratory = req.gate(map, *force, "convex epstein monotonicity")?;
            a.require_dim(map.d_out(), "convex epstein A")?;
            b.require_dim(map.d_out(), "convex epstein B")?;
            let a_pd = as_pd(a, "A")?;
            require_invertible(b, "B")?;
            let pa = image_pd(&map.apply_adjoint(a)?)?;
            let lhs = neg_power_form(&pa, &map.apply_adjoint(b)?, *s, *q)?;
            let factor = map.d_ratio().powf((2.0 - s) * q - 1.0);
            let rhs = factor * neg_power_form(&a_pd, b, *s, *q)?;
            Ok(Evaluation::new(lhs, rhs).exploratory(exploratory))
        }
        _ => unreachable!("epstein::eval called with a non-epstein instance"),
    }
}
