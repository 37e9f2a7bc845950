//! Concavity and convexity corollaries obtained by applying a monotone
//! statement to the embedding `X ↦ diag(X, X)` with block-diagonal inputs.
//!
//! Since `Φ†(diag(A₁, A₂)) = A₁ + A₂`, the forward side splits into a sum of
//! block values and the adjoint side is the functional at `A₁ + A₂`, which
//! homogeneity turns into a multiple of the value at the midpoint.

use serde::{Deserialize, Serialize};

use super::{
    as_pd, as_psd, check_epstein_convex_monotone, image_psd, check_epstein_monotone, check_lieb_monotone, evaluate, CheckOutcome,
    Evaluation, Instance, LiebKind,
};
use crate::error::{Error, Result};
use crate::functionals::{epstein_general, lieb_concave_form, lieb_convex_form, neg_power_form};
use crate::matcore::ComplexMatrix;
use crate::supermap::embedding;

/// Tolerance for the block identities.
pub const REDUCTION_IDENTITY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "corollary", rename_all = "snake_case")]
pub enum ReductionKind {
    /// `A ↦ tr[(B† A^p B)^{1/p}]` concave.
    Epstein { p: f64 },
    /// `A ↦ tr[(B† A^s B)^{r/s}]` concave, `0 < s ≤ r ≤ 1`.
    Cor34 { s: f64, r: f64 },
    /// `(A, B) ↦ tr[(B† A^{-s} B)^q]` jointly convex.
    Ep7 { s: f64, q: f64 },
    /// `(A, B) ↦ tr[K† A^s K B^t]` jointly concave.
    LiebConcave { s: f64, t: f64 },
    /// `(X, Y, K) ↦ tr[K† Y^{-s} K X^{-t}]` jointly convex.
    LiebConvex { s: f64, t: f64 },
}

impl ReductionKind {
    pub fn name(&self) -> &'static str {
        match self {
            ReductionKind::Epstein { .. } => "epstein",
            ReductionKind::Cor34 { .. } => "cor34",
            ReductionKind::Ep7 { .. } => "ep7",
            ReductionKind::LiebConcave { .. } => "lieb_concave",
            ReductionKind::LiebConvex { .. } => "lieb_convex",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReductionPart {
    /// Largest normalized discrepancy of the block identities (against 0).
    Identity,
    /// The midpoint inequality rescaled from the monotone statement.
    Midpoint,
}

/// Block inputs, all `m × m`.
///
/// * `epstein`, `cor34`: `a1`, `a2` PD and `b1 = b2 = B`.
/// * `ep7`: `a1`, `a2` PD, `b1`, `b2` invertible.
/// * `lieb_concave`: `A` blocks `a1`, `a2`, `B` blocks `b1`, `b2`, `k1 = K`.
/// * `lieb_convex`: `X` blocks `a1`, `a2`, `Y` blocks `b1`, `b2`, `K` blocks `k1`, `k2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReductionInputs {
    pub a1: ComplexMatrix,
    pub a2: ComplexMatrix,
    pub b1: ComplexMatrix,
    pub b2: ComplexMatrix,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k1: Option<ComplexMatrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k2: Option<ComplexMatrix>,
}

/// Returns the block-identity outcome (at [`REDUCTION_IDENTITY_TOL`]) and the
/// derived midpoint outcome (at `tol`).
pub fn embedding_reduction(
    corollary: ReductionKind,
    inputs: &ReductionInputs,
    tol: f64,
) -> Result<(CheckOutcome, CheckOutcome)> {
    let id = format!("reduction:{}", corollary.name());
    let identity = evaluate(
        &id,
        &Instance::Reduction { corollary, inputs: inputs.clone(), part: ReductionPart::Identity },
        REDUCTION_IDENTITY_TOL,
    )?;
    let midpoint = evaluate(
        &format!("{id}:midpoint"),
        &Instance::Reduction { corollary, inputs: inputs.clone(), part: ReductionPart::Midpoint },
        tol,
    )?;
    Ok((identity, midpoint))
}

fn rel(x: f64, y: f64) -> f64 {
    (x - y).abs() / 1.0_f64.max(x.abs()).max(y.abs())
}

fn need<'a>(k: &'a Option<ComplexMatrix>, name: &str) -> Result<&'a ComplexMatrix> {
    k.as_ref().ok_or_else(|| Error::InvalidInput(format!("reduction needs {name}")))
}

struct Pieces {
    /// Forward side through the embedding and the sum of block values.
    forward: (f64, f64),
    /// Adjoint side through the embedding and `2^power` times the midpoint value.
    adjoint: (f64, f64),
    /// Monotone outcome rescaled to the midpoint inequality.
    mono_lhs: f64,
    mono_rhs: f64,
    scale: f64,
}

fn pieces(corollary: &ReductionKind, inp: &ReductionInputs) -> Result<Pieces> {
    let m = inp.a1.require_square("reduction")?;
    for x in [&inp.a2, &inp.b1, &inp.b2] {
        x.require_dim(m, "reduction block")?;
    }
    let phi = embedding(m);
    let diag = |x: &ComplexMatrix, y: &ComplexMatrix| ComplexMatrix::block_diag(&[x, y]);
    let mid = |x: &ComplexMatrix, y: &ComplexMatrix| (x + y).scale(0.5);
    let tol = 1e-8;
    match *corollary {
        ReductionKind::Epstein { p: s } | ReductionKind::Cor34 { s, .. } => {
            let r = match *corollary {
                ReductionKind::Cor34 { r, .. } => r,
                _ => 1.0,
            };
            if !inp.b1.approx_eq(&inp.b2, 0.0) {
                return Err(Error::InvalidInput("epstein reduction: b1 and b2 must coincide".into()));
            }
            let b = &inp.b1;
            let a = diag(&inp.a1, &inp.a2);
            let g = |x: &ComplexMatrix, y: &ComplexMatrix| epstein_general(&as_psd(x, "A")?, y, s, r);
            let forward = (g(&a, &phi.apply(b)?)?, g(&inp.a1, b)? + g(&inp.a2, b)?);
            let adj = image_psd(&phi.apply_adjoint(&a)?)?;
            let adjoint = (epstein_general(&adj, b, s, r)?, 2f64.powf(r) * g(&mid(&inp.a1, &inp.a2), b)?);
            let mono = check_epstein_monotone(&phi, &a, b, s, r, false, tol)?;
            Ok(Pieces { forward, adjoint, mono_lhs: mono.lhs, mono_rhs: mono.rhs, scale: 0.5 })
        }
        ReductionKind::Ep7 { s, q } => {
            let a = diag(&inp.a1, &inp.a2);
            let b = diag(&inp.b1, &inp.b2);
            let h = |x: &ComplexMatrix, y: &ComplexMatrix| neg_power_form(&as_pd(x, "A")?, y, s, q);
            let forward = (h(&a, &b)?, h(&inp.a1, &inp.b1)? + h(&inp.a2, &inp.b2)?);
            let power = (2.0 - s) * q;
            let adjoint = (
                h(&phi.apply_adjoint(&a)?, &phi.apply_adjoint(&b)?)?,
                2f64.powf(power) * h(&mid(&inp.a1, &inp.a2), &mid(&inp.b1, &inp.b2))?,
            );
            let mono = check_epstein_convex_monotone(&phi, &a, &b, s, q, false, tol)?;
            Ok(Pieces { forward, adjoint, mono_lhs: mono.lhs, mono_rhs: mono.rhs, scale: 0.5f64.powf(power) })
        }
        ReductionKind::LiebConcave { s, t } => {
            let k = need(&inp.k1, "k1")?;
            k.require_dim(m, "reduction K")?;
            let (a, b) = (diag(&inp.a1, &inp.a2), diag(&inp.b1, &inp.b2));
            let f = |k: &ComplexMatrix, x: &ComplexMatrix, y: &ComplexMatrix| {
                lieb_concave_form(k, &as_psd(x, "A")?, &as_psd(y, "B")?, s, t)
            };
            let forward = (f(&phi.apply(k)?, &a, &b)?, f(k, &inp.a1, &inp.b1)? + f(k, &inp.a2, &inp.b2)?);
            let adjoint = (
                f(k, &phi.apply_adjoint(&a)?, &phi.apply_adjoint(&b)?)?,
                2f64.powf(s + t) * f(k, &mid(&inp.a1, &inp.a2), &mid(&inp.b1, &inp.b2))?,
            );
            let mono = check_lieb_monotone(LiebKind::Concave, &phi, k, &a, &b, s, t, false, tol)?;
            Ok(Pieces { forward, adjoint, mono_lhs: mono.lhs, mono_rhs: mono.rhs, scale: 0.5 })
        }
        ReductionKind::LiebConvex { s, t } => {
            let (k1, k2) = (need(&inp.k1, "k1")?, need(&inp.k2, "k2")?);
            k1.require_dim(m, "reduction K")?;
            k2.require_dim(m, "reduction K")?;
            let (x, y, k) = (diag(&inp.a1, &inp.a2), diag(&inp.b1, &inp.b2), diag(k1, k2));
            let g = |k: &ComplexMatrix, x: &ComplexMatrix, y: &ComplexMatrix| {
                lieb_convex_form(k, &as_pd(x, "X")?, &as_pd(y, "Y")?, s, t)
            };
            let power = 2.0 - s - t;
            let forward = (g(&k, &x, &y)?, g(k1, &inp.a1, &inp.b1)? + g(k2, &inp.a2, &inp.b2)?);
            let adjoint = (
                g(&phi.apply_adjoint(&k)?, &phi.apply_adjoint(&x)?, &phi.apply_adjoint(&y)?)?,
                2f64.powf(power) * g(&mid(k1, k2), &mid(&inp.a1, &inp.a2), &mid(&inp.b1, &inp.b2))?,
            );
            let mono = check_lieb_monotone(LiebKind::Convex, &phi, &k, &x, &y, s, t, false, tol)?;
            Ok(Pieces { forward, adjoint, mono_lhs: mono.lhs, mono_rhs: mono.rhs, scale: 0.5f64.powf(power) })
        }
    }
}

pub(super) fn eval(instance: &Instance) -> Result<Evaluation> {
    let Instance::Reduction { corollary, inputs, part } = instance else {
        unreachable!("reduction::eval called with a non-reduction instance")
    };
    let p = pieces(corollary, inputs)?;
    Ok(match part {
        ReductionPart::Identity => {
            Evaluation::new(rel(p.forward.0, p.forward.1).max(rel(p.adjoint.0, p.adjoint.1)), 0.0)
        }
        ReductionPart::Midpoint => Evaluation::new(p.scale * p.mono_lhs, p.scale * p.mono_rhs),
    })
}
