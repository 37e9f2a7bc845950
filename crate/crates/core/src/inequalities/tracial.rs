use serde::{Deserialize, Serialize};

use super::{as_pd, evaluate, image_pd, CheckOutcome, Evaluation, Instance, Requirements};
use crate::error::{Error, Result};
use crate::functionals::trace_product;
use crate::matcore::{eig_of_matrix, ComplexMatrix, PdMatrix};
use crate::supermap::SuperMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TracialMode {
    /// `tr[Φ†(K)† Φ†(Y)^{-1} Φ†(K)] ≤ tr[K† Y^{-1} K]`, Schwarz with `Φ†(1)` PD.
    A,
    /// Same inequality for a unital Schwarz map.
    Main,
    /// `tr[Φ†(B)† Φ†(B)] ≤ ‖Φ†(1)‖ tr[B† B]`.
    B,
}

impl TracialMode {
    pub fn check_id(self) -> &'static str {
        match self {
            TracialMode::A => "tracialA",
            TracialMode::Main => "tracial",
            TracialMode::B => "tracialB",
        }
    }
}

/// `b` is `K` (mode A) or `B`; `a` is `Y` (mode A) or `A` and is unused in
/// mode B. All live in `M_{d_out}`.
pub fn check_tracial(
    mode: TracialMode,
    map: &SuperMap,
    b: &ComplexMatrix,
    a: Option<&ComplexMatrix>,
    force: bool,
    tol: f64,
) -> Result<CheckOutcome> {
    let instance = Instance::Tracial { mode, map: map.clone(), b: b.clone(), a: a.cloned(), force };
    evaluate(mode.check_id(), &instance, tol)
}

fn inverse_quadratic(b: &ComplexMatrix, a: &PdMatrix) -> Result<f64> {
    trace_product(&b.adjoint(), &a.pow(-1.0).matmul(b), "tracial")
}

pub(super) fn eval(instance: &Instance) -> Result<Evaluation> {
    let Instance::Tracial { mode, map, b, a, force } = instance else {
        unreachable!("tracial::eval called with a non-tracial instance")
    };
    b.require_dim(map.d_out(), "tracial B")?;
    let req = match mode {
        TracialMode::A => Requirements { schwarz: true, adjoint_one_pd: true, ..Default::default() },
        TracialMode::Main => Requirements { schwarz: true, unital: true, ..Default::default() },
        TracialMode::B => Requirements { schwarz: true, ..Default::default() },
    };
    let exploratory = req.gate(map, *force, mode.check_id())?;
    let phi_b = map.apply_adjoint(b)?;
    let (lhs, rhs) = match mode {
        TracialMode::A | TracialMode::Main => {
            let a = a.as_ref().ok_or_else(|| Error::InvalidInput(format!("{} needs a PD argument", mode.check_id())))?;
            a.require_dim(map.d_out(), "tracial A")?;
            let a_pd = as_pd(a, "A")?;
            let pa = image_pd(&map.apply_adjoint(a)?)?;
            (inverse_quadratic(&phi_b, &pa)?, inverse_quadratic(b, &a_pd)?)
        }
        TracialMode::B => {
            let one = map.apply_adjoint(&ComplexMatrix::identity(map.d_out()))?;
            let norm = eig_of_matrix(&one)?.norm();
            let lhs = trace_product(&phi_b.adjoint(), &phi_b, "tracialB")?;
            (lhs, norm * trace_product(&b.adjoint(), b, "tracialB")?)
        }
    };
    Ok(Evaluation::new(lhs, rhs).exploratory(exploratory))
}
