//! Boundary values of the analytic interpolants behind the Lieb-type
//! monotonicity statements.
//!
//! Kind `f`: with `M = Φ†(A)^{p/2} K Φ†(B)^{(1−p)/2}`,
//! `f(z) = tr[Φ(Φ†(B)^{(z−1)/2} M† Φ†(A)^{−z/2}) A^z Φ(Φ†(A)^{−z/2} M Φ†(B)^{(z−1)/2}) B^{1−z}]`
//! and `f(p)` is the left side of the concave statement at `(s, t) = (p, 1−p)`.
//!
//! Kind `g`: with `M = Y^{(t−1)/2} K X^{−t/2}`,
//! `g(z) = tr[Φ†(X^{z/2} M† Y^{(1−z)/2}) Φ†(Y)^{z−1} Φ†(Y^{(1−z)/2} M X^{z/2}) Φ†(X)^{−z}]`
//! and `g(t)` is the left side of the convex statement at `(s, t) = (1−t, t)`.
//!
//! On `Re z ∈ {0, 1}` both are bounded by `tr[M† M]`.

use serde::{Deserialize, Serialize};

use super::{as_pd, evaluate, image_pd, CheckOutcome, Evaluation, Instance, Requirements};
use crate::error::{Error, Result};
use crate::matcore::{ComplexMatrix, PdMatrix, C64};
use crate::supermap::SuperMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryKind {
    F,
    G,
}

impl BoundaryKind {
    pub fn check_id(self) -> &'static str {
        match self {
            BoundaryKind::F => "boundary_f",
            BoundaryKind::G => "boundary_g",
        }
    }
}

fn cpow(p: &PdMatrix, z: C64) -> ComplexMatrix {
    p.pow_complex(z)
}

/// Value of the interpolant at `z` and the bound `tr[M† M]`.
///
/// Kind `F`: `K ∈ M_{d_in}`, `A, B ∈ M_{d_out}`, `param = p`.
/// Kind `G`: `K ∈ M_{d_out}`, `a = X`, `b = Y` in `M_{d_out}`, `param = t`.
pub fn boundary_value(
    kind: BoundaryKind,
    map: &SuperMap,
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    k: &ComplexMatrix,
    param: f64,
    z: C64,
) -> Result<(C64, f64)> {
    if !(param > 0.0 && param < 1.0) {
        return Err(Error::Domain(format!("boundary interpolant needs a parameter in (0, 1), got {param}")));
    }
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::Domain(format!("non-finite interpolation point {z}")));
    }
    a.require_dim(map.d_out(), "boundary A")?;
    b.require_dim(map.d_out(), "boundary B")?;
    let one = C64::new(1.0, 0.0);
    let half = C64::new(0.5, 0.0);
    match kind {
        BoundaryKind::F => {
            k.require_dim(map.d_in(), "boundary K")?;
            let (a_pd, b_pd) = (as_pd(a, "A")?, as_pd(b, "B")?);
            let pa = image_pd(&map.apply_adjoint(a)?)?;
            let pb = image_pd(&map.apply_adjoint(b)?)?;
            let m = pa.pow(param / 2.0).matmul(k).matmul(&pb.pow((1.0 - param) / 2.0));
            let left = cpow(&pa, -z * half);
            let right = cpow(&pb, (z - one) * half);
            let x = left.matmul(&m).matmul(&right);
            let y = right.matmul(&m.adjoint()).matmul(&left);
            let prod = map
                .apply(&y)?
                .matmul(&cpow(&a_pd, z))
                .matmul(&map.apply(&x)?)
                .matmul(&cpow(&b_pd, one - z));
            Ok((prod.trace(), m.frobenius_norm().powi(2)))
        }
        BoundaryKind::G => {
            k.require_dim(map.d_out(), "boundary K")?;
            let (x_pd, y_pd) = (as_pd(a, "X")?, as_pd(b, "Y")?);
            let px = image_pd(&map.apply_adjoint(a)?)?;
            let py = image_pd(&map.apply_adjoint(b)?)?;
            let m = y_pd.pow((param - 1.0) / 2.0).matmul(k).matmul(&x_pd.pow(-param / 2.0));
            let xz = cpow(&x_pd, z * half);
            let yz = cpow(&y_pd, (one - z) * half);
            let first = map.apply_adjoint(&xz.matmul(&m.adjoint()).matmul(&yz))?;
            let second = map.apply_adjoint(&yz.matmul(&m).matmul(&xz))?;
            let prod = first.matmul(&cpow(&py, z - one)).matmul(&second).matmul(&cpow(&px, -z));
            Ok((prod.trace(), m.frobenius_norm().powi(2)))
        }
    }
}

/// Evaluates the interpolant on both boundary lines `z = iy` and `z = 1 + iy`
/// for every sample `y`, one outcome per point with `lhs = |value|` and
/// `rhs = tr[M† M]`.
#[allow(clippy::too_many_arguments)]
pub fn interp_boundary_check(
    kind: BoundaryKind,
    map: &SuperMap,
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    k: &ComplexMatrix,
    param: f64,
    y_samples: &[f64],
    tol: f64,
) -> Result<Vec<CheckOutcome>> {
    let mut out = Vec::with_capacity(2 * y_samples.len());
    for &y in y_samples {
        for edge in [0u8, 1] {
            let instance = Instance::Boundary {
                boundary: kind,
                map: map.clone(),
                a: a.clone(),
                b: b.clone(),
                k: k.clone(),
                param,
                edge,
                y,
            };
            out.push(evaluate(kind.check_id(), &instance, tol)?);
        }
    }
    Ok(out)
}

pub(super) fn eval(instance: &Instance) -> Result<Evaluation> {
    let Instance::Boundary { boundary, map, a, b, k, param, edge, y } = instance else {
        unreachable!("boundary::eval called with a non-boundary instance")
    };
    if *edge > 1 {
        return Err(Error::InvalidInput(format!("boundary edge must be 0 or 1, got {edge}")));
    }
    let req = Requirements { schwarz: true, ..Default::default() };
    req.gate(map, false, boundary.check_id())?;
    let (value, bound) = boundary_value(*boundary, map, a, b, k, *param, C64::new(f64::from(*edge), *y))?;
    Ok(Evaluation::new(value.norm(), bound))
}
