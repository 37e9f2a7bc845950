use serde::{Deserialize, Serialize};

use super::{evaluate, CheckOutcome, Evaluation, Instance, PARAM_SLACK};
use crate::error::{Error, Result};
use crate::functionals::FunctionalId;
use crate::matcore::ComplexMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Concave,
    Convex,
}

/// Arguments `(a, b, k)` in the roles of [`FunctionalId::evaluate`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionalArgs {
    pub a: ComplexMatrix,
    pub b: ComplexMatrix,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<ComplexMatrix>,
}

impl FunctionalArgs {
    pub fn new(a: ComplexMatrix, b: ComplexMatrix, k: Option<ComplexMatrix>) -> Self {
        Self { a, b, k }
    }

    fn midpoint(&self, other: &Self) -> Result<Self> {
        let mid = |x: &ComplexMatrix, y: &ComplexMatrix| -> Result<ComplexMatrix> {
            if x.rows() != y.rows() || x.cols() != y.cols() {
                return Err(Error::DimensionMismatch {
                    context: "midpoint",
                    expected: format!("{}x{}", x.rows(), x.cols()),
                    got: format!("{}x{}", y.rows(), y.cols()),
                });
            }
            Ok((x + y).scale(0.5))
        };
        let k = match (&self.k, &other.k) {
            (Some(x), Some(y)) => Some(mid(x, y)?),
            (None, None) => None,
            _ => return Err(Error::InvalidInput("midpoint: K given for only one argument".into())),
        };
        Ok(Self { a: mid(&self.a, &other.a)?, b: mid(&self.b, &other.b)?, k })
    }
}

/// Registered shape of a functional: its direction and whether only the
/// first argument varies (the others must coincide).
fn registered(id: &FunctionalId) -> Result<(Direction, bool)> {
    match *id {
        FunctionalId::LiebConcave { .. } => Ok((Direction::Concave, false)),
        FunctionalId::LiebConvex { .. } | FunctionalId::Umegaki => Ok((Direction::Convex, false)),
        FunctionalId::Epstein { .. } | FunctionalId::EpsteinGeneral { .. } => Ok((Direction::Concave, true)),
        FunctionalId::NegPower { s, q } => {
            if q < 1.0 / (2.0 - s) - PARAM_SLACK {
                return Err(Error::Precondition(format!("joint convexity needs q ≥ 1/(2−s), got s = {s}, q = {q}")));
            }
            Ok((Direction::Convex, false))
        }
        FunctionalId::Ando { .. } => Ok((Direction::Convex, true)),
        FunctionalId::RenyiLimit { .. } | FunctionalId::Sandwiched { .. } => {
            Err(Error::Domain(format!("{} has no registered midpoint statement", id.name())))
        }
    }
}

/// `(F(x) + F(y))/2 ≤ F((x+y)/2)` (concave) or the reverse (convex).
///
/// For LiebConcave the `K` arguments must coincide; for the Epstein-type and
/// Ando forms the `B` arguments must coincide. A direction that differs from
/// the registered one is evaluated and marked exploratory.
pub fn midpoint_check(
    functional: FunctionalId,
    first: &FunctionalArgs,
    second: &FunctionalArgs,
    direction: Direction,
    tol: f64,
) -> Result<CheckOutcome> {
    let instance = Instance::Midpoint { functional, first: first.clone(), second: second.clone(), direction };
    evaluate(&format!("midpoint:{}", functional.name()), &instance, tol)
}

pub(super) fn eval(instance: &Instance) -> Result<Evaluation> {
    let Instance::Midpoint { functional, first, second, direction } = instance else {
        unreachable!("midpoint::eval called with a non-midpoint instance")
    };
    let (registered_dir, first_only) = registered(functional)?;
    let same = |x: &ComplexMatrix, y: &ComplexMatrix| x.approx_eq(y, 0.0);
    if first_only && !same(&first.b, &second.b) {
        return Err(Error::InvalidInput(format!("{}: the B arguments must coincide", functional.name())));
    }
    if matches!(functional, FunctionalId::LiebConcave { .. }) {
        match (&first.k, &second.k) {
            (Some(x), Some(y)) if same(x, y) => {}
            _ => return Err(Error::InvalidInput("lieb_concave: the K arguments must coincide".into())),
        }
    }
    let mid = first.midpoint(second)?;
    let f = |x: &FunctionalArgs| functional.evaluate(&x.a, &x.b, x.k.as_ref());
    let avg = 0.5 * (f(first)? + f(second)?);
    let at_mid = f(&mid)?;
    let ev = match direction {
        Direction::Concave => Evaluation::new(avg, at_mid),
        Direction::Convex => Evaluation::new(at_mid, avg),
    };
    Ok(ev.exploratory(*direction != registered_dir))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::{gen_density, gen_gaussian, gen_pd, stream_from_seed};

    #[test]
    fn registered_directions_hold() {
        let mut rng = stream_from_seed(11);
        let pd = |rng: &mut _| gen_pd(3, rng, 1e-2).unwrap().matrix().clone();
        let b = gen_gaussian(3, 3, &mut rng);
        let a1 = FunctionalArgs::new(pd(&mut rng), b.clone(), None);
        let a2 = FunctionalArgs::new(pd(&mut rng), b.clone(), None);
        for id in [
            FunctionalId::Epstein { p: 0.4 },
            FunctionalId::EpsteinGeneral { s: 0.3, r: 0.7 },
        ] {
            let out = midpoint_check(id, &a1, &a2, Direction::Concave, 1e-8).unwrap();
            assert!(out.holds && !out.exploratory, "{out:?}");
        }
        let out = midpoint_check(FunctionalId::Ando { p: 1.5, r: 1.2 }, &a1, &a2, Direction::Convex, 1e-8).unwrap();
        assert!(out.holds);
        let j1 = FunctionalArgs::new(pd(&mut rng), gen_gaussian(3, 3, &mut rng), None);
        let j2 = FunctionalArgs::new(pd(&mut rng), gen_gaussian(3, 3, &mut rng), None);
        let out = midpoint_check(FunctionalId::NegPower { s: 0.5, q: 0.8 }, &j1, &j2, Direction::Convex, 1e-8).unwrap();
        assert!(out.holds);
        assert!(midpoint_check(FunctionalId::NegPower { s: 0.5, q: 0.5 }, &j1, &j2, Direction::Convex, 1e-8).is_err());
        assert!(midpoint_check(FunctionalId::Epstein { p: 0.4 }, &j1, &j2, Direction::Concave, 1e-8).is_err());

        let d1 = FunctionalArgs::new(gen_density(3, &mut rng).matrix().clone(), gen_density(3, &mut rng).matrix().clone(), None);
        let d2 = FunctionalArgs::new(gen_density(3, &mut rng).matrix().clone(), gen_density(3, &mut rng).matrix().clone(), None);
        assert!(midpoint_check(FunctionalId::Umegaki, &d1, &d2, Direction::Convex, 1e-8).unwrap().holds);
    }

    #[test]
    fn scalar_lieb_concavity() {
        // 1×1: (x, y) ↦ x^s y^t is concave for s + t ≤ 1
        let c = |v: f64| ComplexMatrix::from_real_diagonal(&[v]);
        let k = Some(c(1.0));
        let first = FunctionalArgs::new(c(1.0), c(4.0), k.clone());
        let second = FunctionalArgs::new(c(9.0), c(0.25), k);
        let out = midpoint_check(FunctionalId::LiebConcave { s: 0.5, t: 0.5 }, &first, &second, Direction::Concave, 1e-12)
            .unwrap();
        assert!((out.lhs - 0.5 * (2.0 + 1.5)).abs() < 1e-14);
        assert!((out.rhs - (5.0f64 * 2.125).sqrt()).abs() < 1e-14);
        let flipped = midpoint_check(FunctionalId::LiebConcave { s: 0.5, t: 0.5 }, &first, &second, Direction::Convex, 1e-12)
            .unwrap();
        assert!(flipped.exploratory && !flipped.holds);
    }
}
