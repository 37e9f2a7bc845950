use serde::{Deserialize, Serialize};

use super::{as_pd, as_psd, evaluate, image_pd, image_psd, CheckOutcome, Evaluation, Instance, Requirements, PARAM_SLACK};
use crate::error::{Error, Result};
use crate::functionals::{lieb_concave_form, lieb_convex_form};
use crate::matcore::ComplexMatrix;
use crate::supermap::SuperMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LiebKind {
    /// Forward map on the left, `Φ†` on `A`, `B`.
    Concave,
    /// `Φ†` on the left, negative powers.
    Convex,
}

fn check_params(s: f64, t: f64) -> Result<bool> {
    let ok = s >= 0.0 && t >= 0.0 && s + t <= 1.0 + PARAM_SLACK;
    if !ok || !s.is_finite() || !t.is_finite() {
        return Err(Error::Domain(format!("need s, t ≥ 0 and s + t ≤ 1, got s = {s}, t = {t}")));
    }
    // below the diagonal the constant c^{1-s-t} enters and the map must be semiunital
    let bounded = (s + t - 1.0).abs() > PARAM_SLACK;
    if bounded && !(s > 0.0 && t > 0.0) {
        return Err(Error::Domain(format!("need s, t > 0 when s + t < 1, got s = {s}, t = {t}")));
    }
    Ok(bounded)
}

/// Builds and evaluates a Lieb-type monotone instance.
///
/// `Concave`: `K ∈ M_{d_in}`, `A, B ∈ M_{d_out}` PSD.
/// `Convex`: `K ∈ M_{d_out}`, `a = X`, `b = Y` PD in `M_{d_out}`.
#[allow(clippy::too_many_arguments)]
pub fn check_lieb_monotone(
    kind: LiebKind,
    map: &SuperMap,
    k: &ComplexMatrix,
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    s: f64,
    t: f64,
    force: bool,
    tol: f64,
) -> Result<CheckOutcome> {
    let bounded = check_params(s, t)?;
    let (id, instance) = match kind {
        LiebKind::Concave => (
            if bounded { "L1MB" } else { "L1M" },
            Instance::LiebConcave { map: map.clone(), k: k.clone(), a: a.clone(), b: b.clone(), s, t, force },
        ),
        LiebKind::Convex => (
            if bounded { "L2MB" } else { "L2M" },
            Instance::LiebConvex { map: map.clone(), k: k.clone(), x: a.clone(), y: b.clone(), s, t, force },
        ),
    };
    evaluate(id, &instance, tol)
}

pub(super) fn eval(instance: &Instance) -> Result<Evaluation> {
    match instance {
        Instance::LiebConcave { map, k, a, b, s, t, force } => {
            let bounded = check_params(*s, *t)?;
            let req = Requirements { schwarz: true, semiunital: bounded, ..Default::default() };
            let exploratory = req.gate(map, *force, "lieb concave monotonicity")?;
            k.require_dim(map.d_in(), "lieb concave K")?;
            a.require_dim(map.d_out(), "lieb concave A")?;
            b.require_dim(map.d_out(), "lieb concave B")?;
            let a_psd = as_psd(a, "A")?;
            let b_psd = as_psd(b, "B")?;
            let phi_k = map.apply(k)?;
            let lhs = lieb_concave_form(&phi_k, &a_psd, &b_psd, *s, *t)?;
            let pa = image_psd(&map.apply_adjoint(a)?)?;
            let pb = image_psd(&map.apply_adjoint(b)?)?;
            let factor = map.d_ratio().powf(1.0 - s - t);
            let rhs = factor * lieb_concave_form(k, &pa, &pb, *s, *t)?;
            Ok(Evaluation::new(lhs, rhs).exploratory(exploratory))
        }
        Instance::LiebConvex { map, k, x, y, s, t, force } => {
            let bounded = check_params(*s, *t)?;
            let req = Requirements { schwarz: true, semiunital: bounded, adjoint_one_pd: true, ..Default::default() };
            let exploratory = req.gate(map, *force, "lieb convex monotonicity")?;
            k.require_dim(map.d_out(), "lieb convex K")?;
            x.require_dim(map.d_out(), "lieb convex X")?;
            y.require_dim(map.d_out(), "lieb convex Y")?;
            let x_pd = as_pd(x, "X")?;
            let y_pd = as_pd(y, "Y")?;
            let px = image_pd(&map.apply_adjoint(x)?)?;
            let py = image_pd(&map.apply_adjoint(y)?)?;
            let lhs = lieb_convex_form(&map.apply_adjoint(k)?, &px, &py, *s, *t)?;
            let factor = map.d_ratio().powf(1.0 - s - t);
            let rhs = factor * lieb_convex_form(k, &x_pd, &y_pd, *s, *t)?;
            Ok(Evaluation::new(lhs, rhs).exploratory(exploratory))
        }
        _ => unreachable!("lieb::eval called with a non-lieb instance"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::{gen_gaussian, gen_pd, stream_from_seed, FamilyKind};
    use crate::supermap::{embedding, identity_map, transpose_map};

    #[test]
    fn identity_map_is_equality() {
        let mut rng = stream_from_seed(1);
        let map = identity_map(3);
        let k = gen_gaussian(3, 3, &mut rng);
        let a = gen_pd(3, &mut rng, 1e-2).unwrap();
        let b = gen_pd(3, &mut rng, 1e-2).unwrap();
        let out = check_lieb_monotone(LiebKind::Concave, &map, &k, a.matrix(), b.matrix(), 0.3, 0.7, false, 1e-8).unwrap();
        assert_eq!(out.check_id, "L1M");
        assert!(out.margin.abs() < 1e-12, "{out:?}");
        let out = check_lieb_monotone(LiebKind::Convex, &map, &k, a.matrix(), b.matrix(), 0.3, 0.4, false, 1e-8).unwrap();
        assert_eq!(out.check_id, "L2MB");
        assert!(out.margin.abs() < 1e-12);
    }

    #[test]
    fn random_unital_maps_satisfy_both() {
        let mut rng = stream_from_seed(2);
        for (din, dout) in [(2, 3), (3, 2), (2, 4)] {
            for _ in 0..5 {
                let map = FamilyKind::Sesquiunital.generate(din, dout, &mut rng).unwrap();
                let k = gen_gaussian(din, din, &mut rng);
                let a = gen_pd(dout, &mut rng, 1e-2).unwrap();
                let b = gen_pd(dout, &mut rng, 1e-2).unwrap();
                for (s, t) in [(0.5, 0.5), (0.2, 0.3)] {
                    let out = check_lieb_monotone(LiebKind::Concave, &map, &k, a.matrix(), b.matrix(), s, t, false, 1e-8)
                        .unwrap();
                    assert!(out.holds && !out.exploratory, "{din}->{dout}: {out:?}");
                }
                let k2 = gen_gaussian(dout, dout, &mut rng);
                let out =
                    check_lieb_monotone(LiebKind::Convex, &map, &k2, a.matrix(), b.matrix(), 0.3, 0.3, false, 1e-8).unwrap();
                assert!(out.holds, "{out:?}");
            }
        }
    }

    #[test]
    fn embedding_constant_is_two_to_the_gap() {
        // Φ(K) = diag(K, K), A = B = 1: tr[K†K]·2 ≤ 2^{1-s-t}·2^{s+t} tr[K†K]
        let mut rng = stream_from_seed(3);
        let map = embedding(2);
        let k = gen_gaussian(2, 2, &mut rng);
        let one = ComplexMatrix::identity(4);
        let out = check_lieb_monotone(LiebKind::Concave, &map, &k, &one, &one, 0.25, 0.25, false, 1e-8).unwrap();
        assert!((out.lhs - out.rhs).abs() < 1e-12 * out.rhs);
    }

    #[test]
    fn gating() {
        let map = transpose_map(2);
        let one = ComplexMatrix::identity(2);
        let r = check_lieb_monotone(LiebKind::Concave, &map, &one, &one, &one, 0.5, 0.5, false, 1e-8);
        assert!(matches!(r, Err(Error::Precondition(_))));
        let out = check_lieb_monotone(LiebKind::Concave, &map, &one, &one, &one, 0.5, 0.5, true, 1e-8).unwrap();
        assert!(out.exploratory);
        assert!(check_lieb_monotone(LiebKind::Concave, &map, &one, &one, &one, 0.7, 0.7, true, 1e-8).is_err());
        assert!(check_lieb_monotone(LiebKind::Concave, &map, &one, &one, &one, 0.0, 0.5, true, 1e-8).is_err());
    }
}
