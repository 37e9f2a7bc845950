use proptest::prelude::*;

use tracemono::ensembles::{gen_channel, gen_density, ChannelFlavor, gen_gaussian, gen_pd, gen_unitary, stream_from_seed, FamilyKind};
use tracemono::inequalities::{
    check_dpi, check_epstein_convex_monotone, check_epstein_monotone, check_lieb_monotone, check_tracial, replay,
    replay_matches, LiebKind, TracialMode,
};
use tracemono::matcore::ComplexMatrix;
use tracemono::supermap::{unitary_conj, SuperMap};

const TOL: f64 = 1e-8;

fn conj(u: &ComplexMatrix, x: &ComplexMatrix) -> ComplexMatrix {
    u.matmul(x).matmul(&u.adjoint())
}

fn dims() -> impl Strategy<Value = (usize, usize)> {
    (2usize..4, 2usize..4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    // Replacing Φ by Ad_U ∘ Φ and the output-side arguments by U·U† leaves both sides unchanged.
    #[test]
    fn output_unitary_invariance(seed in any::<u64>(), (din, dout) in dims(), s in 0.05f64..0.95) {
        let mut rng = stream_from_seed(seed);
        let map = gen_channel(din, dout, din * dout, &mut rng, ChannelFlavor::UnitalAdjoint).unwrap();
        let u = gen_unitary(dout, &mut rng);
        let rotated: SuperMap = unitary_conj(&u).unwrap().compose(&map).unwrap();
        let k = gen_gaussian(din, din, &mut rng);
        let a = gen_pd(dout, &mut rng, 1e-2).unwrap().matrix().clone();
        let b = gen_pd(dout, &mut rng, 1e-2).unwrap().matrix().clone();
        let t = 1.0 - s;

        let x = check_lieb_monotone(LiebKind::Concave, &map, &k, &a, &b, s, t, false, TOL).unwrap();
        let y = check_lieb_monotone(LiebKind::Concave, &rotated, &k, &conj(&u, &a), &conj(&u, &b), s, t, false, TOL).unwrap();
        prop_assert!((x.margin - y.margin).abs() <= 1e-8, "{} vs {}", x.margin, y.margin);

        let x = check_epstein_monotone(&map, &a, &k, s, 1.0, false, TOL).unwrap();
        let y = check_epstein_monotone(&rotated, &conj(&u, &a), &k, s, 1.0, false, TOL).unwrap();
        prop_assert!((x.margin - y.margin).abs() <= 1e-8);

        let kk = gen_gaussian(dout, dout, &mut rng);
        let x = check_tracial(TracialMode::Main, &map, &kk, Some(&a), false, TOL).unwrap();
        let y = check_tracial(TracialMode::Main, &rotated, &conj(&u, &kk), Some(&conj(&u, &a)), false, TOL).unwrap();
        prop_assert!((x.margin - y.margin).abs() <= 1e-8);
    }

    // DPI is invariant under a unitary on the input side: Φ ∘ Ad_U applied to U†·U.
    #[test]
    fn dpi_input_unitary_invariance(seed in any::<u64>(), (din, dout) in dims()) {
        let mut rng = stream_from_seed(seed);
        let map = gen_channel(din, dout, din * dout, &mut rng, ChannelFlavor::TracePreserving).unwrap();
        let u = gen_unitary(din, &mut rng);
        let rotated = map.compose(&unitary_conj(&u).unwrap()).unwrap();
        let (x, y) = (gen_density(din, &mut rng).matrix().clone(), gen_density(din, &mut rng).matrix().clone());
        let ud = u.adjoint();
        let first = check_dpi(&map, &x, &y, false, TOL).unwrap();
        let second = check_dpi(&rotated, &conj(&ud, &x), &conj(&ud, &y), false, TOL).unwrap();
        prop_assert!(first.holds && second.holds);
        prop_assert!((first.margin - second.margin).abs() <= 1e-8);
    }

    #[test]
    fn snapshots_replay(seed in any::<u64>(), (din, dout) in dims(), s in 0.05f64..0.95, g in 0.05f64..1.0) {
        let mut rng = stream_from_seed(seed);
        let map = FamilyKind::Sesquiunital.generate(din, dout, &mut rng).unwrap();
        let k = gen_gaussian(din, din, &mut rng);
        let a = gen_pd(dout, &mut rng, 1e-2).unwrap().matrix().clone();
        let b = gen_pd(dout, &mut rng, 1e-2).unwrap().matrix().clone();
        let out = check_lieb_monotone(LiebKind::Concave, &map, &k, &a, &b, s, (1.0 - s) * g, false, TOL).unwrap();
        prop_assert!(out.holds);
        let json = serde_json::to_string(&out.snapshot).unwrap();
        let back = serde_json::from_str(&json).unwrap();
        let again = replay(&back).unwrap();
        prop_assert!(replay_matches(&back, &again));
        prop_assert_eq!(again.lhs, out.lhs);
        prop_assert_eq!(again.rhs, out.rhs);
    }
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1.0)
}

#[test]
fn bounded_variants_meet_their_endpoints() {
    let mut rng = stream_from_seed(99);
    for (din, dout) in [(2, 2), (2, 3), (3, 2)] {
        let map = FamilyKind::Sesquiunital.generate(din, dout, &mut rng).unwrap();
        let k = gen_gaussian(din, din, &mut rng);
        let a = gen_pd(dout, &mut rng, 1e-2).unwrap().matrix().clone();
        let b = gen_pd(dout, &mut rng, 1e-2).unwrap().matrix().clone();
        let s = 0.3;
        let eps = 1e-9;

        // t → 1 − s from below: L1MB tends to L1M
        let edge = check_lieb_monotone(LiebKind::Concave, &map, &k, &a, &b, s, 1.0 - s, false, TOL).unwrap();
        let near = check_lieb_monotone(LiebKind::Concave, &map, &k, &a, &b, s, 1.0 - s - eps, false, TOL).unwrap();
        assert_eq!((edge.check_id.as_str(), near.check_id.as_str()), ("L1M", "L1MB"));
        assert!(close(edge.lhs, near.lhs, 1e-7) && close(edge.rhs, near.rhs, 1e-7));

        // r → 1: Ep2 tends to Ep1
        let edge = check_epstein_monotone(&map, &a, &k, s, 1.0, false, TOL).unwrap();
        let near = check_epstein_monotone(&map, &a, &k, s, 1.0 - eps, false, TOL).unwrap();
        assert_eq!((edge.check_id.as_str(), near.check_id.as_str()), ("Ep1", "Ep2"));
        assert!(close(edge.lhs, near.lhs, 1e-6) && close(edge.rhs, near.rhs, 1e-6));

        // q → 1/(2−s): Ep3 tends to Ep3A
        let unital = FamilyKind::UnitalCp.generate(din, dout, &mut rng).unwrap();
        let bb = gen_gaussian(dout, dout, &mut rng);
        let q0 = 1.0 / (2.0 - s);
        let edge = check_epstein_convex_monotone(&unital, &a, &bb, s, q0, false, TOL);
        let near = check_epstein_convex_monotone(&unital, &a, &bb, s, q0 + eps, false, TOL);
        if let (Ok(edge), Ok(near)) = (edge, near) {
            assert_eq!((edge.check_id.as_str(), near.check_id.as_str()), ("Ep3A", "Ep3"));
            assert!(close(edge.lhs, near.lhs, 1e-6) && close(edge.rhs, near.rhs, 1e-6));
        }
    }
}
