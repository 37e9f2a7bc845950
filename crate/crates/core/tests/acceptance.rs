//! Acceptance criteria. Each prints a single `PASS`/`FAIL` line with its
//! measured figures; the process exits nonzero if any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::sync::atomic::{AtomicBool, Ordering};
use std::time::{Duration, Instant};

use tracemono::duality::{dual2_optimizer, dual2_value, sample_dual2_competitor, verify_extremal};
use tracemono::ensembles::{
    gen_channel, gen_density, gen_gaussian, gen_invertible, gen_pd, stream_from_seed, ChannelFlavor, FamilyKind, SeedPlan,
};
use tracemono::functionals::{epstein, renyi_limit_quotient, umegaki};
use tracemono::inequalities::{
    check_adjoint_pairing, check_choi_roundtrip, check_dpi, check_pchar, check_sandwiched_mono, check_unital_tp_duality,
    embedding_reduction, falsify_class_via_inequality, interp_boundary_check, BoundaryKind, FalsifierId, ReductionInputs,
    ReductionKind, CLASS_TOL,
};
use tracemono::matcore::ComplexMatrix;
use tracemono::posclass::{check_schwarz, reevaluate_witness, sample_block_instance, Sampler};
use tracemono::suite::{run_suite, square_dims, SuiteConfig, BOUNDARY_Y, GRID};
use tracemono::supermap::{transpose_map, SuperMap};

const SEED: u64 = 20240601;

static FAILED: AtomicBool = AtomicBool::new(false);

fn report(n: u32, name: &str, ok: bool, detail: String) {
    println!("{} criterion {n} ({name}): {detail}", if ok { "PASS" } else { "FAIL" });
    if !ok {
        FAILED.store(true, Ordering::SeqCst);
    }
}

fn within(elapsed: Duration, budget_s: u64) -> bool {
    elapsed <= Duration::from_secs(budget_s)
}

fn monotone_family(n: u32, name: &str, ids: &[&str]) {
    let start = Instant::now();
    let config = SuiteConfig {
        suites: ids.iter().map(|s| s.to_string()).collect(),
        dims: square_dims(&[2, 3, 4]),
        trials: 500,
        master_seed: SEED,
        tol_rel: 1e-8,
        families: vec![FamilyKind::UnitalCp, FamilyKind::Pinching, FamilyKind::Embedding, FamilyKind::Sesquiunital],
        output: None,
        force_out_of_hypothesis: false,
    };
    let r = run_suite(&config).expect("suite runs");
    let elapsed = start.elapsed();
    let instances: usize = r.checks.iter().map(|c| c.trials).sum();
    let failures: usize = r.checks.iter().map(|c| c.failures).sum();
    let full = r.checks.len() == ids.len() * 9 && r.checks.iter().all(|c| c.trials == 500) && r.skipped.is_empty();
    let worst = r.checks.iter().filter_map(|c| c.worst_margin).fold(f64::INFINITY, f64::min);
    report(
        n,
        name,
        full && failures == 0 && r.exit_code() == 0 && within(elapsed, 90),
        format!("{instances} instances, {failures} failures, worst margin {worst:.2e}, {:.1}s", elapsed.as_secs_f64()),
    );
}

fn criterion_1_monotone_concave_family() {
    monotone_family(1, "monotone concave family", &["L1M", "L1MB", "Ep1", "Ep2"]);
}

fn criterion_2_monotone_convex_family() {
    monotone_family(2, "monotone convex family", &["L2M", "L2MB", "Ep3A", "Ep3"]);
}

fn criterion_3_transpose_falsified() {
    let start = Instant::now();
    let map = transpose_map(2);
    // hand computation: K = E_12 gives Φ(K†K) − Φ(K)†Φ(K) = E_22 − E_11, min eigenvalue −1
    let v = check_schwarz(&map, &Sampler::new(SEED), 1000, CLASS_TOL).unwrap();
    let witness_ok = v.is_falsified()
        && v.witness.as_ref() == Some(&ComplexMatrix::unit(2, 0, 1))
        && (v.min_eig + 1.0).abs() <= 1e-10
        && (reevaluate_witness(&map, &v).unwrap() + 1.0).abs() <= 1e-10;
    let mut details = vec![format!("schwarz min_eig {:.12}", v.min_eig)];
    let mut all = witness_ok;
    for id in [FalsifierId::L1MEndpointP0, FalsifierId::TracialAT0] {
        let f = falsify_class_via_inequality(id, &map, &Sampler::new(SEED), 1000, CLASS_TOL).unwrap();
        all &= f.is_falsified() && f.trials <= 1000 + 4;
        details.push(format!("{} {:?} after {} probes", id.check_id(), f.verdict, f.trials));
    }
    let elapsed = start.elapsed();
    details.push(format!("{:.2}s", elapsed.as_secs_f64()));
    report(3, "transpose characterization", all && within(elapsed, 10), details.join(", "));
}

/// `tr X^r` through products and inverses where possible, eigenvalues otherwise.
fn trace_power(x: &ComplexMatrix, r: f64, eigenvalues: &[f64]) -> f64 {
    let m = x.as_nalgebra();
    match r {
        2.0 => (m * m).trace().re,
        3.0 => (m * m * m).trace().re,
        -1.0 => m.clone().try_inverse().expect("PD is invertible").trace().re,
        _ => eigenvalues.iter().map(|l| l.powf(r)).sum(),
    }
}

fn criterion_4_duality_exactness() {
    let start = Instant::now();
    let plan = SeedPlan::new(SEED);
    let mut worst_attain = 0.0_f64;
    let mut worst_feasible = f64::INFINITY;
    for r in [2.0, 3.0, 0.5, -1.0] {
        for i in 0..200u64 {
            let mut rng = plan.stream("acceptance", &format!("holder{r}"), i);
            let n = 2 + (i as usize % 3);
            let x = gen_pd(n, &mut rng, 1e-3).unwrap();
            let rep = verify_extremal(&x, r, &mut rng, 5).unwrap();
            let target = trace_power(x.matrix(), r, &x.spectrum().eigenvalues).powf(1.0 / r);
            let scale = target.abs().max(1.0);
            worst_attain = worst_attain.max((target - rep.value_at_optimizer).abs() / scale);
            worst_feasible = worst_feasible.min(rep.worst_margin);
        }
    }
    let mut worst_dual_attain = 0.0_f64;
    let mut worst_excess = f64::NEG_INFINITY;
    for i in 0..200u64 {
        let mut rng = plan.stream("acceptance", "dual2", i);
        let n = 2 + (i as usize % 3);
        let p = GRID[i as usize % GRID.len()];
        let a = gen_pd(n, &mut rng, 1e-2).unwrap();
        let b = gen_gaussian(n, n, &mut rng);
        let target = epstein(a.psd(), &b, p).unwrap();
        let scale = target.abs().max(1.0);
        let h = dual2_optimizer(&a, &b, p).unwrap();
        worst_dual_attain = worst_dual_attain.max((dual2_value(&a, &b, p, &h).unwrap() - target).abs() / scale);
        for _ in 0..100 {
            let c = sample_dual2_competitor(&h, &mut rng);
            worst_excess = worst_excess.max((dual2_value(&a, &b, p, &c).unwrap() - target) / scale);
        }
    }
    let elapsed = start.elapsed();
    report(
        4,
        "duality exactness",
        worst_attain <= 1e-10
            && worst_feasible >= -1e-10
            && worst_dual_attain <= 1e-8
            && worst_excess <= 1e-8
            && within(elapsed, 60),
        format!(
            "holder attainment {worst_attain:.2e}, feasible margin {worst_feasible:.2e}, dual attainment {worst_dual_attain:.2e}, competitor excess {worst_excess:.2e}, {:.1}s",
            elapsed.as_secs_f64()
        ),
    );
}

fn criterion_5_reductions() {
    let plan = SeedPlan::new(SEED);
    let mut details = Vec::new();
    let mut all = true;
    for name in ["epstein", "cor34", "ep7"] {
        let (mut worst_id, mut worst_mid, mut fails) = (0.0_f64, f64::INFINITY, 0);
        for i in 0..200u64 {
            let mut rng = plan.stream("acceptance", name, i);
            let m = 2 + (i as usize % 3);
            let (g1, g2) = (GRID[i as usize % 5], GRID[(i as usize / 5) % 5]);
            let pd = |rng: &mut _| gen_pd(m, rng, 1e-6).unwrap().matrix().clone();
            let (a1, a2) = (pd(&mut rng), pd(&mut rng));
            let (kind, inputs) = match name {
                "epstein" | "cor34" => {
                    let b = gen_gaussian(m, m, &mut rng);
                    let kind = if name == "epstein" {
                        ReductionKind::Epstein { p: g1 }
                    } else {
                        ReductionKind::Cor34 { s: g1, r: g1 + (1.0 - g1) * g2 }
                    };
                    (kind, ReductionInputs { a1, a2, b1: b.clone(), b2: b, k1: None, k2: None })
                }
                _ => {
                    let q0 = 1.0 / (2.0 - g1);
                    let (b1, b2) = (gen_invertible(m, &mut rng), gen_invertible(m, &mut rng));
                    (ReductionKind::Ep7 { s: g1, q: q0 + (1.0 - q0) * g2 }, ReductionInputs { a1, a2, b1, b2, k1: None, k2: None })
                }
            };
            let (identity, midpoint) = embedding_reduction(kind, &inputs, 1e-8).unwrap();
            fails += (!identity.holds) as usize + (!midpoint.holds) as usize;
            worst_id = worst_id.max(identity.lhs);
            worst_mid = worst_mid.min(midpoint.margin);
        }
        all &= fails == 0 && worst_id <= 1e-10;
        details.push(format!("{name}: identity {worst_id:.2e}, midpoint margin {worst_mid:.2e}"));
    }
    report(5, "embedding reductions", all, details.join("; "));
}

fn criterion_6_entropy_bridge() {
    let plan = SeedPlan::new(SEED);
    let mut bridge_worst = f64::NEG_INFINITY;
    for i in 0..200u64 {
        let mut rng = plan.stream("acceptance", "bridge", i);
        let n = 2 + (i as usize % 3);
        let (x, y) = (gen_density(n, &mut rng), gen_density(n, &mut rng));
        let d = umegaki(&x, &y).unwrap();
        let q = renyi_limit_quotient(&x, &y, 1.0 - 1e-5).unwrap();
        bridge_worst = bridge_worst.max((q - d).abs() / (1e-3 * (1.0 + d)));
    }
    let mut dpi_fail = 0;
    let mut dpi_worst = f64::INFINITY;
    for i in 0..500u64 {
        let mut rng = plan.stream("acceptance", "dpi", i);
        let (din, dout) = (2 + (i as usize % 3), 2 + (i as usize / 3 % 3));
        let ch = gen_channel(din, dout, din * dout, &mut rng, ChannelFlavor::TracePreserving).unwrap();
        let (x, y) = (gen_density(din, &mut rng), gen_density(din, &mut rng));
        let o = check_dpi(&ch, x.matrix(), y.matrix(), false, 1e-8).unwrap();
        dpi_fail += (!o.holds) as usize;
        dpi_worst = dpi_worst.min(o.margin);
    }
    let mut sand_fail = 0;
    let mut sand_worst = f64::INFINITY;
    for i in 0..300u64 {
        let mut rng = plan.stream("acceptance", "sandwiched", i);
        let (din, dout) = (2 + (i as usize % 3), 2 + (i as usize / 3 % 3));
        let ch = gen_channel(din, dout, din * dout, &mut rng, ChannelFlavor::TracePreserving).unwrap();
        let (x, y) = (gen_density(din, &mut rng), gen_density(din, &mut rng));
        for alpha in [1.5, 2.0, 3.0] {
            let o = check_sandwiched_mono(&ch, x.matrix(), y.matrix(), alpha, false, 1e-8).unwrap();
            sand_fail += (!o.holds) as usize;
            sand_worst = sand_worst.min(o.margin);
        }
    }
    report(
        6,
        "entropy bridge",
        bridge_worst <= 1.0 && dpi_fail == 0 && sand_fail == 0,
        format!(
            "bridge error / bound {bridge_worst:.3}, DPI failures {dpi_fail} (worst {dpi_worst:.2e}), sandwiched failures {sand_fail} (worst {sand_worst:.2e})"
        ),
    );
}

fn criterion_7_boundary() {
    let start = Instant::now();
    let plan = SeedPlan::new(SEED);
    let (mut evaluated, mut fails) = (0, 0);
    let mut worst = f64::INFINITY;
    for kind in [BoundaryKind::F, BoundaryKind::G] {
        for i in 0..100u64 {
            let mut rng = plan.stream("acceptance", kind.check_id(), i);
            let (din, dout) = (2 + (i as usize % 3), 2 + (i as usize / 3 % 3));
            let fam = [FamilyKind::Sesquiunital, FamilyKind::UnitalCp][i as usize % 2];
            let map = if fam == FamilyKind::UnitalCp {
                let k = din.div_ceil(dout).max(dout.div_ceil(din)).max(2);
                gen_channel(din, dout, k, &mut rng, ChannelFlavor::UnitalAdjoint).unwrap()
            } else {
                fam.generate(din, dout, &mut rng).unwrap()
            };
            let a = gen_pd(dout, &mut rng, 1e-3).unwrap();
            let b = gen_pd(dout, &mut rng, 1e-3).unwrap();
            let kd = if kind == BoundaryKind::F { din } else { dout };
            let k = gen_gaussian(kd, kd, &mut rng);
            let param = GRID[i as usize % 5];
            for o in interp_boundary_check(kind, &map, a.matrix(), b.matrix(), &k, param, &BOUNDARY_Y, 1e-8).unwrap() {
                evaluated += 1;
                fails += (!o.holds) as usize;
                worst = worst.min(o.margin);
            }
        }
    }
    let elapsed = start.elapsed();
    report(
        7,
        "boundary interpolants",
        fails == 0 && evaluated == 2 * 100 * 2 * BOUNDARY_Y.len() && within(elapsed, 30),
        format!("{evaluated} points, {fails} failures, worst margin {worst:.2e}, {:.1}s", elapsed.as_secs_f64()),
    );
}

fn random_map(i: u64, rng: &mut tracemono::ensembles::Stream) -> SuperMap {
    let (din, dout) = (1 + (i as usize % 4), 1 + (i as usize / 4 % 4));
    match i % 3 {
        0 => gen_channel(din, dout, din * dout, rng, ChannelFlavor::TracePreserving).unwrap(),
        1 => gen_channel(din, dout, din * dout, rng, ChannelFlavor::UnitalAdjoint).unwrap(),
        _ => SuperMap::from_transfer(din, dout, gen_gaussian(dout * dout, din * din, rng)).unwrap(),
    }
}

fn criterion_8_infrastructure() {
    let config = SuiteConfig {
        suites: vec!["all".into()],
        dims: square_dims(&[2, 3]),
        trials: 3,
        master_seed: SEED,
        ..Default::default()
    };
    let dir = std::env::temp_dir().join(format!("tracemono-acceptance-{}", std::process::id()));
    let (pa, pb) = (dir.join("a").join("report.json"), dir.join("b").join("report.json"));
    run_suite(&SuiteConfig { output: Some(pa.clone()), ..config.clone() }).unwrap();
    run_suite(&SuiteConfig { output: Some(pb.clone()), ..config }).unwrap();
    let identical = std::fs::read(&pa).unwrap() == std::fs::read(&pb).unwrap();
    let _ = std::fs::remove_dir_all(&dir);

    let plan = SeedPlan::new(SEED);
    let mut fails = [0usize; 4];
    for i in 0..200u64 {
        let mut rng = plan.stream("acceptance", "infra", i);
        let map = random_map(i, &mut rng);
        let x = gen_gaussian(map.d_in(), map.d_in(), &mut rng);
        let y = gen_gaussian(map.d_out(), map.d_out(), &mut rng);
        fails[0] += !check_adjoint_pairing(&map, &x, &y, 1e-10).unwrap().holds as usize;
        fails[1] += !check_choi_roundtrip(&map, 1e-10).unwrap().holds as usize;
        fails[2] += !check_unital_tp_duality(&map, 1e-10).unwrap().holds as usize;
        let (a, z, b) = sample_block_instance(1 + (i as usize % 4), 1 + (i as usize / 4 % 3), &mut rng);
        fails[3] += !check_pchar(a.matrix(), &z, b.matrix(), 1e-10).unwrap().holds as usize;
    }
    // a stream that is reused reproduces the same draws
    let redraw = gen_gaussian(3, 3, &mut stream_from_seed(plan.stream_seed("acceptance", "infra", 0)))
        == gen_gaussian(3, 3, &mut plan.stream("acceptance", "infra", 0));
    report(
        8,
        "infrastructure",
        identical && redraw && fails.iter().all(|f| *f == 0),
        format!(
            "report bytes identical: {identical}; failures adjoint {} choi {} unital/tp {} pchar {}",
            fails[0], fails[1], fails[2], fails[3]
        ),
    );
}

fn main() -> ExitCode {
    let criteria: [(u32, fn()); 8] = [
        (1, criterion_1_monotone_concave_family),
        (2, criterion_2_monotone_convex_family),
        (3, criterion_3_transpose_falsified),
        (4, criterion_4_duality_exactness),
        (5, criterion_5_reductions),
        (6, criterion_6_entropy_bridge),
        (7, criterion_7_boundary),
        (8, criterion_8_infrastructure),
    ];
    for (n, f) in criteria {
        if let Err(e) = catch_unwind(AssertUnwindSafe(f)) {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            println!("FAIL criterion {n}: panicked: {}", msg.unwrap_or_default());
            FAILED.store(true, Ordering::SeqCst);
        }
    }
    if FAILED.load(Ordering::SeqCst) {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
