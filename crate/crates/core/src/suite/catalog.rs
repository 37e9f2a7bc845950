//! Suite check ids and their instance generators.

use rand::{Rng, RngCore};

use crate::ensembles::{gen_channel, gen_density, gen_gaussian, gen_invertible, gen_pd, ChannelFlavor, FamilyKind, Stream};
use crate::error::{Error, Result};
use crate::functionals::FunctionalId;
use crate::inequalities::{
    check_adjoint_pairing, check_choi_roundtrip, check_dpi, check_epstein_convex_monotone, check_epstein_monotone,
    check_lieb_monotone, check_pchar, check_sandwiched_mono, check_tracial, check_unital_tp_duality, embedding_reduction,
    evaluate, interp_boundary_check, limit_bridge, midpoint_check, BoundaryKind, CheckOutcome, Direction, FalsifierId,
    FunctionalArgs, Instance, LiebKind, ReductionInputs, ReductionKind, TracialMode,
};
use crate::matcore::ComplexMatrix;
use crate::posclass::sample_block_instance;
use crate::supermap::{transpose_map, SuperMap};

/// Interior parameter grid.
pub const GRID: [f64; 5] = [0.1, 0.3, 0.5, 0.7, 0.9];

/// Imaginary parts sampled on the boundary lines.
pub const BOUNDARY_Y: [f64; 5] = [-2.0, -1.0, 0.0, 1.0, 2.0];

/// Eigenvalue floor of PD inputs to the monotone checks.
pub const PD_FLOOR: f64 = 1e-6;

/// Floor for inputs raised to complex powers on the boundary lines.
const BOUNDARY_FLOOR: f64 = 1e-3;

const SANDWICHED_ALPHA: [f64; 3] = [1.5, 2.0, 3.0];
const HOLDER_R: [f64; 4] = [2.0, 3.0, 0.5, -1.0];
const REVERSE_R: [f64; 4] = [0.5, -1.0, 0.25, -0.5];
const SCHATTEN_P: [f64; 4] = [0.5, 1.0, 2.0, 3.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scope {
    /// Once per `(d_in, d_out)` pair.
    Pair,
    /// Once per distinct dimension in the configured pairs.
    Dim,
    /// A single named map.
    Once,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Kind {
    Lieb { kind: LiebKind, bounded: bool },
    Epstein { bounded: bool },
    EpsteinConvex { bounded: bool },
    Tracial(TracialMode),
    Boundary(BoundaryKind),
    Dpi,
    Sandwiched,
    AdjointPairing,
    ChoiRoundtrip,
    UnitalTp,
    Reduction(&'static str),
    Midpoint(&'static str),
    HolderExtremal,
    ReverseHolder,
    Dual2,
    GeneralizedHolder,
    LimitBridge,
    Pchar,
    SchwarzFalsify { n: usize },
    InequalityFalsify { id: FalsifierId, n: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub id: String,
    pub scope: Scope,
    pub(crate) kind: Kind,
}

const REDUCTIONS: [&str; 5] = ["epstein", "cor34", "ep7", "lieb_concave", "lieb_convex"];
const MIDPOINTS: [&str; 7] = ["epstein", "epstein_general", "neg_power", "ando", "lieb_concave", "lieb_convex", "umegaki"];

/// Every id selected by `"all"`, in report order.
pub fn all_ids() -> Vec<String> {
    let mut ids: Vec<String> = [
        "L1M", "L1MB", "Ep1", "Ep2", "L2M", "L2MB", "Ep3A", "Ep3", "tracialA", "tracial", "tracialB", "boundary_f",
        "boundary_g", "DPI", "sandwiched",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    ids.extend(REDUCTIONS.iter().map(|r| format!("reduction:{r}")));
    ids.extend(MIDPOINTS.iter().map(|m| format!("midpoint:{m}")));
    ids.extend(
        [
            "duality:holder_extremal",
            "duality:reverse_holder",
            "duality:dual2",
            "holder:generalized",
            "entropy:limit_bridge",
            "infra:adjoint_pairing",
            "infra:choi_roundtrip",
            "infra:unital_tp_duality",
            "infra:pchar",
            "schwarz_falsify:transpose2",
            "falsify:L1M_endpoint_p0:transpose2",
            "falsify:tracialA_t0:transpose2",
        ]
        .iter()
        .map(|s| s.to_string()),
    );
    ids
}

fn transpose_dim(s: &str) -> Result<usize> {
    s.strip_prefix("transpose")
        .and_then(|n| n.parse::<usize>().ok())
        .filter(|n| *n >= 2)
        .ok_or_else(|| Error::Unknown(format!("falsification target '{s}' (expected transpose<n>, n ≥ 2)")))
}

pub fn parse(id: &str) -> Result<Entry> {
    let pair = |kind| Ok(Entry { id: id.to_string(), scope: Scope::Pair, kind });
    let dim = |kind| Ok(Entry { id: id.to_string(), scope: Scope::Dim, kind });
    match id {
        "L1M" => pair(Kind::Lieb { kind: LiebKind::Concave, bounded: false }),
        "L1MB" => pair(Kind::Lieb { kind: LiebKind::Concave, bounded: true }),
        "L2M" => pair(Kind::Lieb { kind: LiebKind::Convex, bounded: false }),
        "L2MB" => pair(Kind::Lieb { kind: LiebKind::Convex, bounded: true }),
        "Ep1" => pair(Kind::Epstein { bounded: false }),
        "Ep2" => pair(Kind::Epstein { bounded: true }),
        "Ep3A" => pair(Kind::EpsteinConvex { bounded: false }),
        "Ep3" => pair(Kind::EpsteinConvex { bounded: true }),
        "tracialA" => pair(Kind::Tracial(TracialMode::A)),
        "tracial" => pair(Kind::Tracial(TracialMode::Main)),
        "tracialB" => pair(Kind::Tracial(TracialMode::B)),
        "boundary_f" => pair(Kind::Boundary(BoundaryKind::F)),
        "boundary_g" => pair(Kind::Boundary(BoundaryKind::G)),
        "DPI" => pair(Kind::Dpi),
        "sandwiched" => pair(Kind::Sandwiched),
        "infra:adjoint_pairing" => pair(Kind::AdjointPairing),
        "infra:choi_roundtrip" => pair(Kind::ChoiRoundtrip),
        "infra:unital_tp_duality" => pair(Kind::UnitalTp),
        "infra:pchar" => dim(Kind::Pchar),
        "duality:holder_extremal" => dim(Kind::HolderExtremal),
        "duality:reverse_holder" => dim(Kind::ReverseHolder),
        "duality:dual2" => dim(Kind::Dual2),
        "holder:generalized" => dim(Kind::GeneralizedHolder),
        "entropy:limit_bridge" => dim(Kind::LimitBridge),
        _ => {
            if let Some(name) = id.strip_prefix("reduction:") {
                if let Some(r) = REDUCTIONS.iter().find(|r| **r == name) {
                    return dim(Kind::Reduction(r));
                }
            } else if let Some(name) = id.strip_prefix("midpoint:") {
                if let Some(m) = MIDPOINTS.iter().find(|m| **m == name) {
                    return dim(Kind::Midpoint(m));
                }
            } else if let Some(target) = id.strip_prefix("schwarz_falsify:") {
                let n = transpose_dim(target)?;
                return Ok(Entry { id: id.to_string(), scope: Scope::Once, kind: Kind::SchwarzFalsify { n } });
            } else if let Some(rest) = id.strip_prefix("falsify:") {
                if let Some((name, target)) = rest.rsplit_once(':') {
                    let fid = FalsifierId::parse(name)?;
                    let n = transpose_dim(target)?;
                    return Ok(Entry { id: id.to_string(), scope: Scope::Once, kind: Kind::InequalityFalsify { id: fid, n } });
                }
            }
            Err(Error::Unknown(format!("check id '{id}'")))
        }
    }
}

/// Settings shared by every trial of one run.
pub(crate) struct TrialCtx<'a> {
    pub d_in: usize,
    pub d_out: usize,
    pub families: &'a [FamilyKind],
    pub force: bool,
    pub tol: f64,
}

impl Kind {
    /// Whether the generated maps must be semiunital.
    fn needs_semiunital(self) -> bool {
        matches!(
            self,
            Kind::Lieb { bounded: true, .. } | Kind::Epstein { bounded: true } | Kind::EpsteinConvex { bounded: true }
        )
    }

    /// Whether the hypotheses include `Φ†(1) ≻ 0`.
    fn needs_adjoint_pd(self) -> bool {
        matches!(
            self,
            Kind::Lieb { kind: LiebKind::Convex, .. }
                | Kind::EpsteinConvex { .. }
                | Kind::Tracial(TracialMode::A | TracialMode::Main)
                | Kind::Boundary(_)
        )
    }

    /// Whether the map comes from the configured families.
    pub(crate) fn uses_families(self) -> bool {
        matches!(
            self,
            Kind::Lieb { .. }
                | Kind::Epstein { .. }
                | Kind::EpsteinConvex { .. }
                | Kind::Tracial(_)
                | Kind::Boundary(_)
                | Kind::AdjointPairing
                | Kind::ChoiRoundtrip
                | Kind::UnitalTp
        )
    }

    /// Whether the check accepts forced out-of-hypothesis maps.
    fn forcible(self) -> bool {
        matches!(
            self,
            Kind::Lieb { .. } | Kind::Epstein { .. } | Kind::EpsteinConvex { .. } | Kind::Tracial(_) | Kind::Dpi | Kind::Sandwiched
        )
    }
}

/// Families usable for `kind` at `(d_in, d_out)`.
pub(crate) fn eligible(kind: Kind, families: &[FamilyKind], d_in: usize, d_out: usize) -> Vec<FamilyKind> {
    families
        .iter()
        .copied()
        .filter(|f| f.supports(d_in, d_out) && (!kind.needs_semiunital() || f.always_semiunital()))
        .collect()
}

fn grid(i: usize) -> (f64, f64) {
    (GRID[i % GRID.len()], GRID[(i / GRID.len()) % GRID.len()])
}

fn pd(n: usize, rng: &mut Stream, floor: f64) -> Result<ComplexMatrix> {
    Ok(gen_pd(n, rng, floor)?.matrix().clone())
}

fn density(n: usize, rng: &mut Stream) -> ComplexMatrix {
    gen_density(n, rng).matrix().clone()
}

/// Map for trial `i`: cycles through the eligible families; in forced runs
/// every fourth trial composes it with a transpose, which leaves the
/// hypotheses of the theorem.
fn family_map(kind: Kind, ctx: &TrialCtx, i: usize, rng: &mut Stream) -> Result<SuperMap> {
    let fams = eligible(kind, ctx.families, ctx.d_in, ctx.d_out);
    let fam = *fams
        .get(i % fams.len().max(1))
        .ok_or_else(|| Error::Config(format!("no eligible map family for {}→{}", ctx.d_in, ctx.d_out)))?;
    let map = if fam == FamilyKind::UnitalCp && kind.needs_adjoint_pd() {
        // enough Kraus operators for Φ†(1) = Σ K K† to have full rank
        let k = rng.random_range(1..=3).max(ctx.d_out.div_ceil(ctx.d_in)).max(ctx.d_in.div_ceil(ctx.d_out));
        gen_channel(ctx.d_in, ctx.d_out, k, rng, ChannelFlavor::UnitalAdjoint)?
    } else {
        fam.generate(ctx.d_in, ctx.d_out, rng)?
    };
    twist(kind, ctx, i, map)
}

fn twist(kind: Kind, ctx: &TrialCtx, i: usize, map: SuperMap) -> Result<SuperMap> {
    if ctx.force && kind.forcible() && i % 4 == 3 {
        let label = format!("transpose∘{}", map.label());
        Ok(transpose_map(map.d_out()).compose(&map)?.with_label(label))
    } else {
        Ok(map)
    }
}

fn tp_channel(ctx: &TrialCtx, rng: &mut Stream) -> Result<SuperMap> {
    gen_channel(ctx.d_in, ctx.d_out, ctx.d_in * ctx.d_out, rng, ChannelFlavor::TracePreserving)
}

/// Generates and evaluates trial `i`. Boundary trials yield one outcome per
/// point; reductions yield the identity and the midpoint outcome.
pub(crate) fn run_trial(kind: Kind, ctx: &TrialCtx, i: usize, rng: &mut Stream) -> Result<Vec<CheckOutcome>> {
    let (din, dout, tol, force) = (ctx.d_in, ctx.d_out, ctx.tol, ctx.force);
    let (g1, g2) = grid(i);
    let one = |o: CheckOutcome| Ok(vec![o]);
    match kind {
        Kind::Lieb { kind: lk, bounded } => {
            let map = family_map(kind, ctx, i, rng)?;
            let (s, t) = match (lk, bounded) {
                (LiebKind::Concave, false) => (g1, 1.0 - g1),
                (LiebKind::Concave, true) => (g1, (1.0 - g1) * g2),
                (LiebKind::Convex, false) => (1.0 - g1, g1),
                (LiebKind::Convex, true) => ((1.0 - g1) * g2, g1),
            };
            let kdim = if lk == LiebKind::Concave { din } else { dout };
            let k = gen_gaussian(kdim, kdim, rng);
            let a = pd(dout, rng, PD_FLOOR)?;
            let b = pd(dout, rng, PD_FLOOR)?;
            one(check_lieb_monotone(lk, &map, &k, &a, &b, s, t, force, tol)?)
        }
        Kind::Epstein { bounded } => {
            let map = family_map(kind, ctx, i, rng)?;
            let r = if bounded { g1 + (1.0 - g1) * g2 } else { 1.0 };
            let a = pd(dout, rng, PD_FLOOR)?;
            let b = gen_gaussian(din, din, rng);
            one(check_epstein_monotone(&map, &a, &b, g1, r, force, tol)?)
        }
        Kind::EpsteinConvex { bounded } => {
            let map = family_map(kind, ctx, i, rng)?;
            let q0 = 1.0 / (2.0 - g1);
            let q = if bounded { q0 + (1.0 - q0) * g2 } else { q0 };
            let a = pd(dout, rng, PD_FLOOR)?;
            let b = gen_invertible(dout, rng);
            one(check_epstein_convex_monotone(&map, &a, &b, g1, q, force, tol)?)
        }
        Kind::Tracial(mode) => {
            let map = family_map(kind, ctx, i, rng)?;
            let b = gen_gaussian(dout, dout, rng);
            let a = pd(dout, rng, PD_FLOOR)?;
            one(check_tracial(mode, &map, &b, Some(&a), force, tol)?)
        }
        Kind::Boundary(bk) => {
            let map = family_map(kind, ctx, i, rng)?;
            let a = pd(dout, rng, BOUNDARY_FLOOR)?;
            let b = pd(dout, rng, BOUNDARY_FLOOR)?;
            let kdim = if bk == BoundaryKind::F { din } else { dout };
            let k = gen_gaussian(kdim, kdim, rng);
            interp_boundary_check(bk, &map, &a, &b, &k, g1, &BOUNDARY_Y, tol)
        }
        Kind::Dpi => {
            let map = twist(kind, ctx, i, tp_channel(ctx, rng)?)?;
            let (x, y) = (density(din, rng), density(din, rng));
            one(check_dpi(&map, &x, &y, force, tol)?)
        }
        Kind::Sandwiched => {
            let map = twist(kind, ctx, i, tp_channel(ctx, rng)?)?;
            let (rho, sigma) = (density(din, rng), density(din, rng));
            let alpha = SANDWICHED_ALPHA[i % SANDWICHED_ALPHA.len()];
            one(check_sandwiched_mono(&map, &rho, &sigma, alpha, force, tol)?)
        }
        Kind::AdjointPairing => {
            let map = family_map(kind, ctx, i, rng)?;
            let (x, y) = (gen_gaussian(din, din, rng), gen_gaussian(dout, dout, rng));
            one(check_adjoint_pairing(&map, &x, &y, tol)?)
        }
        Kind::ChoiRoundtrip => one(check_choi_roundtrip(&family_map(kind, ctx, i, rng)?, tol)?),
        Kind::UnitalTp => {
            // alternate unital maps, their trace-preserving adjoints and generic maps
            let map = match i % 3 {
                0 => family_map(kind, ctx, i / 3, rng)?,
                1 => family_map(kind, ctx, i / 3, rng)?.adjoint(),
                _ => SuperMap::from_transfer(din, dout, gen_gaussian(dout * dout, din * din, rng))?,
            };
            one(check_unital_tp_duality(&map, tol)?)
        }
        Kind::Reduction(name) => {
            let m = din;
            let (a1, a2) = (pd(m, rng, PD_FLOOR)?, pd(m, rng, PD_FLOOR)?);
            let (corollary, inputs) = match name {
                "epstein" | "cor34" => {
                    let b = gen_gaussian(m, m, rng);
                    let corollary = if name == "epstein" {
                        ReductionKind::Epstein { p: g1 }
                    } else {
                        ReductionKind::Cor34 { s: g1, r: g1 + (1.0 - g1) * g2 }
                    };
                    (corollary, ReductionInputs { a1, a2, b1: b.clone(), b2: b, k1: None, k2: None })
                }
                "ep7" => {
                    let q0 = 1.0 / (2.0 - g1);
                    let inputs = ReductionInputs {
                        a1,
                        a2,
                        b1: gen_invertible(m, rng),
                        b2: gen_invertible(m, rng),
                        k1: None,
                        k2: None,
                    };
                    (ReductionKind::Ep7 { s: g1, q: q0 + (1.0 - q0) * g2 }, inputs)
                }
                _ => {
                    let (b1, b2) = (pd(m, rng, PD_FLOOR)?, pd(m, rng, PD_FLOOR)?);
                    let k1 = Some(gen_gaussian(m, m, rng));
                    let k2 = if name == "lieb_convex" { Some(gen_gaussian(m, m, rng)) } else { None };
                    let corollary = if name == "lieb_concave" {
                        ReductionKind::LiebConcave { s: g1, t: (1.0 - g1) * g2 }
                    } else {
                        ReductionKind::LiebConvex { s: (1.0 - g1) * g2, t: g1 }
                    };
                    (corollary, ReductionInputs { a1, a2, b1, b2, k1, k2 })
                }
            };
            let (identity, midpoint) = embedding_reduction(corollary, &inputs, tol)?;
            Ok(vec![identity, midpoint])
        }
        Kind::Midpoint(name) => {
            let m = din;
            let q0 = 1.0 / (2.0 - g1);
            let (functional, direction) = match name {
                "epstein" => (FunctionalId::Epstein { p: g1 }, Direction::Concave),
                "epstein_general" => (FunctionalId::EpsteinGeneral { s: g1, r: g1 + (1.0 - g1) * g2 }, Direction::Concave),
                "neg_power" => (FunctionalId::NegPower { s: g1, q: q0 + (1.0 - q0) * g2 }, Direction::Convex),
                "ando" => (FunctionalId::Ando { p: 1.0 + g1, r: 1.0 + 2.0 * g2 }, Direction::Convex),
                "lieb_concave" => (FunctionalId::LiebConcave { s: g1, t: (1.0 - g1) * g2 }, Direction::Concave),
                "lieb_convex" => (FunctionalId::LiebConvex { s: (1.0 - g1) * g2, t: g1 }, Direction::Convex),
                _ => (FunctionalId::Umegaki, Direction::Convex),
            };
            let (first, second) = match name {
                "epstein" | "epstein_general" | "ando" => {
                    let b = gen_gaussian(m, m, rng);
                    (
                        FunctionalArgs::new(pd(m, rng, PD_FLOOR)?, b.clone(), None),
                        FunctionalArgs::new(pd(m, rng, PD_FLOOR)?, b, None),
                    )
                }
                "neg_power" => (
                    FunctionalArgs::new(pd(m, rng, PD_FLOOR)?, gen_invertible(m, rng), None),
                    FunctionalArgs::new(pd(m, rng, PD_FLOOR)?, gen_invertible(m, rng), None),
                ),
                "lieb_concave" => {
                    let k = gen_gaussian(m, m, rng);
                    (
                        FunctionalArgs::new(pd(m, rng, PD_FLOOR)?, pd(m, rng, PD_FLOOR)?, Some(k.clone())),
                        FunctionalArgs::new(pd(m, rng, PD_FLOOR)?, pd(m, rng, PD_FLOOR)?, Some(k)),
                    )
                }
                "lieb_convex" => (
                    FunctionalArgs::new(pd(m, rng, PD_FLOOR)?, pd(m, rng, PD_FLOOR)?, Some(gen_gaussian(m, m, rng))),
                    FunctionalArgs::new(pd(m, rng, PD_FLOOR)?, pd(m, rng, PD_FLOOR)?, Some(gen_gaussian(m, m, rng))),
                ),
                _ => (
                    FunctionalArgs::new(density(m, rng), density(m, rng), None),
                    FunctionalArgs::new(density(m, rng), density(m, rng), None),
                ),
            };
            one(midpoint_check(functional, &first, &second, direction, tol)?)
        }
        Kind::HolderExtremal => {
            let x = pd(din, rng, 1e-2)?;
            let inst = Instance::HolderExtremal { x, r: HOLDER_R[i % HOLDER_R.len()], seed: rng.next_u64(), samples: 20 };
            one(evaluate("duality:holder_extremal", &inst, tol)?)
        }
        Kind::ReverseHolder => {
            let inst = Instance::ReverseHolder {
                x: pd(din, rng, 1e-2)?,
                y: pd(din, rng, 1e-2)?,
                r: REVERSE_R[i % REVERSE_R.len()],
            };
            one(evaluate("duality:reverse_holder", &inst, tol)?)
        }
        Kind::Dual2 => {
            let a = pd(din, rng, 1e-2)?;
            let b = gen_gaussian(din, din, rng);
            let inst = Instance::Dual2 { a, b, p: g1, seed: rng.next_u64(), competitors: 20 };
            one(evaluate("duality:dual2", &inst, tol)?)
        }
        Kind::GeneralizedHolder => {
            let (x, y) = (gen_gaussian(din, din, rng), gen_gaussian(din, din, rng));
            let p1 = SCHATTEN_P[i % SCHATTEN_P.len()];
            let p2 = SCHATTEN_P[(i / SCHATTEN_P.len()) % SCHATTEN_P.len()];
            one(evaluate("holder:generalized", &Instance::GeneralizedHolder { x, y, p1, p2 }, tol)?)
        }
        Kind::LimitBridge => {
            let (x, y) = (density(din, rng), density(din, rng));
            one(limit_bridge(&x, &y, tol)?)
        }
        Kind::Pchar => {
            let m = rng.random_range(1..=din);
            let (a, z, b) = sample_block_instance(din, m, rng);
            one(check_pchar(a.matrix(), &z, b.matrix(), tol)?)
        }
        Kind::SchwarzFalsify { .. } | Kind::InequalityFalsify { .. } => {
            Err(Error::InvalidInput("falsification targets are not trial checks".into()))
        }
    }
}
