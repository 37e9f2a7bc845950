//! Monotonicity inequalities as checkable statements over a map, matrices and
//! parameters.
//!
//! Every check is an [`Instance`] evaluated by [`evaluate`]. The instance is
//! self-contained (the map is stored by its Choi matrix), so serializing it in
//! a [`Snapshot`] and evaluating it again reproduces `lhs` and `rhs`.
//!
//! Map hypotheses are gated: an instance whose map does not satisfy the
//! theorem's class requirements is rejected with a precondition error unless
//! it carries `force = true`, in which case the outcome is marked
//! exploratory.

mod boundary;
mod entropy;
mod epstein;
mod falsify;
mod infra;
mod lieb;
mod midpoint;
mod reduction;
mod registry;
mod tracial;

pub use boundary::{boundary_value, interp_boundary_check, BoundaryKind};
pub use entropy::{check_dpi, check_sandwiched_mono, limit_bridge};
pub use epstein::{check_epstein_convex_monotone, check_epstein_monotone};
pub use falsify::{falsifier_instance, falsify_class_via_inequality, FalsifierId};
pub use infra::{check_adjoint_pairing, check_choi_roundtrip, check_pchar, check_unital_tp_duality};
pub use lieb::{check_lieb_monotone, LiebKind};
pub use midpoint::{midpoint_check, Direction, FunctionalArgs};
pub use reduction::{embedding_reduction, ReductionInputs, ReductionKind, ReductionPart, REDUCTION_IDENTITY_TOL};
pub use registry::{descriptor, descriptors, CheckDescriptor};
pub use tracial::{check_tracial, TracialMode};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functionals::FunctionalId;
use crate::matcore::{eig_of_matrix, ComplexMatrix, PdMatrix, PsdMatrix, Tolerances};
use crate::posclass::{check_k_positive, check_schwarz, Sampler};
use crate::supermap::SuperMap;

/// Snapshot format version.
pub const SNAPSHOT_VERSION: u32 = 1;

/// Tolerance for the class certificates that gate hypotheses.
pub const CLASS_TOL: f64 = 1e-10;

/// Slack on closed parameter bounds.
pub(crate) const PARAM_SLACK: f64 = 1e-12;

/// Serialized inputs of one check evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Instance {
    /// `tr[Φ(K)† A^s Φ(K) B^t] ≤ c^{1−s−t} tr[K† Φ†(A)^s K Φ†(B)^t]`,
    /// `K ∈ M_{d_in}`, `A, B ∈ M_{d_out}`.
    LiebConcave { map: SuperMap, k: ComplexMatrix, a: ComplexMatrix, b: ComplexMatrix, s: f64, t: f64, force: bool },
    /// `tr[Φ†(K)† Φ†(Y)^{-s} Φ†(K) Φ†(X)^{-t}] ≤ c^{1−s−t} tr[K† Y^{-s} K X^{-t}]`,
    /// `K, X, Y ∈ M_{d_out}`.
    LiebConvex { map: SuperMap, k: ComplexMatrix, x: ComplexMatrix, y: ComplexMatrix, s: f64, t: f64, force: bool },
    /// `tr[(Φ(B)† A^s Φ(B))^{r/s}] ≤ c^{1−r} tr[(B† Φ†(A)^s B)^{r/s}]`,
    /// `A ∈ M_{d_out}`, `B ∈ M_{d_in}`.
    Epstein { map: SuperMap, a: ComplexMatrix, b: ComplexMatrix, s: f64, r: f64, force: bool },
    /// `tr[(Φ†(B)† Φ†(A)^{-s} Φ†(B))^q] ≤ c^{(2−s)q−1} tr[(B† A^{-s} B)^q]`,
    /// `A, B ∈ M_{d_out}`.
    EpsteinConvex { map: SuperMap, a: ComplexMatrix, b: ComplexMatrix, s: f64, q: f64, force: bool },
    Tracial { mode: TracialMode, map: SuperMap, b: ComplexMatrix, a: Option<ComplexMatrix>, force: bool },
    Dpi { map: SuperMap, x: ComplexMatrix, y: ComplexMatrix, force: bool },
    Sandwiched { map: SuperMap, rho: ComplexMatrix, sigma: ComplexMatrix, alpha: f64, force: bool },
    Boundary {
        boundary: BoundaryKind,
        map: SuperMap,
        a: ComplexMatrix,
        b: ComplexMatrix,
        k: ComplexMatrix,
        param: f64,
        edge: u8,
        y: f64,
    },
    Midpoint { functional: FunctionalId, first: FunctionalArgs, second: FunctionalArgs, direction: Direction },
    Reduction { corollary: ReductionKind, inputs: ReductionInputs, part: ReductionPart },
    HolderExtremal { x: ComplexMatrix, r: f64, seed: u64, samples: usize },
    ReverseHolder { x: ComplexMatrix, y: ComplexMatrix, r: f64 },
    Dual2 { a: ComplexMatrix, b: ComplexMatrix, p: f64, seed: u64, competitors: usize },
    EntropyLimit { x: ComplexMatrix, y: ComplexMatrix, t: f64 },
    GeneralizedHolder { x: ComplexMatrix, y: ComplexMatrix, p1: f64, p2: f64 },
    AdjointPairing { map: SuperMap, x: ComplexMatrix, y: ComplexMatrix },
    ChoiRoundtrip { map: SuperMap },
    UnitalTpDuality { map: SuperMap },
    Pchar { a: ComplexMatrix, z: ComplexMatrix, b: ComplexMatrix },
}

/// Raw result of evaluating an instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Evaluation {
    pub lhs: f64,
    pub rhs: f64,
    pub exploratory: bool,
}

impl Evaluation {
    pub(crate) fn new(lhs: f64, rhs: f64) -> Self {
        Self { lhs, rhs, exploratory: false }
    }

    pub(crate) fn exploratory(mut self, e: bool) -> Self {
        self.exploratory = e;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub version: u32,
    pub check_id: String,
    pub instance: Instance,
    pub lhs: f64,
    pub rhs: f64,
    pub tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub check_id: String,
    pub lhs: f64,
    pub rhs: f64,
    /// `(rhs − lhs) / max(1, |lhs|, |rhs|)`.
    pub margin: f64,
    pub holds: bool,
    /// Set when the instance ran outside the theorem's hypotheses.
    pub exploratory: bool,
    pub snapshot: Snapshot,
}

pub fn normalized_margin(lhs: f64, rhs: f64) -> f64 {
    (rhs - lhs) / 1.0_f64.max(lhs.abs()).max(rhs.abs())
}

/// Evaluates an instance under `check_id` at margin tolerance `tol`.
pub fn evaluate(check_id: &str, instance: &Instance, tol: f64) -> Result<CheckOutcome> {
    if !(tol > 0.0) || !tol.is_finite() {
        return Err(Error::InvalidInput(format!("tolerance must be positive, got {tol}")));
    }
    let ev = match instance {
        Instance::LiebConcave { .. } | Instance::LiebConvex { .. } => lieb::eval(instance)?,
        Instance::Epstein { .. } | Instance::EpsteinConvex { .. } => epstein::eval(instance)?,
        Instance::Tracial { .. } => tracial::eval(instance)?,
        Instance::Dpi { .. } | Instance::Sandwiched { .. } | Instance::EntropyLimit { .. } => {
            entropy::eval(instance)?
        }
        Instance::Boundary { .. } => boundary::eval(instance)?,
        Instance::Midpoint { .. } => midpoint::eval(instance)?,
        Instance::Reduction { .. } => reduction::eval(instance)?,
        Instance::HolderExtremal { .. }
        | Instance::ReverseHolder { .. }
        | Instance::Dual2 { .. }
        | Instance::GeneralizedHolder { .. } => infra::evaluate_duality(instance)?,
        Instance::AdjointPairing { .. }
        | Instance::ChoiRoundtrip { .. }
        | Instance::UnitalTpDuality { .. }
        | Instance::Pchar { .. } => infra::eval(instance)?,
    };
    if !ev.lhs.is_finite() || !ev.rhs.is_finite() {
        return Err(Error::InvalidInput(format!("{check_id}: non-finite values lhs = {}, rhs = {}", ev.lhs, ev.rhs)));
    }
    let margin = normalized_margin(ev.lhs, ev.rhs);
    Ok(CheckOutcome {
        check_id: check_id.to_string(),
        lhs: ev.lhs,
        rhs: ev.rhs,
        margin,
        holds: margin >= -tol,
        exploratory: ev.exploratory,
        snapshot: Snapshot {
            version: SNAPSHOT_VERSION,
            check_id: check_id.to_string(),
            instance: instance.clone(),
            lhs: ev.lhs,
            rhs: ev.rhs,
            tol,
        },
    })
}

/// Re-evaluates a stored snapshot.
pub fn replay(snapshot: &Snapshot) -> Result<CheckOutcome> {
    if snapshot.version != SNAPSHOT_VERSION {
        return Err(Error::InvalidInput(format!(
            "snapshot version {} is not supported (expected {SNAPSHOT_VERSION})",
            snapshot.version
        )));
    }
    evaluate(&snapshot.check_id, &snapshot.instance, snapshot.tol)
}

/// Whether a replayed outcome reproduces the stored values within `tol`.
pub fn replay_matches(snapshot: &Snapshot, outcome: &CheckOutcome) -> bool {
    let close = |a: f64, b: f64| (a - b).abs() <= snapshot.tol * 1.0_f64.max(a.abs()).max(b.abs());
    close(snapshot.lhs, outcome.lhs) && close(snapshot.rhs, outcome.rhs)
}

/// Class hypotheses a theorem places on its map.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Requirements {
    pub schwarz: bool,
    pub unital: bool,
    pub semiunital: bool,
    pub trace_preserving: bool,
    pub positive: bool,
    pub completely_positive: bool,
    /// `Φ†(1)` positive definite.
    pub adjoint_one_pd: bool,
}

impl Requirements {
    /// Names of the hypotheses `map` does not satisfy (or cannot be certified).
    pub fn unmet(&self, map: &SuperMap) -> Result<Vec<&'static str>> {
        let mut out = Vec::new();
        let meta = map.evaluate_meta(CLASS_TOL);
        if self.unital && meta.unital != Some(true) {
            out.push("unital");
        }
        if self.semiunital && meta.semiunital != Some(true) {
            out.push("semiunital");
        }
        if self.trace_preserving && meta.trace_preserving != Some(true) {
            out.push("trace_preserving");
        }
        if self.completely_positive && !crate::posclass::check_cp(map, CLASS_TOL).is_certified() {
            out.push("completely_positive");
        }
        if self.schwarz && !check_schwarz(map, &Sampler::new(0), 0, CLASS_TOL)?.is_certified() {
            out.push("schwarz");
        }
        if self.positive && check_k_positive(map, 1, &Sampler::new(0), 64, CLASS_TOL)?.is_falsified() {
            out.push("positive");
        }
        if self.adjoint_one_pd {
            let one = map.apply_adjoint(&ComplexMatrix::identity(map.d_out()))?;
            let spec = eig_of_matrix(&one)?;
            if spec.min() <= CLASS_TOL * spec.norm().max(1.0) {
                out.push("adjoint_one_pd");
            }
        }
        Ok(out)
    }

    /// `Ok(exploratory)` if the map may be used, a precondition error otherwise.
    pub fn gate(&self, map: &SuperMap, force: bool, context: &str) -> Result<bool> {
        let unmet = self.unmet(map)?;
        if unmet.is_empty() {
            Ok(false)
        } else if force {
            Ok(true)
        } else {
            Err(Error::Precondition(format!("{context}: map is not certified {}", unmet.join(", "))))
        }
    }
}

pub(crate) fn as_psd(m: &ComplexMatrix, what: &str) -> Result<PsdMatrix> {
    PsdMatrix::from_matrix(m, &Tolerances::default()).map_err(|e| Error::InvalidInput(format!("{what}: {e}")))
}

pub(crate) fn as_pd(m: &ComplexMatrix, what: &str) -> Result<PdMatrix> {
    PdMatrix::from_matrix(m, &Tolerances::default()).map_err(|e| match e {
        Error::SingularMatrix { .. } => e,
        other => Error::InvalidInput(format!("{what}: {other}")),
    })
}

/// PSD image of a map, symmetrized against rounding.
pub(crate) fn image_psd(m: &ComplexMatrix) -> Result<PsdMatrix> {
    PsdMatrix::from_symmetrized(m, &Tolerances::default())
}

/// PD image of a map; a singular image is a [`Error::SingularMatrix`].
pub(crate) fn image_pd(m: &ComplexMatrix) -> Result<PdMatrix> {
    let t = Tolerances::default();
    PsdMatrix::from_symmetrized(m, &t)?.into_pd_default(&t)
}

pub(crate) fn require_invertible(b: &ComplexMatrix, what: &str) -> Result<()> {
    b.require_square("require_invertible")?;
    let sv = b.singular_values();
    let hi = sv.iter().copied().fold(0.0, f64::max);
    let lo = sv.iter().copied().fold(f64::INFINITY, f64::min);
    if !(lo > 1e-12 * hi.max(f64::MIN_POSITIVE)) {
        return Err(Error::SingularMatrix { min_eig: lo, floor: 1e-12 * hi });
    }
    let _ = what;
    Ok(())
}
