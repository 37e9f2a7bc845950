//! Suite runner: configuration, parallel execution over seeded trials and the
//! JSON report.

mod catalog;

pub use catalog::{all_ids, parse as parse_check, Entry, Scope, BOUNDARY_Y, GRID, PD_FLOOR};

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ensembles::{FamilyKind, SeedPlan};
use crate::error::{Error, Result};
use crate::inequalities::{
    evaluate, falsifier_instance, falsify_class_via_inequality, replay, CheckOutcome, Instance, Snapshot, CLASS_TOL,
    SNAPSHOT_VERSION,
};
use crate::matcore::ComplexMatrix;
use crate::posclass::{check_schwarz, schwarz_defect, ClassVerdict, Sampler, Verdict};
use crate::supermap::transpose_map;
use catalog::{Kind, TrialCtx};

/// Report schema identifier; bump on incompatible layout changes.
pub const REPORT_SCHEMA: &str = "tracemono-report/1";

/// Directory, next to the report, that receives worst-instance snapshots.
pub const SNAPSHOT_DIR: &str = "snapshots";

/// Seed-plan suite label used for every stream of [`run_suite`].
const SUITE_LABEL: &str = "run";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    /// Check ids, or `["all"]`.
    pub suites: Vec<String>,
    pub dims: Vec<(usize, usize)>,
    pub trials: usize,
    pub master_seed: u64,
    pub tol_rel: f64,
    pub families: Vec<FamilyKind>,
    /// Report path; snapshots go to `snapshots/` beside it.
    #[serde(skip)]
    pub output: Option<PathBuf>,
    pub force_out_of_hypothesis: bool,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            suites: vec!["all".into()],
            dims: square_dims(&[2, 3, 4]),
            trials: 500,
            master_seed: 0,
            tol_rel: 1e-8,
            families: FamilyKind::ALL.to_vec(),
            output: None,
            force_out_of_hypothesis: false,
        }
    }
}

/// All pairs `(d_in, d_out)` over `ds × ds`.
pub fn square_dims(ds: &[usize]) -> Vec<(usize, usize)> {
    ds.iter().flat_map(|&a| ds.iter().map(move |&b| (a, b))).collect()
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if !(self.tol_rel > 0.0) || !self.tol_rel.is_finite() {
            return Err(Error::Config(format!("tol_rel must be positive, got {}", self.tol_rel)));
        }
        if self.dims.is_empty() {
            return Err(Error::Config("dims must not be empty".into()));
        }
        if let Some((a, b)) = self.dims.iter().find(|(a, b)| *a == 0 || *b == 0) {
            return Err(Error::Config(format!("dimensions must be positive, got ({a}, {b})")));
        }
        if self.families.is_empty() {
            return Err(Error::Config("at least one map family is required".into()));
        }
        if self.suites.is_empty() {
            return Err(Error::Config("no suites selected".into()));
        }
        self.entries().map(|_| ())
    }

    /// Selected checks, deduplicated, in catalog order for `"all"` and in
    /// the given order otherwise.
    pub fn entries(&self) -> Result<Vec<Entry>> {
        let ids = if self.suites.iter().any(|s| s == "all") { all_ids() } else { self.suites.clone() };
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for id in ids {
            if seen.insert(id.clone()) {
                out.push(catalog::parse(&id)?);
            }
        }
        Ok(out)
    }

    fn distinct_dims(&self) -> Vec<usize> {
        let set: BTreeSet<usize> = self.dims.iter().flat_map(|&(a, b)| [a, b]).collect();
        set.into_iter().collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckAggregate {
    pub check_id: String,
    pub d_in: usize,
    pub d_out: usize,
    /// Evaluated outcomes (boundary checks count every sampled point).
    pub trials: usize,
    pub passes: usize,
    /// Violations plus evaluation errors.
    pub failures: usize,
    pub errors: usize,
    /// Outcomes that ran outside the theorem's hypotheses.
    pub exploratory: usize,
    /// Failures among outcomes within the hypotheses.
    pub hypothesis_failures: usize,
    pub worst_margin: Option<f64>,
    /// Path of the worst-instance snapshot relative to the report.
    pub worst_snapshot: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub error_messages: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictSummary {
    pub check_id: String,
    pub map: String,
    pub verdict: Verdict,
    pub expected: Verdict,
    pub as_expected: bool,
    pub min_eig: f64,
    pub trials: usize,
    pub witness: Option<ComplexMatrix>,
    pub witness_aux: Option<ComplexMatrix>,
    /// Replayable witness instance, relative to the report.
    pub snapshot: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Skipped {
    pub check_id: String,
    pub d_in: usize,
    pub d_out: usize,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Environment {
    pub package: String,
    pub version: String,
    pub snapshot_version: u32,
    pub seed_plan: SeedPlan,
    pub suite_label: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub checks: usize,
    pub trials: usize,
    pub failures: usize,
    pub hypothesis_failures: usize,
    pub errors: usize,
    pub unexpected_verdicts: usize,
    pub exit_code: i32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub schema: String,
    pub environment: Environment,
    pub config: SuiteConfig,
    pub checks: Vec<CheckAggregate>,
    pub verdicts: Vec<VerdictSummary>,
    pub skipped: Vec<Skipped>,
    pub summary: Summary,
    /// Worst-instance snapshots keyed by their report-relative path.
    #[serde(skip)]
    pub snapshots: Vec<(String, Snapshot)>,
}

impl SuiteReport {
    /// 0 when every check within its hypotheses passed and every expected
    /// falsification happened; 1 on such a failure; 2 when evaluations errored.
    pub fn exit_code(&self) -> i32 {
        self.summary.exit_code
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    /// Writes the report and its snapshots (under [`SNAPSHOT_DIR`] beside it).
    pub fn write(&self, path: &Path) -> Result<()> {
        let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
        std::fs::create_dir_all(dir.join(SNAPSHOT_DIR))?;
        for (rel, snap) in &self.snapshots {
            std::fs::write(dir.join(rel), serde_json::to_string_pretty(snap)? + "\n")?;
        }
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn snapshot(&self, rel: &str) -> Option<&Snapshot> {
        self.snapshots.iter().find(|(r, _)| r == rel).map(|(_, s)| s)
    }

    pub fn aggregate(&self, check_id: &str, d_in: usize, d_out: usize) -> Option<&CheckAggregate> {
        self.checks.iter().find(|c| c.check_id == check_id && c.d_in == d_in && c.d_out == d_out)
    }
}

fn snapshot_name(check_id: &str, d_in: usize, d_out: usize) -> String {
    let safe: String = check_id.chars().map(|c| if c.is_ascii_alphanumeric() || c == '_' { c } else { '_' }).collect();
    format!("{SNAPSHOT_DIR}/{safe}_{d_in}x{d_out}.json")
}

/// Per-trial reduction: one record per check id, keeping only the worst outcome.
struct TrialRecord {
    check_id: String,
    outcomes: usize,
    passes: usize,
    exploratory: usize,
    hypothesis_failures: usize,
    worst: CheckOutcome,
}

fn reduce_trial(outcomes: Vec<CheckOutcome>) -> Vec<TrialRecord> {
    let mut out: Vec<TrialRecord> = Vec::new();
    for o in outcomes {
        let idx = match out.iter().position(|r| r.check_id == o.check_id) {
            Some(i) => i,
            None => {
                out.push(TrialRecord {
                    check_id: o.check_id.clone(),
                    outcomes: 0,
                    passes: 0,
                    exploratory: 0,
                    hypothesis_failures: 0,
                    worst: o.clone(),
                });
                out.len() - 1
            }
        };
        let r = &mut out[idx];
        r.outcomes += 1;
        r.passes += o.holds as usize;
        r.exploratory += o.exploratory as usize;
        r.hypothesis_failures += (!o.holds && !o.exploratory) as usize;
        if o.margin < r.worst.margin {
            r.worst = o;
        }
    }
    out
}

struct Task {
    entry: Entry,
    d_in: usize,
    d_out: usize,
}

fn tasks(config: &SuiteConfig, entries: &[Entry]) -> Vec<Task> {
    let mut out = Vec::new();
    for e in entries {
        match e.scope {
            Scope::Pair => {
                out.extend(config.dims.iter().map(|&(d_in, d_out)| Task { entry: e.clone(), d_in, d_out }))
            }
            Scope::Dim => out.extend(config.distinct_dims().into_iter().map(|m| Task { entry: e.clone(), d_in: m, d_out: m })),
            Scope::Once => {}
        }
    }
    out
}

fn run_task(config: &SuiteConfig, plan: &SeedPlan, task: &Task) -> Vec<(CheckAggregate, Option<(String, Snapshot)>)> {
    let ctx = TrialCtx {
        d_in: task.d_in,
        d_out: task.d_out,
        families: &config.families,
        force: config.force_out_of_hypothesis,
        tol: config.tol_rel,
    };
    let key = format!("{}@{}x{}", task.entry.id, task.d_in, task.d_out);
    let results: Vec<std::result::Result<Vec<TrialRecord>, String>> = (0..config.trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = plan.stream(SUITE_LABEL, &key, i as u64);
            catalog::run_trial(task.entry.kind, &ctx, i, &mut rng).map(reduce_trial).map_err(|e| e.to_string())
        })
        .collect();

    let mut aggs: Vec<(CheckAggregate, Option<CheckOutcome>)> = Vec::new();
    let mut errors = Vec::new();
    for r in results {
        match r {
            Err(msg) => errors.push(msg),
            Ok(records) => {
                for rec in records {
                    let idx = match aggs.iter().position(|(a, _)| a.check_id == rec.check_id) {
                        Some(i) => i,
                        None => {
                            aggs.push((empty_aggregate(&rec.check_id, task.d_in, task.d_out), None));
                            aggs.len() - 1
                        }
                    };
                    let (agg, worst) = &mut aggs[idx];
                    agg.trials += rec.outcomes;
                    agg.passes += rec.passes;
                    agg.failures += rec.outcomes - rec.passes;
                    agg.exploratory += rec.exploratory;
                    agg.hypothesis_failures += rec.hypothesis_failures;
                    if worst.as_ref().is_none_or(|w| rec.worst.margin < w.margin) {
                        *worst = Some(rec.worst);
                    }
                }
            }
        }
    }
    if aggs.is_empty() {
        aggs.push((empty_aggregate(&task.entry.id, task.d_in, task.d_out), None));
    }
    // errors are charged to the first aggregate of the task
    let first = &mut aggs[0].0;
    first.trials += errors.len();
    first.failures += errors.len();
    first.errors += errors.len();
    first.error_messages = errors.into_iter().collect::<BTreeSet<_>>().into_iter().take(5).collect();
    aggs.into_iter()
        .map(|(mut agg, worst)| {
            let snap = worst.map(|w| {
                let rel = snapshot_name(&agg.check_id, agg.d_in, agg.d_out);
                agg.worst_margin = Some(w.margin);
                agg.worst_snapshot = Some(rel.clone());
                (rel, w.snapshot)
            });
            (agg, snap)
        })
        .collect()
}

fn empty_aggregate(check_id: &str, d_in: usize, d_out: usize) -> CheckAggregate {
    CheckAggregate {
        check_id: check_id.to_string(),
        d_in,
        d_out,
        trials: 0,
        passes: 0,
        failures: 0,
        errors: 0,
        exploratory: 0,
        hypothesis_failures: 0,
        worst_margin: None,
        worst_snapshot: None,
        error_messages: Vec::new(),
    }
}

/// Runs a falsification target; the transpose is expected to be falsified.
fn run_falsifier(config: &SuiteConfig, plan: &SeedPlan, entry: &Entry) -> Result<(VerdictSummary, Option<Snapshot>)> {
    let seed = plan.stream_seed(SUITE_LABEL, &entry.id, 0);
    let sampler = Sampler::new(seed);
    let (map, verdict, instance): (_, ClassVerdict, Option<Instance>) = match entry.kind {
        Kind::SchwarzFalsify { n } => {
            let map = transpose_map(n);
            let v = check_schwarz(&map, &sampler, config.trials, CLASS_TOL)?;
            // the defect eigenvector turns the witness into a replayable endpoint instance
            let inst = match &v.witness {
                Some(k) if v.is_falsified() => {
                    let spec = schwarz_defect(&map, k)?.eig()?;
                    let p = ComplexMatrix::column(&spec.eigenvector(0));
                    Some(falsifier_instance(crate::inequalities::FalsifierId::L1MEndpointP0, &map, k, &p.matmul(&p.adjoint())))
                }
                _ => None,
            };
            (map, v, inst)
        }
        Kind::InequalityFalsify { id, n } => {
            let map = transpose_map(n);
            let v = falsify_class_via_inequality(id, &map, &sampler, config.trials, CLASS_TOL)?;
            let inst = match (&v.witness, &v.witness_aux) {
                (Some(k), Some(aux)) => Some(falsifier_instance(id, &map, k, aux)),
                _ => None,
            };
            (map, v, inst)
        }
        _ => unreachable!("run_falsifier called with a trial check"),
    };
    let snapshot = match instance {
        Some(inst) => Some(evaluate(&entry.id, &inst, CLASS_TOL)?.snapshot),
        None => None,
    };
    let rel = snapshot.as_ref().map(|_| snapshot_name(&entry.id, map.d_in(), map.d_out()));
    let summary = VerdictSummary {
        check_id: entry.id.clone(),
        map: map.label().to_string(),
        verdict: verdict.verdict,
        expected: Verdict::Falsified,
        as_expected: verdict.is_falsified(),
        min_eig: verdict.min_eig,
        trials: verdict.trials,
        witness: verdict.witness,
        witness_aux: verdict.witness_aux,
        snapshot: rel,
    };
    Ok((summary, snapshot))
}

/// Executes every selected check. Writes the report (and snapshots) when
/// `config.output` is set.
pub fn run_suite(config: &SuiteConfig) -> Result<SuiteReport> {
    config.validate()?;
    let entries = config.entries()?;
    let plan = SeedPlan::new(config.master_seed);
    let mut checks = Vec::new();
    let mut skipped = Vec::new();
    let mut snapshots = Vec::new();
    for task in tasks(config, &entries) {
        if task.entry.kind.uses_families()
            && catalog::eligible(task.entry.kind, &config.families, task.d_in, task.d_out).is_empty()
        {
            skipped.push(Skipped {
                check_id: task.entry.id.clone(),
                d_in: task.d_in,
                d_out: task.d_out,
                reason: "no selected map family supports these dimensions and hypotheses".into(),
            });
            continue;
        }
        for (agg, snap) in run_task(config, &plan, &task) {
            checks.push(agg);
            snapshots.extend(snap);
        }
    }
    let mut verdicts = Vec::new();
    for e in entries.iter().filter(|e| e.scope == Scope::Once) {
        let (v, snap) = run_falsifier(config, &plan, e)?;
        if let (Some(rel), Some(snap)) = (&v.snapshot, snap) {
            snapshots.push((rel.clone(), snap));
        }
        verdicts.push(v);
    }

    let hypothesis_failures: usize = checks.iter().map(|c| c.hypothesis_failures).sum();
    let errors: usize = checks.iter().map(|c| c.errors).sum();
    let unexpected = verdicts.iter().filter(|v| !v.as_expected).count();
    let exit_code = if errors > 0 {
        2
    } else if hypothesis_failures > 0 || unexpected > 0 {
        1
    } else {
        0
    };
    let summary = Summary {
        checks: checks.len(),
        trials: checks.iter().map(|c| c.trials).sum(),
        failures: checks.iter().map(|c| c.failures).sum(),
        hypothesis_failures,
        errors,
        unexpected_verdicts: unexpected,
        exit_code,
    };
    let report = SuiteReport {
        schema: REPORT_SCHEMA.to_string(),
        environment: Environment {
            package: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            snapshot_version: SNAPSHOT_VERSION,
            seed_plan: plan,
            suite_label: SUITE_LABEL.to_string(),
        },
        config: config.clone(),
        checks,
        verdicts,
        skipped,
        summary,
        snapshots,
    };
    if let Some(path) = &config.output {
        report.write(path)?;
    }
    Ok(report)
}

/// Result of replaying a stored snapshot.
#[derive(Debug, Clone, PartialEq)]
pub struct Replay {
    pub outcome: CheckOutcome,
    /// Recomputed `lhs`/`rhs` agree with the stored values within the stored tolerance.
    pub matches: bool,
}

/// Parses a snapshot document and re-evaluates it.
pub fn replay_str(json: &str) -> Result<Replay> {
    let value: serde_json::Value = serde_json::from_str(json)?;
    let version = value.get("version").and_then(|v| v.as_u64());
    if version != Some(SNAPSHOT_VERSION as u64) {
        return Err(Error::InvalidInput(format!(
            "snapshot version {} is not supported (expected {SNAPSHOT_VERSION})",
            version.map_or("missing".to_string(), |v| v.to_string())
        )));
    }
    let snapshot: Snapshot = serde_json::from_value(value)?;
    let outcome = replay(&snapshot)?;
    let matches = crate::inequalities::replay_matches(&snapshot, &outcome);
    Ok(Replay { outcome, matches })
}

pub fn replay_file(path: &Path) -> Result<Replay> {
    replay_str(&std::fs::read_to_string(path)?)
}
