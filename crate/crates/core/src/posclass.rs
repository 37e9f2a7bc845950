//! Membership tests for positive, k-positive, completely positive, Schwarz
//! and generalized Schwarz maps.
//!
//! Certification only ever comes from a finite certificate (a PSD Choi
//! matrix, possibly combined with `Φ(1) ⪯ 1`). Sampling can only falsify;
//! when it finds nothing the verdict is `Unknown`.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ensembles::{gen_gaussian, splitmix64, stream_from_seed};
use crate::error::{Error, Result};
use crate::matcore::{eig_of_matrix, pinv, ComplexMatrix, HermitianMatrix, PsdMatrix, Tolerances, C64, ZERO};
use crate::supermap::SuperMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Certified,
    Falsified,
    Unknown,
}

/// What a witness was tested against.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Probe {
    Choi,
    RankOne { k: usize },
    Schwarz,
    GeneralizedSchwarz,
    Inequality { id: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassVerdict {
    pub verdict: Verdict,
    /// `K`, a column vector, or the primary matrix of an inequality witness.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<ComplexMatrix>,
    /// Second witness matrix for inequality falsifiers.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness_aux: Option<ComplexMatrix>,
    /// Defect minimum eigenvalue at the witness, or the worst value seen.
    pub min_eig: f64,
    pub trials: usize,
    pub tol: f64,
    pub probe: Probe,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub certificate: Option<String>,
}

impl ClassVerdict {
    pub fn is_certified(&self) -> bool {
        self.verdict == Verdict::Certified
    }

    pub fn is_falsified(&self) -> bool {
        self.verdict == Verdict::Falsified
    }
}

/// Source of probe matrices: optional matrix units, then Gaussian draws.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sampler {
    pub seed: u64,
    pub matrix_units: bool,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Self { seed, matrix_units: true }
    }

    pub fn gaussian_only(seed: u64) -> Self {
        Self { seed, matrix_units: false }
    }

    /// Stream for probe `index`, independent of evaluation order.
    pub fn stream(&self, index: usize) -> crate::ensembles::Stream {
        stream_from_seed(splitmix64(self.seed ^ splitmix64(index as u64)))
    }

    pub(crate) fn square_probes(&self, n: usize, trials: usize) -> usize {
        if self.matrix_units {
            n * n + trials
        } else {
            trials
        }
    }

    pub(crate) fn square_probe(&self, n: usize, index: usize) -> ComplexMatrix {
        if self.matrix_units && index < n * n {
            ComplexMatrix::unit(n, index / n, index % n)
        } else {
            gen_gaussian(n, n, &mut self.stream(index))
        }
    }
}

fn herm_min(m: &ComplexMatrix) -> Result<f64> {
    Ok(eig_of_matrix(m)?.min())
}

/// `Φ(K†K) − Φ(K)†Φ(K)`.
pub fn schwarz_defect(map: &SuperMap, k: &ComplexMatrix) -> Result<HermitianMatrix> {
    k.require_dim(map.d_in(), "schwarz_defect")?;
    let fk = map.apply(k)?;
    let d = &map.apply(&k.adjoint().matmul(k))? - &fk.adjoint().matmul(&fk);
    Ok(HermitianMatrix::symmetrize(&d))
}

/// `[[Φ(1), Φ(K)], [Φ(K)†, Φ(K†K)]]`.
pub fn gen_schwarz_block(map: &SuperMap, k: &ComplexMatrix) -> Result<HermitianMatrix> {
    k.require_dim(map.d_in(), "gen_schwarz_block")?;
    let one = map.apply(&ComplexMatrix::identity(map.d_in()))?;
    let fk = map.apply(k)?;
    let fkk = map.apply(&k.adjoint().matmul(k))?;
    Ok(HermitianMatrix::symmetrize(&ComplexMatrix::block2(&one, &fk, &fk.adjoint(), &fkk)?))
}

fn schwarz_scale(map: &SuperMap, k: &ComplexMatrix) -> Result<f64> {
    let fk = map.apply(k)?;
    let fkk = map.apply(&k.adjoint().matmul(k))?;
    Ok(1.0_f64.max(fkk.op_norm()).max(fk.op_norm().powi(2)))
}

fn gen_scale(map: &SuperMap, k: &ComplexMatrix) -> Result<f64> {
    let one = map.apply(&ComplexMatrix::identity(map.d_in()))?;
    Ok(schwarz_scale(map, k)?.max(one.op_norm()))
}

/// Certified iff the Choi matrix is PSD within `tol·‖C‖`.
pub fn check_cp(map: &SuperMap, tol: f64) -> ClassVerdict {
    let spec = eig_of_matrix(map.choi()).expect("Choi matrices of finite maps are finite");
    let min = spec.min();
    let bound = tol * spec.norm().max(f64::MIN_POSITIVE);
    if min >= -bound {
        ClassVerdict {
            verdict: Verdict::Certified,
            witness: None,
            witness_aux: None,
            min_eig: min,
            trials: 0,
            tol,
            probe: Probe::Choi,
            certificate: Some("choi_psd".into()),
        }
    } else {
        ClassVerdict {
            verdict: Verdict::Falsified,
            witness: Some(ComplexMatrix::column(&spec.eigenvector(0))),
            witness_aux: None,
            min_eig: min,
            trials: 0,
            tol,
            probe: Probe::Choi,
            certificate: None,
        }
    }
}

fn certified_by(cp: &ClassVerdict, probe: Probe, certificate: &str) -> ClassVerdict {
    ClassVerdict { probe, certificate: Some(certificate.into()), ..cp.clone() }
}

/// Outcome of evaluating one probe.
struct ProbeResult {
    min_eig: f64,
    violated: bool,
    witness: ComplexMatrix,
}

fn run_probes(count: usize, eval: impl Fn(usize) -> Result<ProbeResult> + Sync) -> Result<(Option<(usize, ProbeResult)>, f64)> {
    let results: Vec<Result<ProbeResult>> = (0..count).into_par_iter().map(&eval).collect();
    let mut worst = f64::INFINITY;
    for (i, r) in results.into_iter().enumerate() {
        let r = r?;
        worst = worst.min(r.min_eig);
        if r.violated {
            return Ok((Some((i, r)), worst));
        }
    }
    Ok((None, worst))
}

fn sampled_verdict(
    found: Option<(usize, ProbeResult)>,
    worst: f64,
    total: usize,
    tol: f64,
    probe: Probe,
) -> ClassVerdict {
    match found {
        Some((i, r)) => ClassVerdict {
            verdict: Verdict::Falsified,
            witness: Some(r.witness),
            witness_aux: None,
            min_eig: r.min_eig,
            trials: i + 1,
            tol,
            probe,
            certificate: None,
        },
        None => ClassVerdict {
            verdict: Verdict::Unknown,
            witness: None,
            witness_aux: None,
            min_eig: if worst.is_finite() { worst } else { 0.0 },
            trials: total.max(1),
            tol,
            probe,
            certificate: None,
        },
    }
}

/// Rank-one probe vectors: maximally entangled and basis vectors, then Gaussian.
fn rank_one_probe(sampler: &Sampler, n: usize, k: usize, index: usize) -> Vec<C64> {
    let dim = n * k;
    let fixed = if sampler.matrix_units { dim + 1 } else { 0 };
    if index < fixed {
        if index == 0 {
            // Σ_a e_a ⊗ e_a in block layout: block a, entry a
            let mut v = vec![ZERO; dim];
            for a in 0..n.min(k) {
                v[a * n + a] = C64::new(1.0, 0.0);
            }
            return v;
        }
        let mut v = vec![ZERO; dim];
        v[index - 1] = C64::new(1.0, 0.0);
        return v;
    }
    let g = gen_gaussian(dim, 1, &mut sampler.stream(index));
    g.vec_col()
}

/// Falsifies k-positivity on rank-one inputs; certifies only through CP.
pub fn check_k_positive(map: &SuperMap, k: usize, sampler: &Sampler, trials: usize, tol: f64) -> Result<ClassVerdict> {
    if k == 0 {
        return Err(Error::InvalidInput("k must be at least 1".into()));
    }
    let probe = Probe::RankOne { k };
    let cp = check_cp(map, tol);
    if cp.is_certified() {
        return Ok(certified_by(&cp, probe, "choi_psd"));
    }
    let lifted = map.tensor_with_identity(k)?;
    let n = map.d_in();
    let fixed = if sampler.matrix_units { n * k + 1 } else { 0 };
    let total = fixed + trials;
    let (found, worst) = run_probes(total, |i| {
        let v = rank_one_probe(sampler, n, k, i);
        let col = ComplexMatrix::column(&v);
        let out = lifted.apply(&col.matmul(&col.adjoint()))?;
        let min = herm_min(&out)?;
        let scale = 1.0_f64.max(out.op_norm());
        Ok(ProbeResult { min_eig: min, violated: min < -tol * scale, witness: col })
    })?;
    Ok(sampled_verdict(found, worst, total, tol, probe))
}

/// Schwarz inequality `Φ(K†K) ⪰ Φ(K)†Φ(K)`.
///
/// Certified when the map is CP and `Φ(1) ⪯ 1`: then the generalized block
/// with `Φ(1)` replaced by `1` stays PSD and its Schur complement is the
/// Schwarz defect. Otherwise probes matrix units and Gaussian `K`.
pub fn check_schwarz(map: &SuperMap, sampler: &Sampler, trials: usize, tol: f64) -> Result<ClassVerdict> {
    let cp = check_cp(map, tol);
    if cp.is_certified() {
        let one = map.apply(&ComplexMatrix::identity(map.d_in()))?;
        let slack = &ComplexMatrix::identity(map.d_out()) - &one;
        if herm_min(&slack)? >= -tol * 1.0_f64.max(one.op_norm()) {
            return Ok(certified_by(&cp, Probe::Schwarz, "choi_psd_and_subunital"));
        }
    }
    let n = map.d_in();
    let total = sampler.square_probes(n, trials);
    let (found, worst) = run_probes(total, |i| {
        let k = sampler.square_probe(n, i);
        let min = schwarz_defect(map, &k)?.eig()?.min();
        let scale = schwarz_scale(map, &k)?;
        Ok(ProbeResult { min_eig: min, violated: min < -tol * scale, witness: k })
    })?;
    Ok(sampled_verdict(found, worst, total, tol, Probe::Schwarz))
}

/// PSD of `[[Φ(1), Φ(K)], [Φ(K)†, Φ(K†K)]]`; certified by CP (2-positivity suffices).
pub fn check_generalized_schwarz(map: &SuperMap, sampler: &Sampler, trials: usize, tol: f64) -> Result<ClassVerdict> {
    let cp = check_cp(map, tol);
    if cp.is_certified() {
        return Ok(certified_by(&cp, Probe::GeneralizedSchwarz, "choi_psd"));
    }
    let n = map.d_in();
    let total = sampler.square_probes(n, trials);
    let (found, worst) = run_probes(total, |i| {
        let k = sampler.square_probe(n, i);
        let min = gen_schwarz_block(map, &k)?.eig()?.min();
        let scale = gen_scale(map, &k)?;
        Ok(ProbeResult { min_eig: min, violated: min < -tol * scale, witness: k })
    })?;
    Ok(sampled_verdict(found, worst, total, tol, Probe::GeneralizedSchwarz))
}

/// Recomputes the defect minimum eigenvalue at a stored witness.
pub fn reevaluate_witness(map: &SuperMap, verdict: &ClassVerdict) -> Result<f64> {
    let w = verdict
        .witness
        .as_ref()
        .ok_or_else(|| Error::InvalidInput("verdict carries no witness".into()))?;
    match &verdict.probe {
        Probe::Choi => {
            let v = w.vec_col();
            let cv = map.choi().matmul(w);
            let num: C64 = v.iter().zip(cv.vec_col()).map(|(a, b)| a.conj() * b).sum();
            Ok(num.re / w.frobenius_norm().powi(2))
        }
        Probe::RankOne { k } => {
            let out = map.tensor_with_identity(*k)?.apply(&w.matmul(&w.adjoint()))?;
            herm_min(&out)
        }
        Probe::Schwarz => Ok(schwarz_defect(map, w)?.eig()?.min()),
        Probe::GeneralizedSchwarz => Ok(gen_schwarz_block(map, w)?.eig()?.min()),
        Probe::Inequality { id } => Err(Error::InvalidInput(format!(
            "inequality witness '{id}' is re-evaluated by the inequality registry"
        ))),
    }
}

/// Verdicts for the whole hierarchy at one tolerance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub d_in: usize,
    pub d_out: usize,
    pub positive: ClassVerdict,
    pub two_positive: ClassVerdict,
    pub completely_positive: ClassVerdict,
    pub schwarz: ClassVerdict,
    pub generalized_schwarz: ClassVerdict,
}

pub fn classify(map: &SuperMap, sampler: &Sampler, trials: usize, tol: f64) -> Result<Classification> {
    Ok(Classification {
        d_in: map.d_in(),
        d_out: map.d_out(),
        positive: check_k_positive(map, 1, sampler, trials, tol)?,
        two_positive: check_k_positive(map, 2, sampler, trials, tol)?,
        completely_positive: check_cp(map, tol),
        schwarz: check_schwarz(map, sampler, trials, tol)?,
        generalized_schwarz: check_generalized_schwarz(map, sampler, trials, tol)?,
    })
}

/// Block PSD test via the generalized Schur complement.
///
/// Returns `Some(B ⪰ Z†A⁺Z)` when `range(Z) ⊆ range(A)` within `tol`, and
/// `None` when the range condition fails (the block is then not PSD unless
/// `Z` vanishes on that part).
pub fn schur_block_psd(a: &PsdMatrix, z: &ComplexMatrix, b: &HermitianMatrix, tol: f64) -> Result<Option<bool>> {
    let n = a.dim();
    if z.rows() != n || z.cols() != b.dim() {
        return Err(Error::DimensionMismatch {
            context: "schur_block_psd",
            expected: format!("{}x{}", n, b.dim()),
            got: format!("{}x{}", z.rows(), z.cols()),
        });
    }
    let t = Tolerances { pinv_cut: tol, ..Tolerances::default() };
    let ap = pinv(a, &t);
    let proj = a.matrix().matmul(ap.matrix());
    let leak = (&ComplexMatrix::identity(n) - &proj).matmul(z);
    let scale = 1.0_f64.max(z.op_norm());
    if leak.op_norm() > tol.sqrt() * scale {
        return Ok(None);
    }
    let schur = b.matrix() - &z.adjoint().matmul(ap.matrix()).matmul(z);
    let min = herm_min(&schur)?;
    let scale = 1.0_f64.max(b.matrix().op_norm()).max(z.op_norm().powi(2) / a.norm().max(f64::MIN_POSITIVE));
    Ok(Some(min >= -tol * scale))
}

/// Draws a block instance for the Schur equivalence: `A` PSD of random rank,
/// `Z = A·W` (so the range condition holds), `B = Z†A⁺Z + S` where `S` is a
/// positive multiple of a PD matrix, its negative, or a random Hermitian
/// matrix, with equal probability.
pub fn sample_block_instance(n: usize, m: usize, rng: &mut impl Rng) -> (PsdMatrix, ComplexMatrix, HermitianMatrix) {
    let rank = rng.random_range(1..=n);
    let a = crate::ensembles::gen_psd(n, rank, rng);
    let w = gen_gaussian(n, m, rng);
    let z = a.matrix().matmul(&w);
    let ap = pinv(&a, &Tolerances::default());
    let base = z.adjoint().matmul(ap.matrix()).matmul(&z);
    let delta: f64 = rng.random_range(0.05..1.0);
    let shift = match rng.random_range(0..3) {
        0 => crate::ensembles::gen_pd(m, rng, 0.1).expect("floor is positive").matrix().scale(delta),
        1 => crate::ensembles::gen_pd(m, rng, 0.1).expect("floor is positive").matrix().scale(-delta),
        _ => crate::ensembles::gen_hermitian(m, rng).scale(delta),
    };
    let b = HermitianMatrix::symmetrize(&(&base + &shift));
    (a, z, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::supermap::{depolarizing, identity_map, pinching, transpose_map, unitary_conj};

    const TOL: f64 = 1e-10;

    #[test]
    fn schwarz_defect_examples() {
        let k = ComplexMatrix::from_fn(2, 2, |i, j| C64::new(i as f64 - 0.3 * j as f64, 0.7));
        let zero = schwarz_defect(&identity_map(2), &k).unwrap();
        assert!(zero.matrix().max_abs() < 1e-14);
        let e12 = ComplexMatrix::unit(2, 0, 1);
        let d = schwarz_defect(&transpose_map(2), &e12).unwrap();
        assert_eq!(d.matrix(), &ComplexMatrix::from_real_diagonal(&[-1.0, 1.0]));
        let p = schwarz_defect(&pinching(2), &e12).unwrap();
        assert_eq!(p.matrix(), &ComplexMatrix::unit(2, 1, 1));
        assert!(schwarz_defect(&pinching(2), &ComplexMatrix::identity(3)).is_err());
    }

    #[test]
    fn gen_block_examples() {
        let e12 = ComplexMatrix::unit(2, 0, 1);
        let blk = gen_schwarz_block(&transpose_map(2), &e12).unwrap();
        let min = blk.eig().unwrap().min();
        assert!((min - (1.0 - 5f64.sqrt()) / 2.0).abs() < 1e-12);
        let k = ComplexMatrix::from_fn(2, 2, |i, j| C64::new(1.0 + i as f64, j as f64));
        let blk = gen_schwarz_block(&identity_map(2), &k).unwrap();
        assert!(blk.eig().unwrap().min() > -1e-12);
    }

    #[test]
    fn cp_examples() {
        let t = check_cp(&transpose_map(2), TOL);
        assert!(t.is_falsified());
        assert!((t.min_eig + 1.0).abs() < 1e-12);
        assert!((reevaluate_witness(&transpose_map(2), &t).unwrap() + 1.0).abs() < 1e-12);
        assert!(check_cp(&depolarizing(2, 0.5).unwrap(), TOL).is_certified());
        // λ = −1/3 is the CP boundary on M_2, λ = −1/2 is positive only
        assert!(check_cp(&depolarizing(2, -1.0 / 3.0).unwrap(), TOL).is_certified());
        assert!(check_cp(&depolarizing(2, -0.5).unwrap(), TOL).is_falsified());
    }

    #[test]
    fn k_positive_examples() {
        let s = Sampler::new(5);
        let t2 = check_k_positive(&transpose_map(2), 2, &s, 50, TOL).unwrap();
        assert!(t2.is_falsified());
        assert_eq!(t2.trials, 1, "maximally entangled probe comes first");
        assert!(reevaluate_witness(&transpose_map(2), &t2).unwrap() < -TOL);
        let t1 = check_k_positive(&transpose_map(2), 1, &s, 200, TOL).unwrap();
        assert_eq!(t1.verdict, Verdict::Unknown);
        assert!(t1.trials > 0);
        assert!(check_k_positive(&pinching(3), 4, &s, 10, TOL).unwrap().is_certified());
        assert!(check_k_positive(&pinching(3), 0, &s, 10, TOL).is_err());
    }

    #[test]
    fn schwarz_examples() {
        let s = Sampler::new(11);
        let u = ComplexMatrix::new(2, 2, vec![C64::new(0.0, 1.0), ZERO, ZERO, C64::new(1.0, 0.0)]).unwrap();
        assert!(check_schwarz(&unitary_conj(&u).unwrap(), &s, 10, TOL).unwrap().is_certified());
        assert!(check_schwarz(&depolarizing(2, 0.5).unwrap(), &s, 10, TOL).unwrap().is_certified());
        let t = check_schwarz(&transpose_map(2), &s, 10, TOL).unwrap();
        assert!(t.is_falsified());
        assert_eq!(t.witness.as_ref().unwrap(), &ComplexMatrix::unit(2, 0, 1));
        assert!((t.min_eig + 1.0).abs() < 1e-10);
        assert!((reevaluate_witness(&transpose_map(2), &t).unwrap() + 1.0).abs() < 1e-10);
        let g = check_generalized_schwarz(&transpose_map(2), &s, 10, TOL).unwrap();
        assert!(g.is_falsified());
    }

    #[test]
    fn cp_but_not_subunital_is_sampled() {
        let doubled = SuperMap::from_kraus(&[ComplexMatrix::identity(2).scale(2f64.sqrt())]).unwrap();
        // 2K†K − 4K†K ⪯ 0
        assert!(check_schwarz(&doubled, &Sampler::new(1), 20, TOL).unwrap().is_falsified());
        assert!(check_generalized_schwarz(&doubled, &Sampler::new(1), 20, TOL).unwrap().is_certified());
        let half = SuperMap::from_kraus(&[ComplexMatrix::identity(2).scale(0.5f64.sqrt())]).unwrap();
        assert!(check_schwarz(&half, &Sampler::new(1), 20, TOL).unwrap().is_certified());
        // a CP map with Φ(1) ⋠ 1 can violate the plain Schwarz inequality
        let proj = SuperMap::from_kraus(&[ComplexMatrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 0.0]])]).unwrap();
        assert!(check_schwarz(&proj, &Sampler::new(1), 50, TOL).unwrap().is_falsified());
    }

    #[test]
    fn verdict_json_shape() {
        let t = check_schwarz(&transpose_map(2), &Sampler::new(3), 5, TOL).unwrap();
        let v: serde_json::Value = serde_json::to_value(&t).unwrap();
        assert_eq!(v["verdict"], "Falsified");
        assert!(v["witness"]["rows"].is_number());
        assert!(v["min_eig"].is_number());
        assert!(v["trials"].is_number());
        let back: ClassVerdict = serde_json::from_value(v).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn schur_examples() {
        let a = PsdMatrix::from_matrix(&ComplexMatrix::from_real_diagonal(&[1.0, 0.0]), &Tolerances::default()).unwrap();
        let z_in = ComplexMatrix::from_real_rows(&[&[1.0], &[0.0]]);
        let z_out = ComplexMatrix::from_real_rows(&[&[0.0], &[1.0]]);
        let b = HermitianMatrix::from_real_diagonal(&[2.0]);
        assert_eq!(schur_block_psd(&a, &z_in, &b, TOL).unwrap(), Some(true));
        assert_eq!(schur_block_psd(&a, &z_out, &b, TOL).unwrap(), None);
        let small = HermitianMatrix::from_real_diagonal(&[0.5]);
        assert_eq!(schur_block_psd(&a, &z_in, &small, TOL).unwrap(), Some(false));
    }
}
