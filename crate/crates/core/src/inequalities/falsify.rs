//! Class falsification through inequalities that characterize Schwarz maps.
//!
//! A violated endpoint inequality is a proof that the map is not Schwarz, so
//! these falsifiers never certify: the verdict is `Falsified` with the
//! violating pair or `Unknown`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{evaluate, Instance, TracialMode};
use crate::ensembles::{gen_psd, gen_unitary};
use crate::error::{Error, Result};
use crate::matcore::{eig_of_matrix, ComplexMatrix};
use crate::posclass::{check_k_positive, ClassVerdict, Probe, Sampler, Verdict};
use crate::supermap::SuperMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FalsifierId {
    /// `tr[Φ(K)†Φ(K) B] ≤ tr[Φ(K†K) B]` for `B ⪰ 0`.
    L1MEndpointP0,
    /// `tr[Φ†(K)† Φ†(Y)^{-1} Φ†(K)] ≤ tr[K† Y^{-1} K]` for `Y ≻ 0`.
    TracialAT0,
}

impl FalsifierId {
    pub fn check_id(self) -> &'static str {
        match self {
            FalsifierId::L1MEndpointP0 => "falsify:L1M_endpoint_p0",
            FalsifierId::TracialAT0 => "falsify:tracialA_t0",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "L1M_endpoint_p0" | "falsify:L1M_endpoint_p0" => Ok(FalsifierId::L1MEndpointP0),
            "tracialA_t0" | "falsify:tracialA_t0" => Ok(FalsifierId::TracialAT0),
            other => Err(Error::Unknown(format!("inequality falsifier '{other}'"))),
        }
    }
}

/// Forced instance whose violation falsifies the Schwarz property.
pub fn falsifier_instance(id: FalsifierId, map: &SuperMap, k: &ComplexMatrix, aux: &ComplexMatrix) -> Instance {
    match id {
        FalsifierId::L1MEndpointP0 => Instance::LiebConcave {
            map: map.clone(),
            k: k.clone(),
            a: ComplexMatrix::identity(map.d_out()),
            b: aux.clone(),
            s: 0.0,
            t: 1.0,
            force: true,
        },
        FalsifierId::TracialAT0 => {
            Instance::Tracial { mode: TracialMode::A, map: map.clone(), b: k.clone(), a: Some(aux.clone()), force: true }
        }
    }
}

/// Candidate second arguments for probe `k`.
fn candidates(id: FalsifierId, map: &SuperMap, k: &ComplexMatrix, rng: &mut impl Rng) -> Result<Vec<ComplexMatrix>> {
    let n = map.d_out();
    match id {
        FalsifierId::L1MEndpointP0 => {
            // B = projector on the top eigenvector of Φ(K)†Φ(K) − Φ(K†K), plus a random PSD B
            let fk = map.apply(k)?;
            let d = &fk.adjoint().matmul(&fk) - &map.apply(&k.adjoint().matmul(k))?;
            let spec = eig_of_matrix(&d)?;
            let v = ComplexMatrix::column(&spec.eigenvector(n - 1));
            let rank = rng.random_range(1..=n);
            Ok(vec![v.matmul(&v.adjoint()), gen_psd(n, rank, rng).matrix().clone()])
        }
        FalsifierId::TracialAT0 => {
            let lambda: Vec<f64> = (0..n).map(|_| 10f64.powf(-3.0 * rng.random::<f64>())).collect();
            let diag = ComplexMatrix::from_real_diagonal(&lambda);
            let u = gen_unitary(n, rng);
            Ok(vec![diag.clone(), u.matmul(&diag).matmul(&u.adjoint())])
        }
    }
}

/// Searches for a violation of an endpoint inequality: matrix units first,
/// then Gaussian `K`, each paired with constructed and random second
/// arguments.
///
/// Requires the map to be positive (not falsified by rank-one sampling).
pub fn falsify_class_via_inequality(
    id: FalsifierId,
    map: &SuperMap,
    sampler: &Sampler,
    trials: usize,
    tol: f64,
) -> Result<ClassVerdict> {
    if check_k_positive(map, 1, sampler, 64, tol)?.is_falsified() {
        return Err(Error::Precondition(format!("{}: map is not positive", id.check_id())));
    }
    let n = match id {
        FalsifierId::L1MEndpointP0 => map.d_in(),
        FalsifierId::TracialAT0 => map.d_out(),
    };
    let probe = Probe::Inequality { id: id.check_id().to_string() };
    let total = sampler.square_probes(n, trials);
    let mut worst = f64::INFINITY;
    for i in 0..total {
        let k = sampler.square_probe(n, i);
        let mut rng = sampler.stream(usize::MAX - i);
        for aux in candidates(id, map, &k, &mut rng)? {
            let out = evaluate(id.check_id(), &falsifier_instance(id, map, &k, &aux), tol)?;
            worst = worst.min(out.margin);
            if !out.holds {
                return Ok(ClassVerdict {
                    verdict: Verdict::Falsified,
                    witness: Some(k),
                    witness_aux: Some(aux),
                    min_eig: out.margin,
                    trials: i + 1,
                    tol,
                    probe,
                    certificate: None,
                });
            }
        }
    }
    Ok(ClassVerdict {
        verdict: Verdict::Unknown,
        witness: None,
        witness_aux: None,
        min_eig: worst,
        trials: total,
        tol,
        probe,
        certificate: None,
    })
}
