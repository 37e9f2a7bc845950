use serde::{Deserialize, Serialize};

use super::SuperMap;
use crate::error::{Error, Result};
use crate::matcore::{ComplexMatrix, ZERO};

/// Parametrized families of maps, serializable as `{"family": ..., params}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum MapFamily {
    Identity { d: usize },
    /// `X ↦ diag(X, X)` on `M_m`.
    Embedding { m: usize },
    /// Traces out the first factor of `M_{d1} ⊗ M_{d2}`.
    PartialTraceLeft { d1: usize, d2: usize },
    /// Traces out the second factor of `M_{d1} ⊗ M_{d2}`.
    PartialTraceRight { d1: usize, d2: usize },
    Transpose { d: usize },
    UnitaryConj { u: ComplexMatrix },
    /// Keeps the diagonal.
    Pinching { d: usize },
    /// `X ↦ λX + (1−λ) tr[X]·1/d`.
    Depolarizing { d: usize, lambda: f64 },
    /// `X ↦ tr[X]·1_{d_out}/d_in`.
    CompletelyDepolarizing { d_in: usize, d_out: usize },
    ConvexCombo { maps: Vec<MapFamily>, weights: Vec<f64> },
}

impl MapFamily {
    pub fn build(&self) -> Result<SuperMap> {
        match self {
            MapFamily::Identity { d } => Ok(identity_map(positive(*d)?)),
            MapFamily::Embedding { m } => Ok(embedding(positive(*m)?)),
            MapFamily::PartialTraceLeft { d1, d2 } => Ok(partial_trace_left(positive(*d1)?, positive(*d2)?)),
            MapFamily::PartialTraceRight { d1, d2 } => Ok(partial_trace_right(positive(*d1)?, positive(*d2)?)),
            MapFamily::Transpose { d } => Ok(transpose_map(positive(*d)?)),
            MapFamily::UnitaryConj { u } => unitary_conj(u),
            MapFamily::Pinching { d } => Ok(pinching(positive(*d)?)),
            MapFamily::Depolarizing { d, lambda } => depolarizing(positive(*d)?, *lambda),
            MapFamily::CompletelyDepolarizing { d_in, d_out } => {
                Ok(completely_depolarizing(positive(*d_in)?, positive(*d_out)?))
            }
            MapFamily::ConvexCombo { maps, weights } => {
                let built = maps.iter().map(MapFamily::build).collect::<Result<Vec<_>>>()?;
                convex_combo(&built, weights)
            }
        }
    }
}

fn positive(d: usize) -> Result<usize> {
    if d == 0 {
        Err(Error::InvalidInput("dimension must be positive".into()))
    } else {
        Ok(d)
    }
}

/// Builds a named family from its identifier and a JSON object of parameters.
pub fn named_map(family: &str, params: &serde_json::Value) -> Result<SuperMap> {
    const KNOWN: [&str; 10] = [
        "identity",
        "embedding",
        "partial_trace_left",
        "partial_trace_right",
        "transpose",
        "unitary_conj",
        "pinching",
        "depolarizing",
        "completely_depolarizing",
        "convex_combo",
    ];
    if !KNOWN.contains(&family) {
        return Err(Error::Unknown(format!("map family '{family}'")));
    }
    let mut obj = match params {
        serde_json::Value::Object(m) => m.clone(),
        serde_json::Value::Null => serde_json::Map::new(),
        _ => return Err(Error::InvalidInput("map parameters must be a JSON object".into())),
    };
    obj.insert("family".into(), serde_json::Value::String(family.into()));
    let fam: MapFamily = serde_json::from_value(serde_json::Value::Object(obj))
        .map_err(|e| Error::InvalidInput(format!("parameters for '{family}': {e}")))?;
    fam.build()
}

pub fn identity_map(d: usize) -> SuperMap {
    SuperMap::from_linear_fn(d, d, |x| x.clone()).expect("valid").with_label(format!("identity({d})"))
}

pub fn embedding(m: usize) -> SuperMap {
    SuperMap::from_linear_fn(m, 2 * m, |x| ComplexMatrix::block_diag(&[x, x]))
        .expect("valid")
        .with_label(format!("embedding({m})"))
}

pub fn partial_trace_left(d1: usize, d2: usize) -> SuperMap {
    SuperMap::from_linear_fn(d1 * d2, d2, |x| {
        ComplexMatrix::from_fn(d2, d2, |a, b| (0..d1).map(|i| x.get(i * d2 + a, i * d2 + b)).sum())
    })
    .expect("valid")
    .with_label(format!("partial_trace_left({d1},{d2})"))
}

pub fn partial_trace_right(d1: usize, d2: usize) -> SuperMap {
    SuperMap::from_linear_fn(d1 * d2, d1, |x| {
        ComplexMatrix::from_fn(d1, d1, |i, j| (0..d2).map(|a| x.get(i * d2 + a, j * d2 + a)).sum())
    })
    .expect("valid")
    .with_label(format!("partial_trace_right({d1},{d2})"))
}

pub fn transpose_map(d: usize) -> SuperMap {
    SuperMap::from_linear_fn(d, d, ComplexMatrix::transpose).expect("valid").with_label(format!("transpose({d})"))
}

/// `X ↦ U X U†` for a unitary `U`.
pub fn unitary_conj(u: &ComplexMatrix) -> Result<SuperMap> {
    let d = u.require_square("unitary_conj")?;
    if !u.matmul(&u.adjoint()).approx_eq(&ComplexMatrix::identity(d), 1e-10) {
        return Err(Error::InvalidInput("unitary_conj requires a unitary matrix".into()));
    }
    Ok(SuperMap::from_kraus(std::slice::from_ref(u))?.with_label(format!("unitary_conj({d})")))
}

pub fn pinching(d: usize) -> SuperMap {
    SuperMap::from_linear_fn(d, d, |x| ComplexMatrix::from_fn(d, d, |i, j| if i == j { x.get(i, i) } else { ZERO }))
        .expect("valid")
        .with_label(format!("pinching({d})"))
}

/// `X ↦ λX + (1−λ)tr[X]·1/d`; positive for `λ ∈ [−1/(d−1), 1]`, completely
/// positive for `λ ∈ [−1/(d²−1), 1]`.
pub fn depolarizing(d: usize, lambda: f64) -> Result<SuperMap> {
    let lower = if d > 1 { -1.0 / (d as f64 - 1.0) } else { f64::NEG_INFINITY };
    if !lambda.is_finite() || lambda > 1.0 || lambda < lower {
        return Err(Error::InvalidInput(format!("depolarizing parameter {lambda} outside [{lower}, 1]")));
    }
    let mix = (1.0 - lambda) / d as f64;
    Ok(SuperMap::from_linear_fn(d, d, |x| &x.scale(lambda) + &ComplexMatrix::identity(d).scale_c(x.trace() * mix))
        .expect("valid")
        .with_label(format!("depolarizing({d},{lambda})")))
}

pub fn completely_depolarizing(d_in: usize, d_out: usize) -> SuperMap {
    SuperMap::from_linear_fn(d_in, d_out, |x| ComplexMatrix::identity(d_out).scale_c(x.trace() / d_in as f64))
        .expect("valid")
        .with_label(format!("completely_depolarizing({d_in},{d_out})"))
}

/// `Σ w_k Φ_k` for a probability vector `w`.
pub fn convex_combo(maps: &[SuperMap], weights: &[f64]) -> Result<SuperMap> {
    if maps.is_empty() || maps.len() != weights.len() {
        return Err(Error::InvalidInput(format!("{} maps with {} weights", maps.len(), weights.len())));
    }
    if weights.iter().any(|w| !(*w >= 0.0) || !w.is_finite()) || (weights.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidInput("weights must be a probability vector".into()));
    }
    let (d_in, d_out) = (maps[0].d_in(), maps[0].d_out());
    if maps.iter().any(|m| m.d_in() != d_in || m.d_out() != d_out) {
        return Err(Error::InvalidInput("convex_combo needs maps of equal shape".into()));
    }
    let mut t = ComplexMatrix::zeros(d_out * d_out, d_in * d_in);
    for (m, w) in maps.iter().zip(weights) {
        t = t + m.transfer().scale(*w);
    }
    Ok(SuperMap::from_transfer(d_in, d_out, t)?.with_label("convex_combo"))
}
