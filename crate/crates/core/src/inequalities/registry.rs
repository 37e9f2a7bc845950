use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Machine-readable description of a check: the statement, which side uses
/// `Φ` or `Φ†` and in which space each argument lives, and the admissible
/// parameters.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckDescriptor {
    pub id: String,
    pub formula: String,
    pub roles: BTreeMap<String, String>,
    pub param_domain: BTreeMap<String, String>,
    pub hypotheses: Vec<String>,
}

fn d(id: &str, formula: &str, roles: &[(&str, &str)], params: &[(&str, &str)], hyp: &[&str]) -> CheckDescriptor {
    let map = |xs: &[(&str, &str)]| xs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
    CheckDescriptor {
        id: id.into(),
        formula: formula.into(),
        roles: map(roles),
        param_domain: map(params),
        hypotheses: hyp.iter().map(|s| s.to_string()).collect(),
    }
}

const PHI: (&str, &str) = ("phi", "M_{d_in} -> M_{d_out}");
const C: (&str, &str) = ("c", "d_out / d_in");

pub fn descriptors() -> Vec<CheckDescriptor> {
    vec![
        d(
            "L1M",
            "tr[Φ(K)† A^p Φ(K) B^{1−p}] ≤ tr[K† Φ†(A)^p K Φ†(B)^{1−p}]",
            &[PHI, ("K", "M_{d_in}"), ("A", "M_{d_out} PSD"), ("B", "M_{d_out} PSD"), ("lhs", "Φ"), ("rhs", "Φ†")],
            &[("s", "p ∈ [0, 1]"), ("t", "1 − p")],
            &["schwarz"],
        ),
        d(
            "L1MB",
            "tr[Φ(K)† A^s Φ(K) B^t] ≤ c^{1−s−t} tr[K† Φ†(A)^s K Φ†(B)^t]",
            &[PHI, C, ("K", "M_{d_in}"), ("A", "M_{d_out} PSD"), ("B", "M_{d_out} PSD"), ("lhs", "Φ"), ("rhs", "Φ†")],
            &[("s", "(0, 1)"), ("t", "(0, 1 − s]")],
            &["schwarz", "semiunital"],
        ),
        d(
            "L2M",
            "tr[Φ†(K)† Φ†(Y)^{t−1} Φ†(K) Φ†(X)^{−t}] ≤ tr[K† Y^{t−1} K X^{−t}]",
            &[PHI, ("K", "M_{d_out}"), ("X", "M_{d_out} PD"), ("Y", "M_{d_out} PD"), ("lhs", "Φ†"), ("rhs", "identity")],
            &[("s", "1 − t"), ("t", "[0, 1]")],
            &["schwarz", "adjoint_one_pd"],
        ),
        d(
            "L2MB",
            "tr[Φ†(K)† Φ†(Y)^{−s} Φ†(K) Φ†(X)^{−t}] ≤ c^{1−s−t} tr[K† Y^{−s} K X^{−t}]",
            &[PHI, C, ("K", "M_{d_out}"), ("X", "M_{d_out} PD"), ("Y", "M_{d_out} PD"), ("lhs", "Φ†"), ("rhs", "identity")],
            &[("s", "(0, 1)"), ("t", "(0, 1 − s]")],
            &["schwarz", "semiunital", "adjoint_one_pd"],
        ),
        d(
            "Ep1",
            "tr[(Φ(B)† A^p Φ(B))^{1/p}] ≤ tr[(B† Φ†(A)^p B)^{1/p}]",
            &[PHI, ("A", "M_{d_out} PD"), ("B", "M_{d_in}"), ("lhs", "Φ"), ("rhs", "Φ†")],
            &[("s", "p ∈ (0, 1]"), ("r", "1")],
            &["schwarz", "unital"],
        ),
        d(
            "Ep2",
            "tr[(Φ(B)† A^s Φ(B))^{r/s}] ≤ c^{1−r} tr[(B† Φ†(A)^s B)^{r/s}]",
            &[PHI, C, ("A", "M_{d_out} PD"), ("B", "M_{d_in}"), ("lhs", "Φ"), ("rhs", "Φ†")],
            &[("s", "(0, 1]"), ("r", "[s, 1]")],
            &["schwarz", "unital", "semiunital"],
        ),
        d(
            "Ep3A",
            "tr[(Φ†(B)† Φ†(A)^{−p} Φ†(B))^{1/(2−p)}] ≤ tr[(B† A^{−p} B)^{1/(2−p)}]",
            &[PHI, ("A", "M_{d_out} PD"), ("B", "M_{d_out} invertible"), ("lhs", "Φ†"), ("rhs", "identity")],
            &[("s", "p ∈ [0, 1)"), ("q", "1/(2−p)")],
            &["schwarz", "unital"],
        ),
        d(
            "Ep3",
            "tr[(Φ†(B)† Φ†(A)^{−s} Φ†(B))^q] ≤ c^{(2−s)q−1} tr[(B† A^{−s} B)^q]",
            &[PHI, C, ("A", "M_{d_out} PD"), ("B", "M_{d_out} invertible"), ("lhs", "Φ†"), ("rhs", "identity")],
            &[("s", "[0, 1)"), ("q", "[1/(2−s), 1)")],
            &["schwarz", "unital", "semiunital"],
        ),
        d(
            "tracialA",
            "tr[Φ†(K)† Φ†(Y)^{−1} Φ†(K)] ≤ tr[K† Y^{−1} K]",
            &[PHI, ("K", "M_{d_out}"), ("Y", "M_{d_out} PD"), ("lhs", "Φ†"), ("rhs", "identity")],
            &[],
            &["schwarz", "adjoint_one_pd"],
        ),
        d(
            "tracial",
            "tr[Φ†(B)† Φ†(A)^{−1} Φ†(B)] ≤ tr[B† A^{−1} B]",
            &[PHI, ("B", "M_{d_out}"), ("A", "M_{d_out} PD"), ("lhs", "Φ†"), ("rhs", "identity")],
            &[],
            &["schwarz", "unital"],
        ),
        d(
            "tracialB",
            "tr[Φ†(B)† Φ†(B)] ≤ ‖Φ†(1)‖ tr[B† B]",
            &[PHI, ("B", "M_{d_out}"), ("lhs", "Φ†"), ("rhs", "identity")],
            &[],
            &["schwarz"],
        ),
        d(
            "DPI",
            "D(Φ(X)‖Φ(Y)) ≤ D(X‖Y), D(X‖Y) = tr[X(log X − log Y)]",
            &[PHI, ("X", "M_{d_in} density"), ("Y", "M_{d_in} PD density"), ("lhs", "Φ"), ("rhs", "identity")],
            &[],
            &["completely_positive", "trace_preserving"],
        ),
        d(
            "sandwiched",
            "tr[(Λ(σ)^γ Λ(ρ) Λ(σ)^γ)^α] ≤ tr[(σ^γ ρ σ^γ)^α], γ = (1−α)/(2α)",
            &[PHI, ("rho", "M_{d_in} density"), ("sigma", "M_{d_in} PD density"), ("lhs", "Φ"), ("rhs", "identity")],
            &[("alpha", "(1, ∞)")],
            &["positive", "trace_preserving"],
        ),
        d(
            "boundary_f",
            "|f(iy)|, |f(1+iy)| ≤ tr[M† M], M = Φ†(A)^{p/2} K Φ†(B)^{(1−p)/2}",
            &[PHI, ("K", "M_{d_in}"), ("A", "M_{d_out} PD"), ("B", "M_{d_out} PD")],
            &[("p", "(0, 1)"), ("y", "real")],
            &["schwarz"],
        ),
        d(
            "boundary_g",
            "|g(iy)|, |g(1+iy)| ≤ tr[M† M], M = Y^{(t−1)/2} K X^{−t/2}",
            &[PHI, ("K", "M_{d_out}"), ("X", "M_{d_out} PD"), ("Y", "M_{d_out} PD")],
            &[("t", "(0, 1)"), ("y", "real")],
            &["schwarz"],
        ),
        d(
            "entropy:limit_bridge",
            "|(1 − tr[Y^{1−t} X^t])/(1 − t) − D(X‖Y)| ≤ 1e-3 (1 + D(X‖Y))",
            &[("X", "PD density"), ("Y", "PD density")],
            &[("t", "1 − 1e-5")],
            &[],
        ),
        d(
            "duality:holder_extremal",
            "(tr X^r)^{1/r} = max/min tr[XY] over tr[Y^{r/(r−1)}] = 1, attained at Y ∝ X^{r−1}",
            &[("X", "PD")],
            &[("r", "r > 1 (max), 0 < r < 1 or r < 0 (min)")],
            &[],
        ),
        d(
            "duality:reverse_holder",
            "(tr X^r)^{1/r} (tr Y^{r/(r−1)})^{(r−1)/r} ≤ tr[XY]",
            &[("X", "PD"), ("Y", "PD")],
            &[("r", "0 < r < 1 or r < 0")],
            &[],
        ),
        d(
            "duality:dual2",
            "tr[(B† A^p B)^{1/p}] = max_H (1/p) tr[B†HB] − ((1−p)/p) tr[(A^{−p/2} H A^{−p/2})^{1/(1−p)}]",
            &[("A", "PD"), ("B", "square"), ("H", "PSD")],
            &[("p", "(0, 1)")],
            &[],
        ),
        d(
            "holder:generalized",
            "‖XY‖_{p0} ≤ ‖X‖_{p1} ‖Y‖_{p2}, 1/p0 = 1/p1 + 1/p2",
            &[("X", "square"), ("Y", "square")],
            &[("p1", "(0, ∞)"), ("p2", "(0, ∞)")],
            &[],
        ),
        d(
            "falsify:L1M_endpoint_p0",
            "tr[Φ(K)† Φ(K) B] ≤ tr[Φ(K†K) B] for all K, B ⪰ 0",
            &[PHI, ("K", "M_{d_in}"), ("B", "M_{d_out} PSD")],
            &[],
            &["positive"],
        ),
        d(
            "falsify:tracialA_t0",
            "tr[Φ†(K)† Φ†(Y)^{−1} Φ†(K)] ≤ tr[K† Y^{−1} K] for all K, Y ≻ 0",
            &[PHI, ("K", "M_{d_out}"), ("Y", "M_{d_out} PD")],
            &[],
            &["positive"],
        ),
        d(
            "schwarz_falsify",
            "Φ(K†K) − Φ(K)†Φ(K) ⪰ 0",
            &[PHI, ("K", "M_{d_in}")],
            &[],
            &[],
        ),
        d(
            "midpoint",
            "(F(x) + F(y))/2 ≤ F((x+y)/2) (concave) or the reverse (convex)",
            &[("x", "argument tuple"), ("y", "argument tuple")],
            &[],
            &[],
        ),
        d(
            "reduction",
            "monotone statement at X ↦ diag(X, X) with block inputs, rescaled to a midpoint inequality",
            &[("phi", "M_m -> M_{2m}, X ↦ diag(X, X)"), ("c", "2")],
            &[],
            &[],
        ),
        d(
            "infra:adjoint_pairing",
            "⟨Φ(X), Y⟩ = ⟨X, Φ†(Y)⟩",
            &[PHI, ("X", "M_{d_in}"), ("Y", "M_{d_out}")],
            &[],
            &[],
        ),
        d("infra:choi_roundtrip", "choi → transfer → choi is the identity", &[PHI], &[], &[]),
        d("infra:unital_tp_duality", "Φ unital ⇔ Φ† trace preserving", &[PHI], &[], &[]),
        d(
            "infra:pchar",
            "[[A, Z], [Z†, B]] ⪰ 0 ⇔ A ⪰ 0, ran Z ⊆ ran A, B ⪰ Z†A⁺Z",
            &[("A", "n × n"), ("Z", "n × m"), ("B", "m × m")],
            &[],
            &[],
        ),
    ]
}

/// Descriptor for a check id; `midpoint:*` and `reduction:*` map to their
/// family entries.
pub fn descriptor(id: &str) -> Result<CheckDescriptor> {
    descriptors()
        .into_iter()
        .filter(|d| id == d.id || id.starts_with(&format!("{}:", d.id)))
        .max_by_key(|d| d.id.len())
        .ok_or_else(|| Error::Unknown(format!("check '{id}'")))
}
