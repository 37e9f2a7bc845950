//! Linear maps between matrix spaces.
//!
//! A [`SuperMap`] `Φ: M_{d_in} → M_{d_out}` is stored twice: as the transfer
//! matrix acting on column-stacked matrices, `vec(Φ(X)) = T·vec(X)`, and as
//! the Choi matrix `C = Σ_ij E_ij ⊗ Φ(E_ij)`, whose `(i, j)` block of size
//! `d_out` is `Φ(E_ij)`. Both encode the same map; the Hilbert–Schmidt adjoint
//! is the conjugate transpose of the transfer matrix.

mod named;

pub use named::{
    completely_depolarizing, convex_combo, depolarizing, embedding, identity_map, named_map, partial_trace_left,
    partial_trace_right, pinching, transpose_map, unitary_conj, MapFamily,
};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::matcore::{ComplexMatrix, C64, ZERO};

/// Default tolerance for the structural flags.
pub const META_TOL: f64 = 1e-10;

/// Structural flags, each `None` when not evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MapMeta {
    pub unital: Option<bool>,
    pub trace_preserving: Option<bool>,
    pub semiunital: Option<bool>,
    pub sesquiunital: Option<bool>,
    pub tol: f64,
}

impl MapMeta {
    pub fn unevaluated(tol: f64) -> Self {
        Self { unital: None, trace_preserving: None, semiunital: None, sesquiunital: None, tol }
    }
}

#[derive(Clone, Debug)]
pub struct SuperMap {
    d_in: usize,
    d_out: usize,
    transfer: ComplexMatrix,
    choi: ComplexMatrix,
    meta: MapMeta,
    label: String,
}

impl PartialEq for SuperMap {
    fn eq(&self, other: &Self) -> bool {
        self.d_in == other.d_in && self.d_out == other.d_out && self.transfer == other.transfer
    }
}

fn transfer_to_choi(d_in: usize, d_out: usize, t: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix::from_fn(d_in * d_out, d_in * d_out, |r, c| {
        let (i, a) = (r / d_out, r % d_out);
        let (j, b) = (c / d_out, c % d_out);
        t.get(a + b * d_out, i + j * d_in)
    })
}

fn choi_to_transfer(d_in: usize, d_out: usize, choi: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix::from_fn(d_out * d_out, d_in * d_in, |r, c| {
        let (a, b) = (r % d_out, r / d_out);
        let (i, j) = (c % d_in, c / d_in);
        choi.get(i * d_out + a, j * d_out + b)
    })
}

impl SuperMap {
    pub fn from_transfer(d_in: usize, d_out: usize, transfer: ComplexMatrix) -> Result<Self> {
        if d_in == 0 || d_out == 0 {
            return Err(Error::InvalidInput("map dimensions must be positive".into()));
        }
        if transfer.rows() != d_out * d_out || transfer.cols() != d_in * d_in {
            return Err(Error::DimensionMismatch {
                context: "SuperMap::from_transfer",
                expected: format!("{}x{}", d_out * d_out, d_in * d_in),
                got: format!("{}x{}", transfer.rows(), transfer.cols()),
            });
        }
        if !transfer.is_finite() {
            return Err(Error::InvalidInput("non-finite transfer matrix".into()));
        }
        let choi = transfer_to_choi(d_in, d_out, &transfer);
        let mut map = Self { d_in, d_out, transfer, choi, meta: MapMeta::unevaluated(META_TOL), label: String::new() };
        map.meta = map.evaluate_meta(META_TOL);
        Ok(map)
    }

    pub fn from_choi(d_in: usize, d_out: usize, choi: ComplexMatrix) -> Result<Self> {
        if choi.rows() != d_in * d_out || choi.cols() != d_in * d_out {
            return Err(Error::DimensionMismatch {
                context: "SuperMap::from_choi",
                expected: format!("{0}x{0}", d_in * d_out),
                got: format!("{}x{}", choi.rows(), choi.cols()),
            });
        }
        Self::from_transfer(d_in, d_out, choi_to_transfer(d_in, d_out, &choi))
    }

    /// Tabulates a linear function on the matrix units `E_ij`.
    pub fn from_linear_fn(d_in: usize, d_out: usize, f: impl Fn(&ComplexMatrix) -> ComplexMatrix) -> Result<Self> {
        let mut t = DMatrix::<C64>::zeros(d_out * d_out, d_in * d_in);
        for j in 0..d_in {
            for i in 0..d_in {
                let img = f(&ComplexMatrix::unit(d_in, i, j));
                img.require_dim(d_out, "SuperMap::from_linear_fn")?;
                let col = img.vec_col();
                t.column_mut(i + j * d_in).copy_from_slice(&col);
            }
        }
        Self::from_transfer(d_in, d_out, ComplexMatrix::from_nalgebra(t)?)
    }

    /// `Φ(X) = Σ_k V_k X V_k†` for Kraus operators of shape `d_out × d_in`.
    pub fn from_kraus(ops: &[ComplexMatrix]) -> Result<Self> {
        let first = ops.first().ok_or_else(|| Error::InvalidInput("empty Kraus list".into()))?;
        let (d_out, d_in) = (first.rows(), first.cols());
        let mut t = ComplexMatrix::zeros(d_out * d_out, d_in * d_in);
        for v in ops {
            if v.rows() != d_out || v.cols() != d_in {
                return Err(Error::DimensionMismatch {
                    context: "SuperMap::from_kraus",
                    expected: format!("{d_out}x{d_in}"),
                    got: format!("{}x{}", v.rows(), v.cols()),
                });
            }
            // vec(V X V†) = (conj(V) ⊗ V) vec(X)
            t = t + v.conj().kron(v);
        }
        Self::from_transfer(d_in, d_out, t)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn d_in(&self) -> usize {
        self.d_in
    }

    pub fn d_out(&self) -> usize {
        self.d_out
    }

    /// `d_out / d_in`, the semiunital ratio.
    pub fn d_ratio(&self) -> f64 {
        self.d_out as f64 / self.d_in as f64
    }

    pub fn transfer(&self) -> &ComplexMatrix {
        &self.transfer
    }

    pub fn choi(&self) -> &ComplexMatrix {
        &self.choi
    }

    pub fn meta(&self) -> &MapMeta {
        &self.meta
    }

    pub fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        x.require_dim(self.d_in, "SuperMap::apply")?;
        let v = DVector::from_column_slice(&x.vec_col());
        let out = self.transfer.as_nalgebra() * v;
        Ok(ComplexMatrix::from_vec_col(self.d_out, self.d_out, out.as_slice()))
    }

    /// Applies the Hilbert–Schmidt adjoint without materializing it.
    pub fn apply_adjoint(&self, y: &ComplexMatrix) -> Result<ComplexMatrix> {
        y.require_dim(self.d_out, "SuperMap::apply_adjoint")?;
        let v = DVector::from_column_slice(&y.vec_col());
        let out = self.transfer.as_nalgebra().ad_mul(&v);
        Ok(ComplexMatrix::from_vec_col(self.d_in, self.d_in, out.as_slice()))
    }

    pub fn adjoint(&self) -> SuperMap {
        let label = if self.label.is_empty() { String::new() } else { format!("adjoint({})", self.label) };
        SuperMap::from_transfer(self.d_out, self.d_in, self.transfer.adjoint())
            .expect("adjoint of a valid map is valid")
            .with_label(label)
    }

    /// `self ∘ inner`: applies `inner` first.
    pub fn compose(&self, inner: &SuperMap) -> Result<SuperMap> {
        if inner.d_out != self.d_in {
            return Err(Error::DimensionMismatch {
                context: "SuperMap::compose",
                expected: format!("inner d_out = {}", self.d_in),
                got: format!("{}", inner.d_out),
            });
        }
        SuperMap::from_transfer(inner.d_in, self.d_out, self.transfer.matmul(&inner.transfer))
    }

    /// `Φ ⊗ id_k` acting blockwise on `k × k` block matrices with `d_in`-sized blocks.
    pub fn tensor_with_identity(&self, k: usize) -> Result<SuperMap> {
        if k == 0 {
            return Err(Error::InvalidInput("k must be at least 1".into()));
        }
        if k == 1 {
            return Ok(self.clone());
        }
        let (n, m) = (self.d_in, self.d_out);
        SuperMap::from_linear_fn(k * n, k * m, |x| {
            let mut out = ComplexMatrix::zeros(k * m, k * m);
            for a in 0..k {
                for b in 0..k {
                    let blk = x.block(a * n, b * n, n, n);
                    let img = self.apply(&blk).expect("block has input dimension");
                    out.set_block(a * m, b * m, &img);
                }
            }
            out
        })
        .map(|map| map.with_label(format!("{}⊗id_{k}", self.label)))
    }

    /// Largest entrywise deviation of `Φ(1)` from the identity.
    pub fn unital_defect(&self) -> f64 {
        let img = self.apply(&ComplexMatrix::identity(self.d_in)).expect("identity has input dimension");
        (&img - &ComplexMatrix::identity(self.d_out)).max_abs()
    }

    /// Largest deviation of `tr[Φ(E_ij)]` from `δ_ij`, read off the Choi blocks.
    pub fn trace_preserving_defect(&self) -> f64 {
        let (n, m) = (self.d_in, self.d_out);
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                let mut tr = ZERO;
                for a in 0..m {
                    tr += self.choi.get(i * m + a, j * m + a);
                }
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((tr - C64::new(target, 0.0)).norm());
            }
        }
        worst
    }

    /// Largest entrywise deviation of `Φ†(1)` from `(d_out/d_in)·1`.
    pub fn semiunital_defect(&self) -> f64 {
        let img = self.apply_adjoint(&ComplexMatrix::identity(self.d_out)).expect("identity has output dimension");
        (&img - &ComplexMatrix::identity(self.d_in).scale(self.d_ratio())).max_abs()
    }

    pub fn is_unital(&self, tol: f64) -> bool {
        self.unital_defect() <= tol
    }

    pub fn is_trace_preserving(&self, tol: f64) -> bool {
        self.trace_preserving_defect() <= tol
    }

    /// `Φ†(1_out) = (d_out/d_in)·1_in` within `tol·max(1, d_out/d_in)`.
    pub fn is_semiunital(&self, tol: f64) -> bool {
        self.semiunital_defect() <= tol * self.d_ratio().max(1.0)
    }

    pub fn is_sesquiunital(&self, tol: f64) -> bool {
        self.is_unital(tol) && self.is_semiunital(tol)
    }

    pub fn evaluate_meta(&self, tol: f64) -> MapMeta {
        let unital = self.is_unital(tol);
        let semiunital = self.is_semiunital(tol);
        MapMeta {
            unital: Some(unital),
            trace_preserving: Some(self.is_trace_preserving(tol)),
            semiunital: Some(semiunital),
            sesquiunital: Some(unital && semiunital),
            tol,
        }
    }

    /// Returns a copy whose flags were evaluated at `tol`.
    pub fn with_meta_tol(mut self, tol: f64) -> Self {
        self.meta = self.evaluate_meta(tol);
        self
    }

    /// Maximal HS-pairing defect `|tr[Φ(X)†Y] − tr[X†Φ†(Y)]|` relative to `‖X‖‖Y‖`.
    pub fn adjoint_pairing_defect(&self, x: &ComplexMatrix, y: &ComplexMatrix) -> Result<f64> {
        let lhs = self.apply(x)?.hs_inner(y);
        let rhs = x.hs_inner(&self.apply_adjoint(y)?);
        Ok((lhs - rhs).norm() / (x.frobenius_norm() * y.frobenius_norm()).max(1.0))
    }
}

#[derive(Serialize, Deserialize)]
struct MapJson {
    d_in: usize,
    d_out: usize,
    choi: ComplexMatrix,
    #[serde(default)]
    meta: Option<MapMeta>,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    label: String,
}

impl Serialize for SuperMap {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MapJson {
            d_in: self.d_in,
            d_out: self.d_out,
            choi: self.choi.clone(),
            meta: Some(self.meta),
            label: self.label.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SuperMap {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = MapJson::deserialize(d)?;
        let tol = raw.meta.map_or(META_TOL, |m| m.tol);
        SuperMap::from_choi(raw.d_in, raw.d_out, raw.choi)
            .map(|m| m.with_meta_tol(tol).with_label(raw.label))
            .map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::ONE;

    fn sample(n: usize, seed: f64) -> ComplexMatrix {
        ComplexMatrix::from_fn(n, n, |i, j| C64::new((seed + i as f64 * 1.3 + j as f64 * 0.7).sin(), (seed * 2.0 + i as f64 - j as f64 * 0.4).cos()))
    }

    #[test]
    fn identity_map_is_identity() {
        let id = identity_map(3);
        let x = sample(3, 0.2);
        assert!(id.apply(&x).unwrap().approx_eq(&x, 1e-15));
        assert!(id.meta().unital.unwrap() && id.meta().trace_preserving.unwrap() && id.meta().sesquiunital.unwrap());
    }

    #[test]
    fn transpose_of_unit() {
        let t = transpose_map(2);
        let out = t.apply(&ComplexMatrix::unit(2, 0, 1)).unwrap();
        assert_eq!(out, ComplexMatrix::unit(2, 1, 0));
    }

    #[test]
    fn embedding_duplicates_and_adjoint_sums_diagonal_blocks() {
        let e = embedding(2);
        let x = sample(2, 1.1);
        let y = e.apply(&x).unwrap();
        assert_eq!(y, ComplexMatrix::block_diag(&[&x, &x]));
        let a = sample(2, 0.3);
        let b = sample(2, 0.9);
        let c = sample(2, 1.7);
        let d = sample(2, 2.5);
        let big = ComplexMatrix::block2(&a, &b, &c, &d).unwrap();
        assert!(e.apply_adjoint(&big).unwrap().approx_eq(&(&a + &d), 1e-14));
        assert!(e.adjoint().apply(&big).unwrap().approx_eq(&(&a + &d), 1e-14));
    }

    #[test]
    fn choi_of_transpose_is_swap() {
        let t = transpose_map(2);
        let swap = ComplexMatrix::from_fn(4, 4, |r, c| {
            let (i, a) = (r / 2, r % 2);
            let (j, b) = (c / 2, c % 2);
            if i == b && a == j {
                ONE
            } else {
                ZERO
            }
        });
        assert_eq!(t.choi(), &swap);
    }

    #[test]
    fn choi_and_transfer_round_trip() {
        let m = SuperMap::from_kraus(&[sample(2, 0.1).block(0, 0, 2, 2), sample(2, 0.5)]).unwrap();
        let back = SuperMap::from_choi(2, 2, m.choi().clone()).unwrap();
        assert!(back.transfer().approx_eq(m.transfer(), 1e-15));
        let rect = SuperMap::from_kraus(&[ComplexMatrix::from_fn(3, 2, |i, j| C64::new(i as f64 - j as f64, 0.5))]).unwrap();
        let back = SuperMap::from_choi(2, 3, rect.choi().clone()).unwrap();
        assert_eq!(back.d_out(), 3);
        assert!(back.transfer().approx_eq(rect.transfer(), 1e-15));
    }

    #[test]
    fn adjoint_examples() {
        let x = sample(3, 0.4);
        // partial trace over the second factor has adjoint X ↦ X ⊗ 1
        let pt = partial_trace_right(2, 3);
        let y = sample(2, 0.8);
        let expected = y.kron(&ComplexMatrix::identity(3));
        assert!(pt.apply_adjoint(&y).unwrap().approx_eq(&expected, 1e-14));
        let u = unitary_test_matrix();
        let conj = unitary_conj(&u).unwrap();
        let conj_dag = unitary_conj(&u.adjoint()).unwrap();
        assert!(conj.adjoint().transfer().approx_eq(conj_dag.transfer(), 1e-14));
        assert!(conj.adjoint().adjoint() == conj);
        assert!(conj.adjoint_pairing_defect(&x.block(0, 0, 2, 2), &sample(2, 3.0)).unwrap() < 1e-14);
    }

    fn unitary_test_matrix() -> ComplexMatrix {
        let (c, s) = (0.6, 0.8);
        ComplexMatrix::new(2, 2, vec![C64::new(c, 0.0), C64::new(0.0, s), C64::new(0.0, s), C64::new(c, 0.0)]).unwrap()
    }

    #[test]
    fn kraus_examples() {
        let id = SuperMap::from_kraus(&[ComplexMatrix::identity(2)]).unwrap();
        assert_eq!(id.transfer(), identity_map(2).transfer());
        let pinch = SuperMap::from_kraus(&[ComplexMatrix::unit(2, 0, 0), ComplexMatrix::unit(2, 1, 1)]).unwrap();
        let x = sample(2, 0.6);
        let expected = ComplexMatrix::from_fn(2, 2, |i, j| if i == j { x.get(i, i) } else { ZERO });
        assert!(pinch.apply(&x).unwrap().approx_eq(&expected, 1e-15));
        let u = SuperMap::from_kraus(&[unitary_test_matrix()]).unwrap();
        assert!(u.meta().unital.unwrap() && u.meta().trace_preserving.unwrap());
        assert!(SuperMap::from_kraus(&[]).is_err());
        assert!(SuperMap::from_kraus(&[ComplexMatrix::identity(2), ComplexMatrix::identity(3)]).is_err());
    }

    #[test]
    fn semiunital_examples() {
        let e = embedding(3);
        assert!(e.is_semiunital(1e-12));
        assert_eq!(e.d_ratio(), 2.0);
        assert!(identity_map(2).is_semiunital(1e-12));
        let corner = SuperMap::from_linear_fn(2, 2, |x| {
            ComplexMatrix::from_fn(2, 2, |i, j| if i == 0 && j == 0 { x.get(0, 0) } else { ZERO })
        })
        .unwrap();
        assert!(!corner.is_semiunital(1e-10));
        assert!(corner.apply_adjoint(&ComplexMatrix::identity(2)).unwrap().approx_eq(&ComplexMatrix::unit(2, 0, 0), 1e-15));
    }

    #[test]
    fn tensor_with_identity_examples() {
        let e = embedding(2);
        assert!(e.tensor_with_identity(1).unwrap() == e);
        let e2 = e.tensor_with_identity(2).unwrap();
        let blocks: Vec<ComplexMatrix> = (0..4).map(|k| sample(2, k as f64)).collect();
        let x = ComplexMatrix::block2(&blocks[0], &blocks[1], &blocks[2], &blocks[3]).unwrap();
        let y = e2.apply(&x).unwrap();
        for (k, b) in blocks.iter().enumerate() {
            let (a, c) = (k / 2, k % 2);
            assert_eq!(y.block(a * 4, c * 4, 4, 4), ComplexMatrix::block_diag(&[b, b]));
        }
        assert!(e.tensor_with_identity(0).is_err());
    }

    #[test]
    fn transpose_tensor_identity_breaks_positivity() {
        let t2 = transpose_map(2).tensor_with_identity(2).unwrap();
        // maximally entangled projector in block layout: Σ E_ab ⊗ E_ab
        let omega = ComplexMatrix::from_fn(4, 4, |r, c| {
            let (a, i) = (r / 2, r % 2);
            let (b, j) = (c / 2, c % 2);
            if a == i && b == j {
                ONE
            } else {
                ZERO
            }
        });
        let out = t2.apply(&omega).unwrap();
        let min = crate::matcore::min_eigenvalue(&out).unwrap();
        assert!((min + 1.0).abs() < 1e-12);
    }

    #[test]
    fn map_json_round_trip() {
        let m = depolarizing(2, 0.3).unwrap();
        let s = serde_json::to_string(&m).unwrap();
        let back: SuperMap = serde_json::from_str(&s).unwrap();
        assert!(back.transfer().approx_eq(m.transfer(), 1e-15));
        assert_eq!(back.meta(), m.meta());
        let bad = r#"{"d_in":2,"d_out":2,"choi":{"rows":3,"cols":3,"data":[[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0]]}}"#;
        assert!(serde_json::from_str::<SuperMap>(bad).is_err());
    }
}
