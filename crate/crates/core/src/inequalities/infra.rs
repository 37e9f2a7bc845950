//! Structural invariants and variational identities, reported as outcomes
//! with `lhs` a discrepancy and `rhs = 0` unless noted.

use super::{as_pd, evaluate, CheckOutcome, Evaluation, Instance};
use crate::duality::{dual2_optimizer, dual2_target, dual2_value, sample_dual2_competitor, verify_extremal};
use crate::ensembles::stream_from_seed;
use crate::error::{Error, Result};
use crate::functionals::trace_product;
use crate::matcore::{eig_of_matrix, schatten, ComplexMatrix, HermitianMatrix, Tolerances};
use crate::posclass::schur_block_psd;
use crate::supermap::{SuperMap, META_TOL};

/// Tolerance used by the PSD decisions inside the block equivalence.
const PCHAR_TOL: f64 = 1e-10;

pub fn check_adjoint_pairing(map: &SuperMap, x: &ComplexMatrix, y: &ComplexMatrix, tol: f64) -> Result<CheckOutcome> {
    evaluate("infra:adjoint_pairing", &Instance::AdjointPairing { map: map.clone(), x: x.clone(), y: y.clone() }, tol)
}

pub fn check_choi_roundtrip(map: &SuperMap, tol: f64) -> Result<CheckOutcome> {
    evaluate("infra:choi_roundtrip", &Instance::ChoiRoundtrip { map: map.clone() }, tol)
}

pub fn check_unital_tp_duality(map: &SuperMap, tol: f64) -> Result<CheckOutcome> {
    evaluate("infra:unital_tp_duality", &Instance::UnitalTpDuality { map: map.clone() }, tol)
}

/// Compares the direct PSD test of `[[A, Z], [Z†, B]]` with the criterion
/// `A ⪰ 0`, `ran Z ⊆ ran A`, `B ⪰ Z†A⁺Z`; `lhs` is 1 on disagreement.
pub fn check_pchar(a: &ComplexMatrix, z: &ComplexMatrix, b: &ComplexMatrix, tol: f64) -> Result<CheckOutcome> {
    evaluate("infra:pchar", &Instance::Pchar { a: a.clone(), z: z.clone(), b: b.clone() }, tol)
}

fn rel_diff(x: &ComplexMatrix, y: &ComplexMatrix) -> f64 {
    (x - y).max_abs() / 1.0_f64.max(x.max_abs()).max(y.max_abs())
}

pub(super) fn eval(instance: &Instance) -> Result<Evaluation> {
    let lhs = match instance {
        Instance::AdjointPairing { map, x, y } => map.adjoint_pairing_defect(x, y)?,
        Instance::ChoiRoundtrip { map } => {
            let from_choi = SuperMap::from_choi(map.d_in(), map.d_out(), map.choi().clone())?;
            let from_transfer = SuperMap::from_transfer(map.d_in(), map.d_out(), map.transfer().clone())?;
            let mut worst = rel_diff(from_choi.transfer(), map.transfer()).max(rel_diff(from_transfer.choi(), map.choi()));
            // Choi blocks are the images of matrix units
            for i in 0..map.d_in() {
                for j in 0..map.d_in() {
                    let img = map.apply(&ComplexMatrix::unit(map.d_in(), i, j))?;
                    let block = map.choi().block(i * map.d_out(), j * map.d_out(), map.d_out(), map.d_out());
                    worst = worst.max(rel_diff(&img, &block));
                }
            }
            worst
        }
        Instance::UnitalTpDuality { map } => {
            let adj = map.adjoint();
            let defects = (map.unital_defect() - adj.trace_preserving_defect()).abs()
                + (map.trace_preserving_defect() - adj.unital_defect()).abs();
            let agree = map.is_unital(META_TOL) == adj.is_trace_preserving(META_TOL)
                && map.is_trace_preserving(META_TOL) == adj.is_unital(META_TOL);
            if agree {
                defects
            } else {
                1.0
            }
        }
        Instance::Pchar { a, z, b } => {
            let n = a.require_square("pchar A")?;
            let m = b.require_square("pchar B")?;
            if z.rows() != n || z.cols() != m {
                return Err(Error::DimensionMismatch {
                    context: "pchar Z",
                    expected: format!("{n}x{m}"),
                    got: format!("{}x{}", z.rows(), z.cols()),
                });
            }
            let block = ComplexMatrix::block2(a, z, &z.adjoint(), b)?;
            let spec = eig_of_matrix(&block)?;
            let direct = spec.min() >= -PCHAR_TOL * spec.norm().max(1.0);
            let tol = Tolerances::default();
            let criterion = match crate::matcore::PsdMatrix::from_matrix(a, &tol) {
                Ok(a_psd) => schur_block_psd(&a_psd, z, &HermitianMatrix::new(b.clone(), &tol)?, PCHAR_TOL)?
                    .unwrap_or(false),
                Err(Error::NotPsd { .. }) => false,
                Err(e) => return Err(e),
            };
            if direct == criterion {
                0.0
            } else {
                1.0
            }
        }
        _ => unreachable!("infra::eval called with a non-infrastructure instance"),
    };
    Ok(Evaluation::new(lhs, 0.0))
}

pub(super) fn evaluate_duality(instance: &Instance) -> Result<Evaluation> {
    match instance {
        Instance::HolderExtremal { x, r, seed, samples } => {
            let report = verify_extremal(&as_pd(x, "X")?, *r, &mut stream_from_seed(*seed), *samples)?;
            Ok(Evaluation::new(report.attainment_error().max(-report.worst_margin), 0.0))
        }
        Instance::ReverseHolder { x, y, r } => {
            let (x, y) = (as_pd(x, "X")?, as_pd(y, "Y")?);
            if !(*r < 1.0) || *r == 0.0 {
                return Err(Error::Domain(format!("reverse Hölder needs 0 < r < 1 or r < 0, got {r}")));
            }
            let q = r / (r - 1.0);
            let bound = x.trace_pow(*r).powf(1.0 / r) * y.trace_pow(q).powf(1.0 / q);
            Ok(Evaluation::new(bound, trace_product(x.matrix(), y.matrix(), "reverse_holder")?))
        }
        Instance::Dual2 { a, b, p, seed, competitors } => {
            let a = as_pd(a, "A")?;
            let target = dual2_target(&a, b, *p)?;
            let h = dual2_optimizer(&a, b, *p)?;
            let scale = target.abs().max(1.0);
            let mut worst = (dual2_value(&a, b, *p, &h)? - target).abs() / scale;
            let mut rng = stream_from_seed(*seed);
            for _ in 0..*competitors {
                let c = sample_dual2_competitor(&h, &mut rng);
                worst = worst.max((dual2_value(&a, b, *p, &c)? - target) / scale);
            }
            Ok(Evaluation::new(worst, 0.0))
        }
        Instance::GeneralizedHolder { x, y, p1, p2 } => {
            if !(*p1 > 0.0 && *p2 > 0.0) {
                return Err(Error::Domain(format!("Hölder exponents must be positive, got {p1}, {p2}")));
            }
            let p0 = 1.0 / (1.0 / p1 + 1.0 / p2);
            Ok(Evaluation::new(schatten(&x.matmul(y), p0)?, schatten(x, *p1)? * schatten(y, *p2)?))
        }
        _ => unreachable!("infra::evaluate_duality called with a non-duality instance"),
    }
}
