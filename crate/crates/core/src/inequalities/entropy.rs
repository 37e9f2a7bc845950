use super::{as_pd, as_psd, evaluate, image_pd, image_psd, CheckOutcome, Evaluation, Instance, Requirements};
use crate::error::{Error, Result};
use crate::functionals::{renyi_limit_quotient, sandwiched_trace, umegaki};
use crate::matcore::ComplexMatrix;
use crate::supermap::SuperMap;

/// `t` used by the limit bridge.
pub const LIMIT_T: f64 = 1.0 - 1e-5;

/// `D(Φ(X)‖Φ(Y)) ≤ D(X‖Y)` for a CP trace-preserving map and densities in
/// `M_{d_in}`.
pub fn check_dpi(map: &SuperMap, x: &ComplexMatrix, y: &ComplexMatrix, force: bool, tol: f64) -> Result<CheckOutcome> {
    evaluate("DPI", &Instance::Dpi { map: map.clone(), x: x.clone(), y: y.clone(), force }, tol)
}

/// `tr[(Λ(σ)^γ Λ(ρ) Λ(σ)^γ)^α] ≤ tr[(σ^γ ρ σ^γ)^α]`, `γ = (1−α)/(2α)`, for a
/// positive trace-preserving `Λ` and `α > 1`.
pub fn check_sandwiched_mono(
    map: &SuperMap,
    rho: &ComplexMatrix,
    sigma: &ComplexMatrix,
    alpha: f64,
    force: bool,
    tol: f64,
) -> Result<CheckOutcome> {
    let instance = Instance::Sandwiched { map: map.clone(), rho: rho.clone(), sigma: sigma.clone(), alpha, force };
    evaluate("sandwiched", &instance, tol)
}

/// `lhs = |(1 − tr[Y^{1−t} X^t])/(1 − t) − D(X‖Y)|` against
/// `rhs = 1e-3·(1 + D(X‖Y))` at `t = 1 − 1e-5`.
pub fn limit_bridge(x: &ComplexMatrix, y: &ComplexMatrix, tol: f64) -> Result<CheckOutcome> {
    evaluate("entropy:limit_bridge", &Instance::EntropyLimit { x: x.clone(), y: y.clone(), t: LIMIT_T }, tol)
}

pub(super) fn eval(instance: &Instance) -> Result<Evaluation> {
    match instance {
        Instance::Dpi { map, x, y, force } => {
            let req = Requirements { completely_positive: true, trace_preserving: true, ..Default::default() };
            let exploratory = req.gate(map, *force, "DPI")?;
            x.require_dim(map.d_in(), "DPI X")?;
            y.require_dim(map.d_in(), "DPI Y")?;
            let (x_pd, y_pd) = (as_pd(x, "X")?, as_pd(y, "Y")?);
            let lhs = umegaki(&image_pd(&map.apply(x)?)?, &image_pd(&map.apply(y)?)?)?;
            let rhs = umegaki(&x_pd, &y_pd)?;
            Ok(Evaluation::new(lhs, rhs).exploratory(exploratory))
        }
        Instance::Sandwiched { map, rho, sigma, alpha, force } => {
            let req = Requirements { positive: true, trace_preserving: true, ..Default::default() };
            let exploratory = req.gate(map, *force, "sandwiched")?;
            rho.require_dim(map.d_in(), "sandwiched rho")?;
            sigma.require_dim(map.d_in(), "sandwiched sigma")?;
            let (r, s) = (as_psd(rho, "rho")?, as_pd(sigma, "sigma")?);
            let lhs = sandwiched_trace(&image_psd(&map.apply(rho)?)?, &image_pd(&map.apply(sigma)?)?, *alpha)?;
            let rhs = sandwiched_trace(&r, &s, *alpha)?;
            Ok(Evaluation::new(lhs, rhs).exploratory(exploratory))
        }
        Instance::EntropyLimit { x, y, t } => {
            if !(*t > 0.0 && *t < 1.0) {
                return Err(Error::Domain(format!("limit bridge needs 0 < t < 1, got {t}")));
            }
            let (x_pd, y_pd) = (as_pd(x, "X")?, as_pd(y, "Y")?);
            let d = umegaki(&x_pd, &y_pd)?;
            let q = renyi_limit_quotient(&x_pd, &y_pd, *t)?;
            Ok(Evaluation::new((q - d).abs(), 1e-3 * (1.0 + d)))
        }
        _ => unreachable!("entropy::eval called with a non-entropy instance"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::{gen_channel, gen_density, stream_from_seed, ChannelFlavor};
    use crate::supermap::{identity_map, transpose_map};

    #[test]
    fn dpi_and_sandwiched_on_random_channels() {
        let mut rng = stream_from_seed(7);
        for (din, dout) in [(2, 2), (2, 3), (3, 2)] {
            let map = gen_channel(din, dout, din * dout, &mut rng, ChannelFlavor::TracePreserving).unwrap();
            let x = gen_density(din, &mut rng);
            let y = gen_density(din, &mut rng);
            assert!(check_dpi(&map, x.matrix(), y.matrix(), false, 1e-8).unwrap().holds);
            for alpha in [1.5, 2.0, 3.0] {
                assert!(check_sandwiched_mono(&map, x.matrix(), y.matrix(), alpha, false, 1e-8).unwrap().holds);
            }
        }
    }

    #[test]
    fn transpose_is_positive_but_not_cp() {
        let mut rng = stream_from_seed(8);
        let map = transpose_map(2);
        let x = gen_density(2, &mut rng);
        let y = gen_density(2, &mut rng);
        assert!(check_dpi(&map, x.matrix(), y.matrix(), false, 1e-8).is_err());
        let out = check_sandwiched_mono(&map, x.matrix(), y.matrix(), 2.0, false, 1e-8).unwrap();
        assert!(!out.exploratory && out.margin.abs() < 1e-10);
    }

    #[test]
    fn limit_bridge_and_identity_equality() {
        let mut rng = stream_from_seed(9);
        let x = gen_density(3, &mut rng);
        let y = gen_density(3, &mut rng);
        let out = limit_bridge(x.matrix(), y.matrix(), 1e-8).unwrap();
        assert!(out.lhs <= out.rhs, "{out:?}");
        let out = check_dpi(&identity_map(3), x.matrix(), y.matrix(), false, 1e-8).unwrap();
        assert!(out.margin.abs() < 1e-12);
    }
}
