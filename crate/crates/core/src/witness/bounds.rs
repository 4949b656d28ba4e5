use super::decompose::{correlation_split, measurement_maps};
use super::engine::{probability, r_monotone};
use super::scenario::Scenario;
use crate::channel::InterruptionKind;
use crate::error::{Error, Result};
use crate::linalg::trace_norm;
use crate::optimize::{induced_trace_norm_distance, SearchConfig};
use crate::real::Real;
use serde::{Deserialize, Serialize};

/// Both sides of an inequality `lhs ≥ rhs` (or `lhs ≤ rhs` for upper bounds),
/// with `slack ≥ 0` exactly when it holds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct BoundRecord<T: Real> {
    pub lhs: T,
    pub rhs: T,
    pub slack: T,
}

impl<T: Real> BoundRecord<T> {
    pub fn lower(lhs: T, rhs: T) -> Self {
        Self { lhs, rhs, slack: lhs - rhs }
    }

    pub fn upper(lhs: T, rhs: T) -> Self {
        Self { lhs, rhs, slack: rhs - lhs }
    }

    pub fn holds(&self, tol: T) -> bool {
        self.slack >= -tol
    }
}

fn p<T: Real>(sc: &Scenario<T>, kind: InterruptionKind) -> Result<T> {
    probability(sc, &sc.interruption(kind))
}

/// `R(ρ_S(τ)) ≥ 2|W^a| − 2‖χ_SE(τ)‖_tr`.
pub fn bound_check_thm4<T: Real>(sc: &Scenario<T>) -> Result<BoundRecord<T>> {
    let two = T::lit(2.0);
    let w_a = p(sc, InterruptionKind::DoNothing)? - p(sc, InterruptionKind::DynamicallyClassicalise)?;
    let split = correlation_split(&sc.state_at_tau(), sc.layout())?;
    Ok(BoundRecord::lower(r_monotone(&split.rho_s), two * w_a.abs() - two * split.chi_trace_norm()))
}

/// `R(ρ_S(τ)) ≥ 2|W^b| − 2‖χ_SE(τ)‖_tr − 2‖ρ_E(τ) − env0‖_tr`.
pub fn bound_check_wb<T: Real>(sc: &Scenario<T>) -> Result<BoundRecord<T>> {
    let two = T::lit(2.0);
    let w_b = p(sc, InterruptionKind::DoNothing)? - p(sc, InterruptionKind::PiecewiseClassicalise)?;
    let split = correlation_split(&sc.state_at_tau(), sc.layout())?;
    let displacement = trace_norm(&(split.rho_e.matrix() - sc.env0().matrix()))?;
    Ok(BoundRecord::lower(
        r_monotone(&split.rho_s),
        two * w_b.abs() - two * split.chi_trace_norm() - two * displacement,
    ))
}

/// `max_ρ ‖(E_I − E_IV)(ρ)‖_tr ≤ ‖ρ_E(τ) − env0‖_tr`, the left side found by search.
pub fn prop1_check<T: Real>(sc: &Scenario<T>, cfg: &SearchConfig) -> Result<BoundRecord<T>> {
    let maps = measurement_maps(sc)?;
    let opt = induced_trace_norm_distance(&maps.measure_i, &maps.measure_iv, cfg)?;
    let rhs = trace_norm(&(sc.environment_state_at_tau().matrix() - sc.env0().matrix()))?;
    Ok(BoundRecord::upper(T::lit(2.0) * opt.value, rhs))
}

/// Smallest dimension compatible with an isolated witness value, `⌈1/(1−|w|)⌉`.
pub fn dimension_lower_bound<T: Real>(w: T) -> Result<usize> {
    let a = w.abs();
    if a >= T::one() || !a.is_finite() {
        return Err(Error::InvalidArgument(format!("witness magnitude {a} must be below 1")));
    }
    let raw = (T::one() / (T::one() - a) - T::decomposition_tol()).ceil();
    Ok(raw.as_f64().max(1.0) as usize)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimension_bound_examples() {
        assert_eq!(dimension_lower_bound(0.0f64).unwrap(), 1);
        assert_eq!(dimension_lower_bound(0.5f64).unwrap(), 2);
        assert_eq!(dimension_lower_bound(-0.75f64).unwrap(), 4);
        assert_eq!(dimension_lower_bound(1.0 - 1.0 / 3.0f64).unwrap(), 3);
        assert_eq!(dimension_lower_bound(0.51f64).unwrap(), 3);
        assert!(dimension_lower_bound(1.0f64).is_err());
        assert!(dimension_lower_bound(f64::NAN).is_err());
        assert_eq!(dimension_lower_bound(0.5f32).unwrap(), 2);
    }

    #[test]
    fn record_signs() {
        assert!(BoundRecord::lower(1.0, 0.5).holds(0.0));
        assert!(!BoundRecord::upper(1.0, 0.5).holds(1e-9));
        assert_eq!(BoundRecord::upper(2.0, 2.0).slack, 0.0);
    }
}
