use super::scenario::{reduce, Scenario};
use crate::channel::{interruption_channel, Interruption, InterruptionKind};
use crate::error::{Error, Result};
use crate::linalg::{tensor, trace_norm, BipartiteLayout, ComplexMatrix, Subsystem};
use crate::real::Real;
use crate::state::{DensityMatrix, Effect, PreferredBasis};

/// `ρ^i_S(T) = tr_E[U(T,τ) E^i(ρ_SE(τ)) U(T,τ)†]`.
pub fn final_system_state<T: Real>(sc: &Scenario<T>, intr: &Interruption<T>) -> Result<DensityMatrix<T>> {
    if intr.layout != sc.layout() {
        return Err(Error::DimensionMismatch(format!(
            "interruption layout {}x{} for scenario layout {}x{}",
            intr.layout.dim_s,
            intr.layout.dim_e,
            sc.layout().dim_s,
            sc.layout().dim_e
        )));
    }
    let channel = interruption_channel(intr, sc.basis())?;
    let interrupted = channel.apply(&sc.state_at_tau())?;
    let evolved = interrupted.into_matrix().conjugate_by(sc.u_t_tau());
    Ok(reduce(&DensityMatrix::from_trusted(evolved.hermitian_part()), sc.layout(), Subsystem::System))
}

/// Probability `P^i` of the effect at the final time under an interruption.
pub fn probability<T: Real>(sc: &Scenario<T>, intr: &Interruption<T>) -> Result<T> {
    Ok(sc.effect().expectation(&final_system_state(sc, intr)?))
}

/// `W^a` for an arbitrary joint state at the interruption time followed by
/// `u_t_tau` and a measurement of `m` on the system.
pub fn w_a_for_state<T: Real>(
    rho_se: &DensityMatrix<T>,
    u_t_tau: &ComplexMatrix<T>,
    m: &Effect<T>,
    layout: BipartiteLayout,
    basis: &PreferredBasis,
) -> Result<T> {
    if rho_se.dim() != layout.joint() || u_t_tau.rows() != layout.joint() || m.dim() != layout.dim_s {
        return Err(Error::DimensionMismatch("state, continuation and effect must match the layout".into()));
    }
    let gamma = interruption_channel(&Interruption::zero_temperature(InterruptionKind::DynamicallyClassicalise, layout)?, basis)?;
    let diff = rho_se.matrix() - &gamma.apply_matrix(rho_se.matrix())?;
    let m_joint = tensor(m.matrix(), &ComplexMatrix::identity(layout.dim_e));
    Ok(m_joint.trace_product_re(&diff.conjugate_by(u_t_tau)))
}

fn check_square_pair<T: Real>(rho: &DensityMatrix<T>, m: &Effect<T>) -> Result<()> {
    if rho.dim() != m.dim() {
        return Err(Error::DimensionMismatch(format!(
            "state of dimension {} with effect of dimension {}",
            rho.dim(),
            m.dim()
        )));
    }
    Ok(())
}

/// `tr(M′[ρ − Γ(ρ)])`, the isolated witness for state `ρ` at the interruption time.
pub fn w_isolated<T: Real>(rho_tau: &DensityMatrix<T>, m_eff: &Effect<T>) -> Result<T> {
    check_square_pair(rho_tau, m_eff)?;
    Ok(m_eff.matrix().trace_product_re(&rho_tau.matrix().hollow()))
}

/// Vulnerability of coherence `R(ρ) = ‖ρ − Γ(ρ)‖_tr`.
pub fn r_monotone<T: Real>(rho: &DensityMatrix<T>) -> T {
    trace_norm(&rho.matrix().hollow()).expect("density matrices are square")
}
