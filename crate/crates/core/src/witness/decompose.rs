use super::scenario::{reduce, Scenario};
use crate::channel::{classicalise, kraus_from_joint_unitary, tensor_channels, KrausChannel};
use crate::error::{Error, Result};
use crate::linalg::{partial_trace, tensor, trace_norm, BipartiteLayout, ComplexMatrix, Subsystem};
use crate::real::Real;
use crate::state::{DensityMatrix, PreferredBasis};
use serde::{Deserialize, Serialize};

/// `ρ_SE = ρ_S ⊗ ρ_E + χ`.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationSplit<T: Real> {
    pub rho_s: DensityMatrix<T>,
    pub rho_e: DensityMatrix<T>,
    pub chi: ComplexMatrix<T>,
}

impl<T: Real> CorrelationSplit<T> {
    pub fn chi_trace_norm(&self) -> T {
        trace_norm(&self.chi).expect("square correlation matrix")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct WaTerms<T: Real> {
    pub coherence_term: T,
    pub correlation_term: T,
}

impl<T: Real> WaTerms<T> {
    pub fn total(&self) -> T {
        self.coherence_term + self.correlation_term
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct WbTerms<T: Real> {
    pub chi_term: T,
    pub coherence_term: T,
    pub map_mismatch_term: T,
}

impl<T: Real> WbTerms<T> {
    pub fn total(&self) -> T {
        self.chi_term + self.coherence_term + self.map_mismatch_term
    }
}

/// Reduced dynamics before and after the interruption.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementMaps<T: Real> {
    /// `ρ_S(0) ↦ tr_E[U(τ,0)(ρ_S(0) ⊗ env0)U(τ,0)†]`
    pub prepare_iv: KrausChannel<T>,
    /// `ρ ↦ tr_E[U(T,τ)(ρ ⊗ env0)U(T,τ)†]`
    pub measure_iv: KrausChannel<T>,
    /// `ρ ↦ tr_E[U(T,τ)(ρ ⊗ ρ_E(τ))U(T,τ)†]`
    pub measure_i: KrausChannel<T>,
}

fn check_joint<T: Real>(rho: &DensityMatrix<T>, layout: BipartiteLayout) -> Result<()> {
    if rho.dim() != layout.joint() {
        return Err(Error::DimensionMismatch(format!(
            "joint state of dimension {} for layout {}x{}",
            rho.dim(),
            layout.dim_s,
            layout.dim_e
        )));
    }
    Ok(())
}

pub fn correlation_split<T: Real>(rho_se: &DensityMatrix<T>, layout: BipartiteLayout) -> Result<CorrelationSplit<T>> {
    check_joint(rho_se, layout)?;
    let rho_s = reduce(rho_se, layout, Subsystem::System);
    let rho_e = reduce(rho_se, layout, Subsystem::Environment);
    let chi = rho_se.matrix() - &tensor(rho_s.matrix(), rho_e.matrix());
    Ok(CorrelationSplit { rho_s, rho_e, chi })
}

/// `tr[(M⊗I) U X U†]` with `U = U(T,τ)`.
fn final_expectation<T: Real>(sc: &Scenario<T>, x: &ComplexMatrix<T>) -> T {
    let m = tensor(sc.effect().matrix(), &ComplexMatrix::identity(sc.layout().dim_e));
    m.trace_product_re(&x.conjugate_by(sc.u_t_tau()))
}

fn gamma_on_system<T: Real>(basis: &PreferredBasis, dim_e: usize) -> KrausChannel<T> {
    tensor_channels(&classicalise(basis), &KrausChannel::identity(dim_e))
}

/// Splits `W^a` into the coherence of `ρ_S(τ)` and the correlation contribution.
///
/// The coherence term is `tr(M″[ρ_S(τ) − Γρ_S(τ)])` with
/// `M″ = tr_E[(I⊗ρ_E(τ)) U†(M⊗I)U]`, which is an effect because the
/// environment weighting is a state.
pub fn decompose_w_a<T: Real>(sc: &Scenario<T>) -> Result<WaTerms<T>> {
    let layout = sc.layout();
    let split = correlation_split(&sc.state_at_tau(), layout)?;
    let gamma = gamma_on_system::<T>(sc.basis(), layout.dim_e);

    let heisenberg =
        tensor(sc.effect().matrix(), &ComplexMatrix::identity(layout.dim_e)).conjugate_by(&sc.u_t_tau().adjoint());
    let weighted = &heisenberg * &tensor(&ComplexMatrix::identity(layout.dim_s), split.rho_e.matrix());
    let m2 = partial_trace(&weighted, layout, Subsystem::System)?.hermitian_part();
    let coherence_term = m2.trace_product_re(&split.rho_s.matrix().hollow());

    let chi_incoherent = &split.chi - &gamma.apply_matrix(&split.chi)?;
    let correlation_term = final_expectation(sc, &chi_incoherent);
    Ok(WaTerms { coherence_term, correlation_term })
}

pub fn measurement_maps<T: Real>(sc: &Scenario<T>) -> Result<MeasurementMaps<T>> {
    let layout = sc.layout();
    Ok(MeasurementMaps {
        prepare_iv: kraus_from_joint_unitary(sc.u_tau0(), sc.env0(), layout)?,
        measure_iv: kraus_from_joint_unitary(sc.u_t_tau(), sc.env0(), layout)?,
        measure_i: kraus_from_joint_unitary(sc.u_t_tau(), &sc.environment_state_at_tau(), layout)?,
    })
}

/// Splits `W^b` into correlation, coherence and measurement-map mismatch terms.
///
/// `chi_term = tr[(M⊗I) U χ U†]`,
/// `coherence_term = tr(E_IV†(M)[ρ_S(τ) − Γρ_S(τ)])`,
/// `map_mismatch_term = tr((E_I† − E_IV†)(M) ρ_S(τ))`.
pub fn decompose_w_b<T: Real>(sc: &Scenario<T>) -> Result<WbTerms<T>> {
    let split = correlation_split(&sc.state_at_tau(), sc.layout())?;
    let maps = measurement_maps(sc)?;
    let m = sc.effect().matrix();
    let m_iv = maps.measure_iv.dual().apply_matrix(m)?;
    let m_i = maps.measure_i.dual().apply_matrix(m)?;
    Ok(WbTerms {
        chi_term: final_expectation(sc, &split.chi),
        coherence_term: m_iv.trace_product_re(&split.rho_s.matrix().hollow()),
        map_mismatch_term: (&m_i - &m_iv).trace_product_re(split.rho_s.matrix()),
    })
}

/// `‖ρ_SE − (Γ⊗id)ρ_SE‖_tr / 2`; zero exactly on incoherent-quantum states.
pub fn iq_distance<T: Real>(rho_se: &DensityMatrix<T>, layout: BipartiteLayout, basis: &PreferredBasis) -> Result<T> {
    check_joint(rho_se, layout)?;
    if basis.dim() != layout.dim_s {
        return Err(Error::DimensionMismatch("basis does not match the system factor".into()));
    }
    let gamma = gamma_on_system::<T>(basis, layout.dim_e);
    let diff = rho_se.matrix() - &gamma.apply_matrix(rho_se.matrix())?;
    Ok(trace_norm(&diff)? / T::lit(2.0))
}

pub fn is_iq<T: Real>(rho_se: &DensityMatrix<T>, layout: BipartiteLayout, basis: &PreferredBasis, tol: T) -> Result<bool> {
    Ok(iq_distance(rho_se, layout, basis)? <= tol)
}
