use crate::channel::{Interruption, InterruptionKind};
use crate::error::{Error, Result};
use crate::linalg::{partial_trace, BipartiteLayout, ComplexMatrix, Subsystem};
use crate::real::Real;
use crate::state::{DensityMatrix, Effect, PreferredBasis};

/// A two-time experiment on system and environment.
///
/// The joint state starts as the product `ρ_S(0) ⊗ env0`, evolves under
/// `u_tau0` to the interruption time and under `u_t_tau` to the final
/// measurement of `m` on the system.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario<T: Real> {
    layout: BipartiteLayout,
    rho_s0: DensityMatrix<T>,
    env0: DensityMatrix<T>,
    u_tau0: ComplexMatrix<T>,
    u_t_tau: ComplexMatrix<T>,
    m: Effect<T>,
    basis: PreferredBasis,
}

fn check_dim(what: &str, got: usize, want: usize) -> Result<()> {
    if got != want {
        return Err(Error::DimensionMismatch(format!("{what} has dimension {got}, expected {want}")));
    }
    Ok(())
}

impl<T: Real> Scenario<T> {
    pub fn new(
        layout: BipartiteLayout,
        rho_s0: DensityMatrix<T>,
        env0: DensityMatrix<T>,
        u_tau0: ComplexMatrix<T>,
        u_t_tau: ComplexMatrix<T>,
        m: Effect<T>,
        basis: PreferredBasis,
    ) -> Result<Self> {
        layout.validate()?;
        check_dim("initial system state", rho_s0.dim(), layout.dim_s)?;
        check_dim("initial environment state", env0.dim(), layout.dim_e)?;
        check_dim("effect", m.dim(), layout.dim_s)?;
        check_dim("preferred basis", basis.dim(), layout.dim_s)?;
        for (name, u) in [("U(tau,0)", &u_tau0), ("U(T,tau)", &u_t_tau)] {
            if u.rows() != layout.joint() || u.cols() != layout.joint() {
                return Err(Error::DimensionMismatch(format!(
                    "{name} is {}x{}, expected {n}x{n}",
                    u.rows(),
                    u.cols(),
                    n = layout.joint()
                )));
            }
            u.ensure_unitary()?;
        }
        Ok(Self { layout, rho_s0, env0, u_tau0, u_t_tau, m, basis })
    }

    pub fn layout(&self) -> BipartiteLayout {
        self.layout
    }

    pub fn rho_s0(&self) -> &DensityMatrix<T> {
        &self.rho_s0
    }

    pub fn env0(&self) -> &DensityMatrix<T> {
        &self.env0
    }

    pub fn u_tau0(&self) -> &ComplexMatrix<T> {
        &self.u_tau0
    }

    pub fn u_t_tau(&self) -> &ComplexMatrix<T> {
        &self.u_t_tau
    }

    pub fn effect(&self) -> &Effect<T> {
        &self.m
    }

    pub fn basis(&self) -> &PreferredBasis {
        &self.basis
    }

    /// Same dynamics and measurement from a different initial system state.
    pub fn with_initial_state(&self, rho_s0: DensityMatrix<T>) -> Result<Self> {
        check_dim("initial system state", rho_s0.dim(), self.layout.dim_s)?;
        Ok(Self { rho_s0, ..self.clone() })
    }

    pub fn with_effect(&self, m: Effect<T>) -> Result<Self> {
        check_dim("effect", m.dim(), self.layout.dim_s)?;
        Ok(Self { m, ..self.clone() })
    }

    /// `ρ_S(0) ⊗ env0`.
    pub fn initial_state(&self) -> DensityMatrix<T> {
        self.rho_s0.tensor(&self.env0)
    }

    /// `ρ_SE(τ) = U(τ,0) ρ_SE(0) U(τ,0)†`.
    pub fn state_at_tau(&self) -> DensityMatrix<T> {
        let m = self.initial_state().into_matrix().conjugate_by(&self.u_tau0);
        DensityMatrix::from_trusted(m.hermitian_part())
    }

    pub fn system_state_at_tau(&self) -> DensityMatrix<T> {
        reduce(&self.state_at_tau(), self.layout, Subsystem::System)
    }

    pub fn environment_state_at_tau(&self) -> DensityMatrix<T> {
        reduce(&self.state_at_tau(), self.layout, Subsystem::Environment)
    }

    /// Interruption of the given kind whose environment reset restores `env0`.
    pub fn interruption(&self, kind: InterruptionKind) -> Interruption<T> {
        Interruption { kind, layout: self.layout, env_reset_target: self.env0.clone() }
    }
}

pub(crate) fn reduce<T: Real>(rho: &DensityMatrix<T>, layout: BipartiteLayout, keep: Subsystem) -> DensityMatrix<T> {
    let m = partial_trace(rho.matrix(), layout, keep).expect("joint state matches its layout");
    DensityMatrix::from_trusted(m.hermitian_part())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn layout() -> BipartiteLayout {
        BipartiteLayout::new(2, 2).unwrap()
    }

    fn trivial() -> Scenario<f64> {
        Scenario::new(
            layout(),
            DensityMatrix::basis(2, 0).unwrap(),
            DensityMatrix::basis(2, 0).unwrap(),
            ComplexMatrix::identity(4),
            ComplexMatrix::identity(4),
            Effect::basis_projector(2, 0).unwrap(),
            PreferredBasis::computational(2),
        )
        .unwrap()
    }

    #[test]
    fn rejects_non_unitary_and_bad_dimensions() {
        let sc = trivial();
        let bad = ComplexMatrix::identity(4).scale(2.0);
        let err = Scenario::new(
            layout(),
            sc.rho_s0().clone(),
            sc.env0().clone(),
            bad,
            ComplexMatrix::identity(4),
            sc.effect().clone(),
            PreferredBasis::computational(2),
        );
        assert!(matches!(err, Err(Error::NotUnitary(_))));
        let err = Scenario::new(
            layout(),
            DensityMatrix::basis(3, 0).unwrap(),
            sc.env0().clone(),
            ComplexMatrix::identity(4),
            ComplexMatrix::identity(4),
            sc.effect().clone(),
            PreferredBasis::computational(2),
        );
        assert!(matches!(err, Err(Error::DimensionMismatch(_))));
        assert!(sc.with_effect(Effect::identity(3)).is_err());
    }

    #[test]
    fn initial_state_is_product() {
        let sc = trivial();
        assert!(sc.initial_state().matrix().approx_eq(&ComplexMatrix::matrix_unit(4, 0, 0), 1e-15));
        assert!(sc.system_state_at_tau().matrix().approx_eq(sc.rho_s0().matrix(), 1e-15));
        assert!(sc.environment_state_at_tau().matrix().approx_eq(sc.env0().matrix(), 1e-15));
    }
}
