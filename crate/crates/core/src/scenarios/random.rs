use crate::error::Result;
use crate::linalg::{tensor, BipartiteLayout, ComplexMatrix};
use crate::real::Real;
use crate::state::{
    random_effect, random_mixed_state, random_pure_state, random_unitary, DensityMatrix, PreferredBasis,
};
use crate::witness::Scenario;
use nalgebra::DVector;
use num_complex::Complex;
use rand::Rng;
use rand_distr::{Distribution, Exp1};

/// Initial environment state used by [`random_scenario`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnvironmentPrior {
    /// `|e₀⟩⟨e₀|`
    Ground,
    /// Haar-random pure state.
    Pure,
    /// Full-rank random mixed state.
    Mixed,
}

/// Haar unitaries, random mixed system state, random effect, computational basis.
pub fn random_scenario<T: Real, R: Rng + ?Sized>(
    layout: BipartiteLayout,
    env: EnvironmentPrior,
    rng: &mut R,
) -> Result<Scenario<T>> {
    let rho_s0 = random_mixed_state(layout.dim_s, layout.dim_s, rng)?;
    let env0 = match env {
        EnvironmentPrior::Ground => DensityMatrix::basis(layout.dim_e, 0)?,
        EnvironmentPrior::Pure => random_pure_state(layout.dim_e, rng)?,
        EnvironmentPrior::Mixed => random_mixed_state(layout.dim_e, layout.dim_e, rng)?,
    };
    Scenario::new(
        layout,
        rho_s0,
        env0,
        random_unitary(layout.joint(), rng),
        random_unitary(layout.joint(), rng),
        random_effect(layout.dim_s, rng),
        PreferredBasis::computational(layout.dim_s),
    )
}

/// Born-approximation dynamics: product unitaries `u_s ⊗ I` and `v_s ⊗ I`
/// with the environment held in `|e₀⟩⟨e₀|` throughout.
pub fn random_born_scenario<T: Real, R: Rng + ?Sized>(layout: BipartiteLayout, rng: &mut R) -> Result<Scenario<T>> {
    let id_e = ComplexMatrix::identity(layout.dim_e);
    Scenario::new(
        layout,
        random_mixed_state(layout.dim_s, layout.dim_s, rng)?,
        DensityMatrix::basis(layout.dim_e, 0)?,
        tensor(&random_unitary(layout.dim_s, rng), &id_e),
        tensor(&random_unitary(layout.dim_s, rng), &id_e),
        random_effect(layout.dim_s, rng),
        PreferredBasis::computational(layout.dim_s),
    )
}

/// Random probability vector, uniform on the simplex.
pub fn random_weights<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<T> {
    let raw: Vec<f64> = (0..n).map(|_| Exp1.sample(rng)).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|x| T::lit(x / total)).collect()
}

/// `Σ_i p_i |i⟩⟨i| ⊗ ρ_E^i` with random weights and random environment states.
pub fn random_iq_state<T: Real, R: Rng + ?Sized>(layout: BipartiteLayout, rng: &mut R) -> Result<DensityMatrix<T>> {
    let weights = random_weights::<T, _>(layout.dim_s, rng);
    let mut terms = Vec::with_capacity(layout.dim_s);
    for i in 0..layout.dim_s {
        let env = random_mixed_state(layout.dim_e, 1 + rng.random_range(0..layout.dim_e), rng)?;
        terms.push(DensityMatrix::basis(layout.dim_s, i)?.tensor(&env));
    }
    DensityMatrix::convex(&weights, &terms)
}

/// `Σ_i |i⟩|i mod d_E⟩ / √d_S`, coherent across every system label.
pub fn correlated_coherent_vector<T: Real>(layout: BipartiteLayout) -> DVector<Complex<T>> {
    let amp = Complex::new(T::one() / T::from_count(layout.dim_s).sqrt(), T::zero());
    let mut v = DVector::zeros(layout.joint());
    for i in 0..layout.dim_s {
        v[layout.index(i, i % layout.dim_e)] = amp;
    }
    v
}

/// `(1−ε)·IQ + ε|Ψ⟩⟨Ψ|` with a random incoherent-quantum part.
pub fn perturbed_iq_state<T: Real, R: Rng + ?Sized>(
    layout: BipartiteLayout,
    eps: T,
    rng: &mut R,
) -> Result<DensityMatrix<T>> {
    let iq = random_iq_state(layout, rng)?;
    let psi = DensityMatrix::pure(&correlated_coherent_vector(layout))?;
    psi.mix(&iq, eps)
}
