//! Derivative-free maximisation over pure states, optimal effects and channel distances.

use crate::channel::{tensor_channels, KrausChannel};
use crate::error::{Error, Result};
use crate::linalg::{normalized, trace_norm, ComplexMatrix};
use crate::real::Real;
use crate::state::{gaussian_vector, positive_part_projector, DensityMatrix, Effect};
use nalgebra::DVector;
use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Consecutive rejected proposals before the step shrinks.
const FAILURE_STREAK: usize = 10;
const STEP_DECAY: f64 = 0.7;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub restarts: usize,
    /// Proposal budget per restart.
    pub max_iters: usize,
    pub step_init: f64,
    pub tol: f64,
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self { restarts: 64, max_iters: 20_000, step_init: 0.5, tol: 1e-6, seed: 0 }
    }
}

impl SearchConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::InvalidArgument("restarts must be at least 1".into()));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidArgument("max_iters must be at least 1".into()));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::InvalidArgument(format!("tol must be positive, got {}", self.tol)));
        }
        if !(self.step_init > 0.0 && self.step_init.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "step_init must be positive, got {}",
                self.step_init
            )));
        }
        Ok(())
    }
}

/// Best point found by a search, kept so the value can be re-checked.
#[derive(Debug, Clone, PartialEq)]
pub struct Optimum<T: Real> {
    pub value: T,
    pub argmax_state: DensityMatrix<T>,
    /// Helstrom effect at the argmax for distance searches; `None` for generic objectives.
    pub argmax_effect: Option<Effect<T>>,
    /// Whether the winning restart shrank its step below `tol` within budget.
    pub converged: bool,
    /// Objective evaluations summed over all restarts.
    pub evaluations: usize,
    pub restart: usize,
}

/// Positive-eigenspace projector of `delta` and the value `tr(M Δ)` it attains.
pub fn optimal_effect<T: Real>(delta: &ComplexMatrix<T>) -> Result<(Effect<T>, T)> {
    let m = positive_part_projector(delta)?;
    let value = m.matrix().trace_product_re(delta);
    Ok((m, value))
}

struct Restart<T: Real> {
    value: T,
    state: DensityMatrix<T>,
    converged: bool,
    evaluations: usize,
}

fn climb<T: Real, F>(objective: &F, dim: usize, cfg: &SearchConfig, index: usize) -> Result<Restart<T>>
where
    F: Fn(&DensityMatrix<T>) -> T,
{
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(index as u64);

    let mut psi: DVector<Complex<T>> = normalized(&gaussian_vector(dim, &mut rng));
    let mut state = DensityMatrix::pure(&psi)?;
    let mut value = objective(&state);
    let mut evaluations = 1;
    let mut step = cfg.step_init;
    let mut failures = 0;
    let mut converged = false;

    for _ in 0..cfg.max_iters {
        if step < cfg.tol {
            converged = true;
            break;
        }
        let direction = normalized(&gaussian_vector::<T, _>(dim, &mut rng));
        let candidate = &psi + direction * Complex::new(T::lit(step), T::zero());
        if candidate.norm() <= T::zero() {
            continue;
        }
        let candidate = normalized(&candidate);
        let trial = DensityMatrix::pure(&candidate)?;
        let trial_value = objective(&trial);
        evaluations += 1;
        if trial_value > value {
            psi = candidate;
            state = trial;
            value = trial_value;
            failures = 0;
        } else {
            failures += 1;
            if failures >= FAILURE_STREAK {
                step *= STEP_DECAY;
                failures = 0;
            }
        }
    }
    if step < cfg.tol {
        converged = true;
    }
    Ok(Restart { value, state, converged, evaluations })
}

/// Maximises `objective` over pure states of dimension `dim`.
///
/// Each restart runs a random-direction ascent on the unit sphere of `ℂ^dim`
/// with its own ChaCha stream `(cfg.seed, restart)`. The objective should be
/// convex in `ρ` so that the maximum over all states is attained on pure ones.
/// Ties between restarts go to the lowest restart index.
pub fn max_over_pure_states<T: Real, F>(objective: F, dim: usize, cfg: &SearchConfig) -> Result<Optimum<T>>
where
    F: Fn(&DensityMatrix<T>) -> T,
{
    cfg.validate()?;
    if dim == 0 {
        return Err(Error::InvalidArgument("dimension must be positive".into()));
    }
    let mut best: Option<(usize, Restart<T>)> = None;
    let mut evaluations = 0;
    for index in 0..cfg.restarts {
        let run = climb(&objective, dim, cfg, index)?;
        evaluations += run.evaluations;
        let better = match &best {
            None => true,
            Some((_, b)) => run.value > b.value,
        };
        if better {
            best = Some((index, run));
        }
    }
    let (restart, run) = best.expect("at least one restart");
    let value = objective(&run.state);
    Ok(Optimum {
        value,
        argmax_state: run.state,
        argmax_effect: None,
        converged: run.converged,
        evaluations,
        restart,
    })
}

fn check_same_shape<T: Real>(a: &KrausChannel<T>, b: &KrausChannel<T>) -> Result<()> {
    if a.dim_in() != b.dim_in() || a.dim_out() != b.dim_out() {
        return Err(Error::DimensionMismatch(format!(
            "channels {}→{} and {}→{}",
            a.dim_in(),
            a.dim_out(),
            b.dim_in(),
            b.dim_out()
        )));
    }
    Ok(())
}

/// `‖a(ρ) − b(ρ)‖_tr / 2` at a fixed input.
pub fn output_distance<T: Real>(a: &KrausChannel<T>, b: &KrausChannel<T>, rho: &DensityMatrix<T>) -> Result<T> {
    let diff = &a.apply(rho)?.into_matrix() - &b.apply(rho)?.into_matrix();
    Ok(trace_norm(&diff)? / T::lit(2.0))
}

fn distance_search<T: Real>(a: &KrausChannel<T>, b: &KrausChannel<T>, cfg: &SearchConfig) -> Result<Optimum<T>> {
    let objective = |rho: &DensityMatrix<T>| {
        output_distance(a, b, rho).expect("dimensions checked before the search")
    };
    let mut opt = max_over_pure_states(objective, a.dim_in(), cfg)?;
    let diff = &a.apply(&opt.argmax_state)?.into_matrix() - &b.apply(&opt.argmax_state)?.into_matrix();
    opt.argmax_effect = Some(positive_part_projector(&diff.hermitian_part())?);
    Ok(opt)
}

/// `max_ρ ‖a(ρ) − b(ρ)‖_tr / 2` over pure inputs.
pub fn induced_trace_norm_distance<T: Real>(
    a: &KrausChannel<T>,
    b: &KrausChannel<T>,
    cfg: &SearchConfig,
) -> Result<Optimum<T>> {
    check_same_shape(a, b)?;
    distance_search(a, b, cfg)
}

/// `max_ρ ‖(a⊗id − b⊗id)(ρ)‖_tr / 2` with an ancilla of the input dimension.
///
/// The argmax state lives on the layout `(d, d)` with the channel acting on
/// the first factor.
pub fn diamond_distance<T: Real>(a: &KrausChannel<T>, b: &KrausChannel<T>, cfg: &SearchConfig) -> Result<Optimum<T>> {
    check_same_shape(a, b)?;
    let ancilla = KrausChannel::identity(a.dim_in());
    distance_search(&tensor_channels(a, &ancilla), &tensor_channels(b, &ancilla), cfg)
}

/// `‖(a⊗id − b⊗id)(ρ)‖_tr / 2` at a fixed input on the layout `(d, d)`.
pub fn stabilized_output_distance<T: Real>(
    a: &KrausChannel<T>,
    b: &KrausChannel<T>,
    rho: &DensityMatrix<T>,
) -> Result<T> {
    check_same_shape(a, b)?;
    let ancilla = KrausChannel::identity(a.dim_in());
    output_distance(&tensor_channels(a, &ancilla), &tensor_channels(b, &ancilla), rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::classicalise;
    use crate::state::{maximally_coherent_state, maximally_entangled_state, random_effect, PreferredBasis};

    fn quick() -> SearchConfig {
        SearchConfig { restarts: 8, max_iters: 4000, ..SearchConfig::default() }
    }

    fn coherence_half(rho: &DensityMatrix<f64>) -> f64 {
        trace_norm(&rho.matrix().hollow()).unwrap() / 2.0
    }

    #[test]
    fn optimal_effect_on_plus_minus_mixed() {
        let delta = &maximally_coherent_state::<f64>(2).unwrap().into_matrix()
            - &DensityMatrix::maximally_mixed(2).unwrap().into_matrix();
        let (m, v) = optimal_effect(&delta).unwrap();
        assert!((v - 0.5).abs() < 1e-12);
        assert!(m.matrix().approx_eq(maximally_coherent_state::<f64>(2).unwrap().matrix(), 1e-12));
        let (_, zero) = optimal_effect(&ComplexMatrix::<f64>::zeros(3, 3)).unwrap();
        assert_eq!(zero, 0.0);
    }

    #[test]
    fn optimal_effect_beats_random_effects() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = crate::state::random_mixed_state::<f64, _>(4, 4, &mut rng).unwrap();
        let b = crate::state::random_mixed_state::<f64, _>(4, 2, &mut rng).unwrap();
        let delta = a.matrix() - b.matrix();
        let (_, best) = optimal_effect(&delta).unwrap();
        assert!((best - trace_norm(&delta).unwrap() / 2.0).abs() < 1e-9);
        for _ in 0..100 {
            let m = random_effect::<f64, _>(4, &mut rng);
            assert!(m.matrix().trace_product_re(&delta) <= best + 1e-12);
        }
    }

    #[test]
    fn constant_objective_converges() {
        let opt = max_over_pure_states(|_: &DensityMatrix<f64>| 0.25, 3, &quick()).unwrap();
        assert_eq!(opt.value, 0.25);
        assert!(opt.converged);
        assert!(opt.argmax_effect.is_none());
    }

    #[test]
    fn isolated_maximum_at_qubit() {
        let opt = max_over_pure_states(coherence_half, 2, &quick()).unwrap();
        assert!((opt.value - 0.5).abs() < 1e-4, "{}", opt.value);
        assert_eq!(opt.value, coherence_half(&opt.argmax_state));
        let rho = opt.argmax_state.matrix();
        assert!((rho.get(0, 0).re - 0.5).abs() < 1e-2);
        assert!((rho.get(0, 1).norm() - 0.5).abs() < 1e-2);
    }

    #[test]
    fn search_is_deterministic() {
        let a = max_over_pure_states(coherence_half, 3, &quick().with_seed(9)).unwrap();
        let b = max_over_pure_states(coherence_half, 3, &quick().with_seed(9)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_bad_config() {
        let cfg = SearchConfig { restarts: 0, ..SearchConfig::default() };
        assert!(max_over_pure_states(coherence_half, 2, &cfg).is_err());
        let cfg = SearchConfig { tol: 0.0, ..SearchConfig::default() };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn identical_channels_have_zero_distance() {
        let g = classicalise::<f64>(&PreferredBasis::computational(2));
        let opt = induced_trace_norm_distance(&g, &g, &quick()).unwrap();
        assert!(opt.value.abs() < 1e-12);
    }

    #[test]
    fn diamond_value_at_fixed_inputs() {
        let d = 3;
        let id = KrausChannel::<f64>::identity(d);
        let g = classicalise(&PreferredBasis::computational(d));
        let psi = maximally_entangled_state::<f64>(d).unwrap();
        let v = stabilized_output_distance(&id, &g, &psi).unwrap();
        assert!((v - (1.0 - 1.0 / d as f64)).abs() < 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let env = crate::state::random_mixed_state::<f64, _>(d, d, &mut rng).unwrap();
        let product = maximally_coherent_state::<f64>(d).unwrap().tensor(&env);
        let v = stabilized_output_distance(&id, &g, &product).unwrap();
        assert!((v - (1.0 - 1.0 / d as f64)).abs() < 1e-12);
    }

    #[test]
    fn mismatched_channels_rejected() {
        let a = KrausChannel::<f64>::identity(2);
        let b = KrausChannel::<f64>::identity(3);
        assert!(induced_trace_norm_distance(&a, &b, &quick()).is_err());
        assert!(diamond_distance(&a, &b, &quick()).is_err());
    }
}
