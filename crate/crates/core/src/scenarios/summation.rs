use crate::error::{Error, Result};
use crate::real::Real;
use crate::state::{DensityMatrix, Effect, PreferredBasis};
use crate::witness::{correlation_split, measurement_maps, Scenario};
use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SummationOptions {
    /// A prefix must exceed its target by more than this to stop.
    pub tolerance: f64,
    /// Switch to the complemented effect when `p_m(T) > 1/2`.
    pub complement: bool,
}

impl Default for SummationOptions {
    fn default() -> Self {
        Self { tolerance: 1e-9, complement: true }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Series {
    Direct,
    Complement,
}

/// Sequential accumulation of `Σ_n p_n(τ) Ω_mn(T,τ)` with early stopping.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct PartialSummationTrace<T: Real> {
    /// `p_m(T)`, or `q_m(T) = 1 − p_m(T)` when the complement is used.
    pub target: T,
    /// Summands in summation order, complemented when the complement is used.
    pub terms: Vec<T>,
    pub running_sums: Vec<T>,
    pub stop_index: Option<usize>,
    pub complement_used: bool,
    /// Basis labels in the order they were summed.
    pub order: Vec<usize>,
    /// `p_m(T)` and the uncomplemented prefix sums, which are also watched
    /// when the complement is used.
    pub direct_target: T,
    pub direct_running_sums: Vec<T>,
    pub stopped_by: Option<Series>,
    /// `|target − full sum|`, equal to `|W^isolated|`.
    pub witness: T,
}

fn prefix_sums<T: Real>(terms: &[T]) -> Vec<T> {
    let mut acc = T::zero();
    terms
        .iter()
        .map(|t| {
            acc += *t;
            acc
        })
        .collect()
}

fn first_crossing<T: Real>(sums: &[T], target: T, tol: T) -> Option<usize> {
    sums.iter().position(|s| *s > target + tol)
}

/// Runs the stopping rule on precomputed `p_m(T)` and joint probabilities `p_n Ω_mn`.
///
/// `complement_terms[n]` is `p_n (1 − Ω_mn)`.
pub fn summation_from_values<T: Real>(
    p_m: T,
    direct_terms: Vec<T>,
    complement_terms: Vec<T>,
    order: Vec<usize>,
    opts: &SummationOptions,
) -> Result<PartialSummationTrace<T>> {
    if direct_terms.len() != complement_terms.len() || direct_terms.len() != order.len() {
        return Err(Error::DimensionMismatch("summand lists differ in length".into()));
    }
    if opts.tolerance < 0.0 || !opts.tolerance.is_finite() {
        return Err(Error::InvalidArgument(format!("tolerance {} must be nonnegative", opts.tolerance)));
    }
    let tol = T::lit(opts.tolerance);
    let direct_running_sums = prefix_sums(&direct_terms);
    let direct_stop = first_crossing(&direct_running_sums, p_m, tol);
    let complement_used = opts.complement && p_m > T::lit(0.5);

    let (target, terms, running_sums, stop_index, stopped_by) = if complement_used {
        let q_m = T::one() - p_m;
        let sums = prefix_sums(&complement_terms);
        let complement_stop = first_crossing(&sums, q_m, tol);
        let (stop, by) = match (direct_stop, complement_stop) {
            (Some(a), Some(b)) if a < b => (Some(a), Some(Series::Direct)),
            (_, Some(b)) => (Some(b), Some(Series::Complement)),
            (Some(a), None) => (Some(a), Some(Series::Direct)),
            (None, None) => (None, None),
        };
        (q_m, complement_terms, sums, stop, by)
    } else {
        let by = direct_stop.map(|_| Series::Direct);
        (p_m, direct_terms, direct_running_sums.clone(), direct_stop, by)
    };
    let full = running_sums.last().copied().unwrap_or_else(T::zero);
    Ok(PartialSummationTrace {
        target,
        terms,
        witness: (target - full).abs(),
        running_sums,
        stop_index,
        complement_used,
        order,
        direct_target: p_m,
        direct_running_sums,
        stopped_by,
    })
}

struct Summands<T: Real> {
    p_m: T,
    direct: Vec<T>,
    complement: Vec<T>,
    order: Vec<usize>,
}

fn summands<T: Real>(rho: &DensityMatrix<T>, m_eff: &Effect<T>, basis: &PreferredBasis) -> Result<Summands<T>> {
    if rho.dim() != m_eff.dim() || basis.dim() != rho.dim() {
        return Err(Error::DimensionMismatch("state, effect and basis must share a dimension".into()));
    }
    let clamp = |x: T| if x < T::zero() { T::zero() } else { x };
    let order = basis.ordering().to_vec();
    let mut direct = Vec::with_capacity(order.len());
    let mut complement = Vec::with_capacity(order.len());
    for &n in &order {
        let p_n = rho.population(n);
        let omega = m_eff.matrix().get(n, n).re;
        direct.push(clamp(p_n * omega));
        complement.push(clamp(p_n * (T::one() - omega)));
    }
    Ok(Summands { p_m: m_eff.expectation(rho), direct, complement, order })
}

/// Partial summation for an isolated state `ρ(τ)` and effective effect `M′`.
pub fn partial_summation_pair<T: Real>(
    rho: &DensityMatrix<T>,
    m_eff: &Effect<T>,
    basis: &PreferredBasis,
    opts: &SummationOptions,
) -> Result<PartialSummationTrace<T>> {
    let s = summands(rho, m_eff, basis)?;
    summation_from_values(s.p_m, s.direct, s.complement, s.order, opts)
}

/// Reduced state and effective effect of a scenario whose environment stays
/// uncorrelated and unmoved, so that conditional probabilities exist.
pub fn isolated_reduction<T: Real>(sc: &Scenario<T>) -> Result<(DensityMatrix<T>, Effect<T>)> {
    let tol = T::decomposition_tol();
    let split = correlation_split(&sc.state_at_tau(), sc.layout())?;
    let chi = split.chi_trace_norm();
    if chi > tol {
        return Err(Error::NotBornApproximation(format!("correlation norm {chi:e} at the interruption time")));
    }
    let moved = crate::linalg::trace_norm(&(split.rho_e.matrix() - sc.env0().matrix()))?;
    if moved > tol {
        return Err(Error::NotBornApproximation(format!("environment displaced by {moved:e}")));
    }
    let maps = measurement_maps(sc)?;
    let m_eff = maps.measure_iv.dual().apply_effect(sc.effect())?;
    Ok((split.rho_s, m_eff))
}

/// Partial summation on a scenario satisfying the Born approximation.
pub fn partial_summation<T: Real>(sc: &Scenario<T>, opts: &SummationOptions) -> Result<PartialSummationTrace<T>> {
    let (rho, m_eff) = isolated_reduction(sc)?;
    partial_summation_pair(&rho, &m_eff, sc.basis(), opts)
}

fn sample<T: Real, R: Rng + ?Sized>(p: T, shots: u64, rng: &mut R) -> Result<T> {
    let p = p.as_f64().clamp(0.0, 1.0);
    let k = Binomial::new(shots, p).map_err(|e| Error::InvalidArgument(e.to_string()))?.sample(rng);
    Ok(T::lit(k as f64 / shots as f64))
}

/// Partial summation with every probability replaced by a binomial estimate from `shots` runs.
pub fn partial_summation_sampled<T: Real, R: Rng + ?Sized>(
    rho: &DensityMatrix<T>,
    m_eff: &Effect<T>,
    basis: &PreferredBasis,
    shots: u64,
    opts: &SummationOptions,
    rng: &mut R,
) -> Result<PartialSummationTrace<T>> {
    if shots == 0 {
        return Err(Error::InvalidArgument("shot count must be positive".into()));
    }
    let s = summands(rho, m_eff, basis)?;
    let p_m = sample(s.p_m, shots, rng)?;
    let mut direct = Vec::with_capacity(s.direct.len());
    let mut complement = Vec::with_capacity(s.direct.len());
    for (d, c) in s.direct.iter().zip(&s.complement) {
        direct.push(sample(*d, shots, rng)?);
        complement.push(sample(*c, shots, rng)?);
    }
    summation_from_values(p_m, direct, complement, s.order, opts)
}
