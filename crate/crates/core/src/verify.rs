//! Deterministic verification suite covering the theorems and worked examples.
//!
//! Every check is a list of [`CheckPart`]s. A part compares a measured value
//! with a target under a tolerance and reports the slack, which is
//! nonnegative exactly when the part passes.

use crate::channel::{classicalise, dephase, KrausChannel, PhaseDistribution};
use crate::error::{Error, Result};
use crate::linalg::{BipartiteLayout, ComplexMatrix};
use crate::optimize::{
    diamond_distance, induced_trace_norm_distance, max_over_pure_states, stabilized_output_distance, SearchConfig,
};
use crate::scenarios::gates::hadamard;
use crate::scenarios::{
    baseline_family, baseline_interval, bell_scenario, classical_false_positive_scenario, epsilon_mixture_scenario,
    partial_summation_pair, perturbed_iq_state, random_born_scenario, random_iq_state, random_scenario, random_weights, EnvironmentPrior, ScenarioBody, SummationOptions, WitnessKind,
};
use crate::state::{
    maximally_coherent_state, maximally_entangled_state, random_effect, random_mixed_state, DensityMatrix, Effect,
    PreferredBasis,
};
use crate::witness::{
    apply_superchannel, bound_check_thm4, bound_check_wb, build_superchannel, prop1_check,
    r_monotone, witness_suite, Scenario, SCHEMA_VERSION,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Check names in suite order; the position is the criterion number minus one.
pub const CHECK_NAMES: [&str; 13] = [
    "isolated-maximum",
    "diamond",
    "ancilla",
    "bell",
    "epsilon-mixture",
    "false-positive",
    "faithfulness",
    "bounds",
    "superchannel",
    "gamma",
    "partial-summation",
    "baseline",
    "born",
];

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct VerifyOptions {
    pub seed: u64,
    pub search: SearchConfig,
    /// Run a single check by name.
    pub only: Option<String>,
    /// Overrides the dimensions used by `isolated-maximum`, `diamond`, `ancilla` and `gamma`.
    pub dims: Option<Vec<usize>>,
    /// Keys are `check.class` for one tolerance class or `check` for every part of a check.
    pub tolerances: BTreeMap<String, f64>,
}

impl VerifyOptions {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self.search.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.search.validate()?;
        if let Some(name) = &self.only {
            check_index(name)?;
        }
        if let Some(dims) = &self.dims {
            if dims.is_empty() || dims.iter().any(|&d| !(2..=crate::linalg::MAX_FACTOR_DIM).contains(&d)) {
                return Err(Error::InvalidArgument(format!(
                    "dimensions must lie in 2..={}",
                    crate::linalg::MAX_FACTOR_DIM
                )));
            }
        }
        for (key, value) in &self.tolerances {
            let check = key.split('.').next().unwrap_or_default();
            check_index(check)?;
            if !(*value >= 0.0 && value.is_finite()) {
                return Err(Error::InvalidArgument(format!("tolerance {key}={value} must be nonnegative")));
            }
        }
        Ok(())
    }
}

fn check_index(name: &str) -> Result<usize> {
    CHECK_NAMES
        .iter()
        .position(|n| *n == name)
        .ok_or_else(|| Error::InvalidArgument(format!("unknown check {name:?}")))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    /// `|value − target| ≤ tolerance`
    Equal,
    /// `value ≥ target − tolerance`
    AtLeast,
    /// `value ≤ target + tolerance`
    AtMost,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckPart {
    pub label: String,
    pub class: String,
    pub comparison: Comparison,
    pub value: f64,
    pub target: f64,
    pub tolerance: f64,
    pub slack: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub criterion: usize,
    pub passed: bool,
    /// Smallest slack over the parts.
    pub slack: f64,
    pub parts: Vec<CheckPart>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub schema_version: u32,
    pub seed: u64,
    pub passed: bool,
    pub checks: Vec<CheckResult>,
}

struct Parts<'a> {
    check: &'a str,
    overrides: &'a BTreeMap<String, f64>,
    parts: Vec<CheckPart>,
}

impl Parts<'_> {
    fn tolerance(&self, class: &str, default: f64) -> f64 {
        self.overrides
            .get(&format!("{}.{class}", self.check))
            .or_else(|| self.overrides.get(self.check))
            .copied()
            .unwrap_or(default)
    }

    fn push(&mut self, label: String, class: &str, comparison: Comparison, value: f64, target: f64, default: f64) {
        let tolerance = self.tolerance(class, default);
        let slack = match comparison {
            Comparison::Equal => tolerance - (value - target).abs(),
            Comparison::AtLeast => value - target + tolerance,
            Comparison::AtMost => target + tolerance - value,
        };
        let passed = slack >= 0.0;
        self.parts.push(CheckPart { label, class: class.into(), comparison, value, target, tolerance, slack, passed });
    }

    fn equal(&mut self, label: impl Into<String>, class: &str, value: f64, target: f64, tol: f64) {
        self.push(label.into(), class, Comparison::Equal, value, target, tol);
    }

    fn at_least(&mut self, label: impl Into<String>, class: &str, value: f64, target: f64, tol: f64) {
        self.push(label.into(), class, Comparison::AtLeast, value, target, tol);
    }

    fn at_most(&mut self, label: impl Into<String>, class: &str, value: f64, target: f64, tol: f64) {
        self.push(label.into(), class, Comparison::AtMost, value, target, tol);
    }
}

struct Ctx<'a> {
    opts: &'a VerifyOptions,
    rng: ChaCha8Rng,
}

impl Ctx<'_> {
    fn dims(&self, default: &[usize]) -> Vec<usize> {
        self.opts.dims.clone().unwrap_or_else(|| default.to_vec())
    }
}

const EXACT: f64 = 1e-12;

fn gap(d: usize) -> f64 {
    1.0 - 1.0 / d as f64
}

fn gamma(d: usize) -> KrausChannel<f64> {
    classicalise(&PreferredBasis::computational(d))
}

fn layout(s: usize, e: usize) -> BipartiteLayout {
    BipartiteLayout::new(s, e).expect("fixed layout within caps")
}

fn check_isolated_maximum(ctx: &mut Ctx, p: &mut Parts) -> Result<()> {
    for d in ctx.dims(&[2, 3, 4, 5]) {
        let opt = max_over_pure_states(|rho: &DensityMatrix<f64>| r_monotone(rho) / 2.0, d, &ctx.opts.search)?;
        p.equal(format!("d={d} search max R/2"), "search", opt.value, gap(d), 1e-3);
        let plus = maximally_coherent_state::<f64>(d)?;
        p.equal(format!("d={d} R/2 at |+>"), "exact", r_monotone(&plus) / 2.0, gap(d), EXACT);
    }
    Ok(())
}

fn check_diamond(ctx: &mut Ctx, p: &mut Parts) -> Result<()> {
    for d in ctx.dims(&[2, 3, 4]) {
        let (id, g) = (KrausChannel::identity(d), gamma(d));
        let opt = diamond_distance(&id, &g, &ctx.opts.search)?;
        p.equal(format!("d={d} diamond search"), "search", opt.value, gap(d), 1e-3);
        let phi = maximally_entangled_state::<f64>(d)?;
        p.equal(format!("d={d} at maximally entangled"), "exact", stabilized_output_distance(&id, &g, &phi)?, gap(d), EXACT);
        let product = maximally_coherent_state::<f64>(d)?.tensor(&random_mixed_state(d, d, &mut ctx.rng)?);
        p.equal(format!("d={d} at |+><+| x rho_E"), "exact", stabilized_output_distance(&id, &g, &product)?, gap(d), EXACT);
    }
    Ok(())
}

fn check_ancilla(ctx: &mut Ctx, p: &mut Parts) -> Result<()> {
    for d in ctx.dims(&[2, 3, 4]) {
        let (id, g) = (KrausChannel::identity(d), gamma(d));
        let induced = induced_trace_norm_distance(&id, &g, &ctx.opts.search)?.value;
        let diamond = diamond_distance(&id, &g, &ctx.opts.search)?.value;
        p.equal(format!("d={d} induced - diamond"), "agreement", induced - diamond, 0.0, 2e-4);
    }
    Ok(())
}

fn dynamics_report(named: crate::scenarios::NamedScenario<f64>) -> Result<crate::witness::WitnessReport<f64>> {
    match named.body {
        ScenarioBody::Dynamics(sc) => witness_suite(&sc),
        ScenarioBody::StateLevel(_) => Err(Error::InvalidArgument("expected a dynamics scenario".into())),
    }
}

fn check_bell(_: &mut Ctx, p: &mut Parts) -> Result<()> {
    let report = dynamics_report(bell_scenario()?)?;
    p.equal("w_a", "exact", report.w_a, 0.5, EXACT);
    p.equal("coherence term", "exact", report.decomposition.w_a.coherence_term, 0.0, EXACT);
    p.equal("correlation term", "exact", report.decomposition.w_a.correlation_term, 0.5, EXACT);
    Ok(())
}

fn check_epsilon(_: &mut Ctx, p: &mut Parts) -> Result<()> {
    for d in [2, 3] {
        for k in 0..=6 {
            let eps = 0.05 * k as f64;
            let named = epsilon_mixture_scenario::<f64>(d, eps)?;
            let ScenarioBody::StateLevel(probe) = &named.body else { unreachable!() };
            let report = probe.evaluate()?;
            p.equal(format!("d={d} eps={eps:.2} w_a"), "exact", report.w_a, eps * gap(d), EXACT);
            if d == 2 && eps < 1.0 / 3.0 {
                p.at_least(format!("d=2 eps={eps:.2} PPT min eigenvalue"), "exact", report.ppt_min_eigenvalue, 0.0, EXACT);
            }
        }
    }
    Ok(())
}

fn check_false_positive(_: &mut Ctx, p: &mut Parts) -> Result<()> {
    let report = dynamics_report(classical_false_positive_scenario()?)?;
    p.equal("w_b", "exact", report.w_b, 1.0, EXACT);
    p.equal("w_c", "exact", report.w_c, 0.0, EXACT);
    Ok(())
}

const SUITE_LAYOUTS: [(usize, usize); 3] = [(2, 2), (2, 3), (3, 2)];

fn check_faithfulness(ctx: &mut Ctx, p: &mut Parts) -> Result<()> {
    let (mut worst_iq, mut worst_off) = (0.0_f64, f64::INFINITY);
    for k in 0..200 {
        let (s, e) = SUITE_LAYOUTS[k % SUITE_LAYOUTS.len()];
        let lay = layout(s, e);
        let basis = PreferredBasis::computational(s);
        let iq = random_iq_state::<f64, _>(lay, &mut ctx.rng)?;
        worst_iq = worst_iq.max(crate::witness::iq_distance(&iq, lay, &basis)?);
        let eps = ctx.rng.random_range(0.05..=1.0);
        let off = perturbed_iq_state::<f64, _>(lay, eps, &mut ctx.rng)?;
        worst_off = worst_off.min(crate::witness::iq_distance(&off, lay, &basis)?);
    }
    p.at_most("max iq_distance over 200 IQ states", "iq", worst_iq, 0.0, 1e-10);
    p.at_least("min iq_distance over 200 perturbed states", "perturbed", worst_off, 1e-3, 0.0);
    Ok(())
}

const PRIORS: [EnvironmentPrior; 3] = [EnvironmentPrior::Ground, EnvironmentPrior::Pure, EnvironmentPrior::Mixed];

fn check_bounds(ctx: &mut Ctx, p: &mut Parts) -> Result<()> {
    for (s, e) in [(2, 2), (2, 3), (3, 2)] {
        let (mut thm4, mut wb) = (f64::INFINITY, f64::INFINITY);
        for k in 0..500 {
            let sc = random_scenario::<f64, _>(layout(s, e), PRIORS[k % 3], &mut ctx.rng)?;
            thm4 = thm4.min(bound_check_thm4(&sc)?.slack);
            wb = wb.min(bound_check_wb(&sc)?.slack);
        }
        p.at_least(format!("({s},{e}) min W^a bound slack"), "closed_form", thm4, 0.0, 1e-9);
        p.at_least(format!("({s},{e}) min W^b bound slack"), "closed_form", wb, 0.0, 1e-9);
    }
    let search = SearchConfig { restarts: 8, ..ctx.opts.search };
    let mut prop1 = f64::INFINITY;
    for k in 0..100 {
        let (s, e) = SUITE_LAYOUTS[k % SUITE_LAYOUTS.len()];
        let sc = random_scenario::<f64, _>(layout(s, e), PRIORS[k % 3], &mut ctx.rng)?;
        prop1 = prop1.min(prop1_check(&sc, &search)?.slack);
    }
    p.at_least("min measurement-map bound slack over 100 scenarios", "search", prop1, 0.0, 1e-6);
    let named = classical_false_positive_scenario::<f64>()?;
    let record = prop1_check(named.dynamics().expect("dynamics scenario"), &ctx.opts.search)?;
    p.equal("measurement-map bound equality on false positive", "search", record.lhs, record.rhs, 1e-6);
    Ok(())
}

fn check_superchannel(ctx: &mut Ctx, p: &mut Parts) -> Result<()> {
    let mut worst = 0.0_f64;
    for k in 0..500 {
        let (s, e) = SUITE_LAYOUTS[k % SUITE_LAYOUTS.len()];
        let sc = random_scenario::<f64, _>(layout(s, e), PRIORS[k % 3], &mut ctx.rng)?;
        let sup = build_superchannel(&sc);
        let m = sc.effect();
        let w = m.expectation(&apply_superchannel(&sup, &KrausChannel::identity(s))?)
            - m.expectation(&apply_superchannel(&sup, &gamma(s))?);
        let direct = witness_suite(&sc)?.w_a;
        worst = worst.max((w - direct).abs());
    }
    p.at_most("max |W^a superchannel - direct| over 500", "exact", worst, 0.0, 1e-10);
    Ok(())
}

fn check_gamma(ctx: &mut Ctx, p: &mut Parts) -> Result<()> {
    for d in ctx.dims(&[2, 3, 4]) {
        let dephased = dephase(&PhaseDistribution::<f64>::independent_flips(d)?)?;
        let diff = dephased.choi().max_abs_diff(&gamma(d).choi());
        p.at_most(format!("d={d} max Choi entry difference"), "exact", diff, 0.0, EXACT);
    }
    Ok(())
}

fn plus_effect(d: usize) -> Result<Effect<f64>> {
    Effect::new(maximally_coherent_state::<f64>(d)?.into_matrix())
}

fn check_partial_summation(ctx: &mut Ctx, p: &mut Parts) -> Result<()> {
    let opts = SummationOptions::default();
    let mut early = 0usize;
    for k in 0..200 {
        let d = 2 + k % 3;
        let basis = PreferredBasis::computational(d);
        let (rho, m) = if k % 2 == 0 {
            (DensityMatrix::diagonal(&random_weights::<f64, _>(d, &mut ctx.rng))?, random_effect(d, &mut ctx.rng))
        } else {
            let diag = DensityMatrix::diagonal(&random_weights::<f64, _>(d, &mut ctx.rng))?;
            (random_mixed_state(d, d, &mut ctx.rng)?, Effect::new(diag.into_matrix())?)
        };
        if partial_summation_pair(&rho, &m, &basis, &opts)?.stop_index.is_some() {
            early += 1;
        }
    }
    p.equal("early stops on 200 zero-witness pairs", "count", early as f64, 0.0, 0.0);

    let rho = maximally_coherent_state::<f64>(2)?;
    let basis = PreferredBasis::computational(2);
    let with = partial_summation_pair(&rho, &plus_effect(2)?, &basis, &opts)?;
    let without = partial_summation_pair(&rho, &plus_effect(2)?, &basis, &SummationOptions { complement: false, ..opts })?;
    let index = |s: Option<usize>| s.map_or(f64::INFINITY, |i| i as f64);
    p.at_least(
        "stop index without complement minus with",
        "order",
        index(without.stop_index) - index(with.stop_index),
        1.0,
        0.0,
    );

    let rho4 = maximally_coherent_state::<f64>(4)?;
    let trace = partial_summation_pair(&rho4, &plus_effect(4)?, &PreferredBasis::computational(4), &opts)?;
    let spread = trace.terms.iter().map(|t| (t - trace.terms[0]).abs()).fold(0.0, f64::max);
    p.at_most("d=4 summand spread at maximising pair", "exact", spread, 0.0, EXACT);
    Ok(())
}

fn hadamard_probe() -> Result<Scenario<f64>> {
    Scenario::new(
        layout(2, 1),
        maximally_coherent_state(2)?,
        DensityMatrix::basis(1, 0)?,
        ComplexMatrix::identity(2),
        hadamard(),
        Effect::basis_projector(2, 0)?,
        PreferredBasis::computational(2),
    )
}

fn check_baseline(ctx: &mut Ctx, p: &mut Parts) -> Result<()> {
    let kinds = [WitnessKind::A, WitnessKind::B, WitnessKind::C];
    let mut worst = f64::NEG_INFINITY;
    for (s, e) in [(2, 1), (2, 2), (3, 2)] {
        let sc = random_scenario::<f64, _>(layout(s, e), EnvironmentPrior::Mixed, &mut ctx.rng)?;
        let family = baseline_family(&sc)?;
        for k in 0..500 {
            let weights = random_weights::<f64, _>(s, &mut ctx.rng);
            let test = sc.with_initial_state(DensityMatrix::diagonal(&weights)?)?;
            worst = worst.max(baseline_interval(&family, &test, kinds[k % 3], 1e-9)?.margin);
        }
    }
    p.at_most("max margin over 1500 classical mixtures", "mixtures", worst, 0.0, 1e-9);
    let test = hadamard_probe()?;
    let interval = baseline_interval(&baseline_family(&test)?, &test, WitnessKind::A, 1e-9)?;
    p.at_least("|+> margin under Hadamard dynamics", "probe", interval.margin, 0.49, 0.0);
    Ok(())
}

fn check_born(ctx: &mut Ctx, p: &mut Parts) -> Result<()> {
    for s in [2, 3] {
        let mut worst = 0.0_f64;
        for _ in 0..50 {
            let sc = random_born_scenario::<f64, _>(layout(s, 2), &mut ctx.rng)?;
            let r = witness_suite(&sc)?;
            worst = worst.max((r.w_a - r.w_b).abs()).max((r.w_b - r.w_c).abs());
        }
        p.at_most(format!("d_S={s} max witness spread over 50"), "exact", worst, 0.0, 1e-10);
    }
    Ok(())
}

type CheckFn = fn(&mut Ctx, &mut Parts) -> Result<()>;

const CHECKS: [CheckFn; 13] = [
    check_isolated_maximum,
    check_diamond,
    check_ancilla,
    check_bell,
    check_epsilon,
    check_false_positive,
    check_faithfulness,
    check_bounds,
    check_superchannel,
    check_gamma,
    check_partial_summation,
    check_baseline,
    check_born,
];

/// Runs one check. Its random stream depends only on the seed and the check.
pub fn run_check(name: &str, opts: &VerifyOptions) -> Result<CheckResult> {
    opts.validate()?;
    let index = check_index(name)?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    rng.set_stream(index as u64 + 1);
    let mut ctx = Ctx { opts, rng };
    let mut parts = Parts { check: CHECK_NAMES[index], overrides: &opts.tolerances, parts: Vec::new() };
    CHECKS[index](&mut ctx, &mut parts)?;
    let slack = parts.parts.iter().map(|p| p.slack).fold(f64::INFINITY, f64::min);
    Ok(CheckResult {
        name: name.to_string(),
        criterion: index + 1,
        passed: parts.parts.iter().all(|p| p.passed),
        slack,
        parts: parts.parts,
    })
}

/// Runs every check, or only `opts.only`, in suite order.
pub fn verify(opts: &VerifyOptions) -> Result<VerifyReport> {
    opts.validate()?;
    let names: Vec<&str> = match &opts.only {
        Some(name) => vec![name.as_str()],
        None => CHECK_NAMES.to_vec(),
    };
    let checks = names.iter().map(|n| run_check(n, opts)).collect::<Result<Vec<_>>>()?;
    Ok(VerifyReport { schema_version: SCHEMA_VERSION, seed: opts.seed, passed: checks.iter().all(|c| c.passed), checks })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fast() -> VerifyOptions {
        VerifyOptions { search: SearchConfig { restarts: 8, ..SearchConfig::default() }, ..VerifyOptions::default() }
    }

    #[test]
    fn cheap_checks_pass() {
        for name in ["bell", "epsilon-mixture", "false-positive", "gamma", "partial-summation"] {
            let r = run_check(name, &fast()).unwrap();
            assert!(r.passed, "{name}: {:?}", r.parts);
        }
    }

    #[test]
    fn tolerance_overrides_validated() {
        let mut opts = fast();
        opts.tolerances.insert("bell.exact".into(), -1.0);
        assert!(opts.validate().is_err());
        opts.tolerances.insert("bell.exact".into(), 0.0);
        opts.tolerances.insert("nope".into(), 1.0);
        assert!(opts.validate().is_err());
    }

    #[test]
    fn unknown_check_rejected() {
        let opts = VerifyOptions { only: Some("nope".into()), ..fast() };
        assert!(verify(&opts).is_err());
        let opts = VerifyOptions { dims: Some(vec![1]), ..fast() };
        assert!(opts.validate().is_err());
    }

    #[test]
    fn slack_signs() {
        let overrides = BTreeMap::new();
        let mut p = Parts { check: "bell", overrides: &overrides, parts: Vec::new() };
        p.equal("a", "x", 1.0, 1.05, 0.1);
        p.at_least("b", "x", 0.5, 1.0, 0.1);
        p.at_most("c", "x", 0.5, 1.0, 0.0);
        assert!(p.parts[0].passed && (p.parts[0].slack - 0.05).abs() < 1e-12);
        assert!(!p.parts[1].passed);
        assert!(p.parts[2].passed);
    }
}
