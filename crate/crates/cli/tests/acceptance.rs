use nsit_core::channel::{classicalise, dephase, PhaseDistribution};
use nsit_core::optimize::{
    diamond_distance, induced_trace_norm_distance, max_over_pure_states, stabilized_output_distance,
};
use nsit_core::scenarios::gates::hadamard;
use nsit_core::scenarios::{
    baseline_family, baseline_interval, bell_scenario, classical_false_positive_scenario, epsilon_mixture_scenario,
    partial_summation_pair, perturbed_iq_state, random_born_scenario, random_iq_state, random_scenario,
    random_weights, EnvironmentPrior, ScenarioBody, SummationOptions, WitnessKind,
};
use nsit_core::state::{maximally_coherent_state, maximally_entangled_state, random_effect, random_mixed_state};
use nsit_core::witness::{
    apply_superchannel, bound_check_thm4, bound_check_wb, build_superchannel, iq_distance, prop1_check, r_monotone,
    witness_suite,
};
use nsit_core::{
    BipartiteLayout, Channel64, ComplexMatrix, DensityMatrix, Effect, PreferredBasis, Result, Scenario64,
    SearchConfig,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::process::{Command, ExitCode};

const SEED: u64 = 2026;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Result<Outcome> {
    Ok(Outcome { passed, detail: detail.into() })
}

fn rng(stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(SEED);
    r.set_stream(stream);
    r
}

fn search() -> SearchConfig {
    SearchConfig::default().with_seed(SEED)
}

fn gap(d: usize) -> f64 {
    1.0 - 1.0 / d as f64
}

fn gamma(d: usize) -> Channel64 {
    classicalise(&PreferredBasis::computational(d))
}

fn layout(s: usize, e: usize) -> BipartiteLayout {
    BipartiteLayout::new(s, e).unwrap()
}

fn plus_effect(d: usize) -> Effect<f64> {
    Effect::new(maximally_coherent_state::<f64>(d).unwrap().into_matrix()).unwrap()
}

fn isolated_maximum() -> Result<Outcome> {
    let (mut search_err, mut exact_err) = (0.0_f64, 0.0_f64);
    for d in 2..=5 {
        let opt = max_over_pure_states(|rho: &DensityMatrix<f64>| r_monotone(rho) / 2.0, d, &search())?;
        search_err = search_err.max((opt.value - gap(d)).abs());
        exact_err = exact_err.max((r_monotone(&maximally_coherent_state::<f64>(d)?) / 2.0 - gap(d)).abs());
    }
    outcome(search_err <= 1e-3 && exact_err <= 1e-12, format!("search err {search_err:.2e}, exact err {exact_err:.2e}"))
}

fn diamond() -> Result<Outcome> {
    let mut r = rng(2);
    let (mut search_err, mut exact_err) = (0.0_f64, 0.0_f64);
    for d in 2..=4 {
        let id = Channel64::identity(d);
        search_err = search_err.max((diamond_distance(&id, &gamma(d), &search())?.value - gap(d)).abs());
        let phi = maximally_entangled_state::<f64>(d)?;
        let product = maximally_coherent_state::<f64>(d)?.tensor(&random_mixed_state(d, d, &mut r)?);
        for input in [phi, product] {
            exact_err = exact_err.max((stabilized_output_distance(&id, &gamma(d), &input)? - gap(d)).abs());
        }
    }
    outcome(search_err <= 1e-3 && exact_err <= 1e-12, format!("search err {search_err:.2e}, exact err {exact_err:.2e}"))
}

fn ancilla() -> Result<Outcome> {
    let mut worst = 0.0_f64;
    for d in 2..=4 {
        let id = Channel64::identity(d);
        let plain = induced_trace_norm_distance(&id, &gamma(d), &search())?.value;
        let stabilized = diamond_distance(&id, &gamma(d), &search())?.value;
        worst = worst.max((plain - stabilized).abs());
    }
    outcome(worst <= 2e-4, format!("max |induced - diamond| {worst:.2e}"))
}

fn bell() -> Result<Outcome> {
    let named = bell_scenario::<f64>()?;
    let r = witness_suite(named.dynamics().unwrap())?;
    let d = &r.decomposition.w_a;
    let err = (r.w_a - 0.5).abs().max(d.coherence_term.abs()).max((d.correlation_term - 0.5).abs());
    outcome(err <= 1e-12, format!("w_a {:.15}, coherence {:.1e}, correlation {:.15}", r.w_a, d.coherence_term, d.correlation_term))
}

fn epsilon_mixture() -> Result<Outcome> {
    let (mut err, mut min_ppt) = (0.0_f64, f64::INFINITY);
    for d in [2, 3] {
        for k in 0..=6 {
            let eps = 0.05 * k as f64;
            let named = epsilon_mixture_scenario::<f64>(d, eps)?;
            let ScenarioBody::StateLevel(probe) = &named.body else { unreachable!() };
            let r = probe.evaluate()?;
            err = err.max((r.w_a - eps * gap(d)).abs());
            if d == 2 && eps < 1.0 / 3.0 {
                min_ppt = min_ppt.min(r.ppt_min_eigenvalue);
            }
        }
    }
    outcome(err <= 1e-12 && min_ppt >= -1e-12, format!("w_a err {err:.2e}, min PPT eigenvalue {min_ppt:.3e}"))
}

fn false_positive() -> Result<Outcome> {
    let named = classical_false_positive_scenario::<f64>()?;
    let r = witness_suite(named.dynamics().unwrap())?;
    let ok = (r.w_b - 1.0).abs() <= 1e-12 && r.w_c.abs() <= 1e-12;
    outcome(ok, format!("w_b {:.15}, w_c {:.1e}", r.w_b, r.w_c))
}

fn faithfulness() -> Result<Outcome> {
    let mut r = rng(7);
    let layouts = [(2, 2), (3, 2), (2, 3)];
    let (mut max_iq, mut min_off) = (0.0_f64, f64::INFINITY);
    for k in 0..200 {
        let (s, e) = layouts[k % 3];
        let basis = PreferredBasis::computational(s);
        let iq = random_iq_state::<f64, _>(layout(s, e), &mut r)?;
        max_iq = max_iq.max(iq_distance(&iq, layout(s, e), &basis)?);
        let eps = r.random_range(0.05..=1.0);
        let off = perturbed_iq_state::<f64, _>(layout(s, e), eps, &mut r)?;
        min_off = min_off.min(iq_distance(&off, layout(s, e), &basis)?);
    }
    outcome(max_iq < 1e-10 && min_off > 1e-3, format!("max IQ distance {max_iq:.2e}, min perturbed {min_off:.3e}"))
}

fn bounds() -> Result<Outcome> {
    let mut r = rng(8);
    let priors = [EnvironmentPrior::Ground, EnvironmentPrior::Pure, EnvironmentPrior::Mixed];
    let (mut thm4, mut wb) = (f64::INFINITY, f64::INFINITY);
    for (s, e) in [(2, 2), (2, 3), (3, 2)] {
        for k in 0..500 {
            let sc = random_scenario::<f64, _>(layout(s, e), priors[k % 3], &mut r)?;
            thm4 = thm4.min(bound_check_thm4(&sc)?.slack);
            wb = wb.min(bound_check_wb(&sc)?.slack);
        }
    }
    let mut prop1 = f64::INFINITY;
    let light = search().with_restarts(8);
    for k in 0..100 {
        let (s, e) = [(2, 2), (2, 3), (3, 2)][k % 3];
        let sc = random_scenario::<f64, _>(layout(s, e), priors[k % 3], &mut r)?;
        prop1 = prop1.min(prop1_check(&sc, &light)?.slack);
    }
    let named = classical_false_positive_scenario::<f64>()?;
    let eq = prop1_check(named.dynamics().unwrap(), &search())?;
    let eq_gap = (eq.lhs - eq.rhs).abs();
    let ok = thm4 >= -1e-9 && wb >= -1e-9 && prop1 >= -1e-6 && eq_gap <= 1e-6;
    outcome(ok, format!("min slacks W^a bound {thm4:.3e}, W^b bound {wb:.3e}, map bound {prop1:.3e}; equality gap {eq_gap:.2e}"))
}

fn superchannel() -> Result<Outcome> {
    let mut r = rng(9);
    let mut worst = 0.0_f64;
    for k in 0..500 {
        let (s, e) = [(2, 2), (2, 3), (3, 2)][k % 3];
        let sc = random_scenario::<f64, _>(layout(s, e), EnvironmentPrior::Mixed, &mut r)?;
        let sup = build_superchannel(&sc);
        let m = sc.effect();
        let via = m.expectation(&apply_superchannel(&sup, &Channel64::identity(s))?)
            - m.expectation(&apply_superchannel(&sup, &gamma(s))?);
        worst = worst.max((via - witness_suite(&sc)?.w_a).abs());
    }
    outcome(worst <= 1e-10, format!("max deviation {worst:.2e}"))
}

fn gamma_constructions() -> Result<Outcome> {
    let mut worst = 0.0_f64;
    for d in 2..=4 {
        let dephased = dephase(&PhaseDistribution::<f64>::independent_flips(d)?)?;
        worst = worst.max(dephased.choi().max_abs_diff(&gamma(d).choi()));
    }
    outcome(worst <= 1e-12, format!("max Choi entry difference {worst:.2e}"))
}

fn partial_summation() -> Result<Outcome> {
    let mut r = rng(11);
    let opts = SummationOptions::default();
    let mut early = 0;
    for k in 0..200 {
        let d = 2 + k % 3;
        let diag = DensityMatrix::diagonal(&random_weights::<f64, _>(d, &mut r))?;
        let (rho, m) = if k % 2 == 0 {
            (diag, random_effect(d, &mut r))
        } else {
            (random_mixed_state(d, d, &mut r)?, Effect::new(diag.into_matrix())?)
        };
        early += usize::from(partial_summation_pair(&rho, &m, &PreferredBasis::computational(d), &opts)?.stop_index.is_some());
    }
    let plus = maximally_coherent_state::<f64>(2)?;
    let basis = PreferredBasis::computational(2);
    let with = partial_summation_pair(&plus, &plus_effect(2), &basis, &opts)?.stop_index;
    let without =
        partial_summation_pair(&plus, &plus_effect(2), &basis, &SummationOptions { complement: false, ..opts })?.stop_index;
    let strictly_earlier = match (with, without) {
        (Some(a), Some(b)) => a < b,
        (Some(_), None) => true,
        _ => false,
    };
    let t = partial_summation_pair(&maximally_coherent_state::<f64>(4)?, &plus_effect(4), &PreferredBasis::computational(4), &opts)?;
    let spread = t.terms.iter().map(|x| (x - t.terms[0]).abs()).fold(0.0, f64::max);
    outcome(
        early == 0 && strictly_earlier && spread <= 1e-12,
        format!("early stops {early}, complement stop {with:?} vs {without:?}, summand spread {spread:.1e}"),
    )
}

fn baseline() -> Result<Outcome> {
    let mut r = rng(12);
    let kinds = [WitnessKind::A, WitnessKind::B, WitnessKind::C];
    let mut violations = 0;
    for (s, e) in [(2, 1), (2, 2), (3, 2)] {
        let sc = random_scenario::<f64, _>(layout(s, e), EnvironmentPrior::Mixed, &mut r)?;
        let family = baseline_family(&sc)?;
        for k in 0..500 {
            let test = sc.with_initial_state(DensityMatrix::diagonal(&random_weights::<f64, _>(s, &mut r))?)?;
            violations += usize::from(baseline_interval(&family, &test, kinds[k % 3], 1e-9)?.violated);
        }
    }
    let probe = Scenario64::new(
        layout(2, 1),
        maximally_coherent_state(2)?,
        DensityMatrix::basis(1, 0)?,
        ComplexMatrix::identity(2),
        hadamard(),
        Effect::basis_projector(2, 0)?,
        PreferredBasis::computational(2),
    )?;
    let margin = baseline_interval(&baseline_family(&probe)?, &probe, WitnessKind::A, 1e-9)?.margin;
    outcome(violations == 0 && margin >= 0.49, format!("mixture violations {violations}, |+> margin {margin:.6}"))
}

fn born() -> Result<Outcome> {
    let mut r = rng(13);
    let mut worst = 0.0_f64;
    for s in [2, 3] {
        for _ in 0..50 {
            let sc = random_born_scenario::<f64, _>(layout(s, 2), &mut r)?;
            let w = witness_suite(&sc)?;
            worst = worst.max((w.w_a - w.w_b).abs()).max((w.w_b - w.w_c).abs());
        }
    }
    outcome(worst <= 1e-10, format!("max witness spread {worst:.2e}"))
}

fn determinism() -> Result<Outcome> {
    let dir = tempfile::tempdir().expect("temporary directory");
    let run = |file: &str| {
        let path = dir.path().join(file);
        let status = Command::new(env!("CARGO_BIN_EXE_nsit"))
            .args(["verify", "--seed", "7", "--output"])
            .arg(&path)
            .stderr(std::process::Stdio::null())
            .status()
            .expect("run nsit");
        (status.code(), std::fs::read(path).unwrap_or_default())
    };
    let (code_a, a) = run("a.json");
    let (code_b, b) = run("b.json");
    outcome(
        code_a == Some(0) && code_b == Some(0) && !a.is_empty() && a == b,
        format!("exit codes {code_a:?}/{code_b:?}, {} bytes, identical {}", a.len(), a == b),
    )
}

type Criterion = (&'static str, fn() -> Result<Outcome>);

const CRITERIA: [Criterion; 14] = [
    ("isolated maximum", isolated_maximum),
    ("diamond distance", diamond),
    ("ancilla does not help", ancilla),
    ("bell scenario", bell),
    ("epsilon mixture", epsilon_mixture),
    ("classical false positive", false_positive),
    ("IQ faithfulness", faithfulness),
    ("bound suite", bounds),
    ("superchannel equivalence", superchannel),
    ("classicalisation constructions", gamma_constructions),
    ("partial summation", partial_summation),
    ("device independence", baseline),
    ("Born unification", born),
    ("determinism", determinism),
];

fn main() -> ExitCode {
    let mut failed = 0;
    for (k, (name, check)) in CRITERIA.iter().enumerate() {
        let o = check().unwrap_or_else(|e| Outcome { passed: false, detail: format!("error: {e}") });
        failed += usize::from(!o.passed);
        println!("criterion {:>2} {:<32} {}  {}", k + 1, name, if o.passed { "PASS" } else { "FAIL" }, o.detail);
    }
    println!("{} of {} criteria passed", CRITERIA.len() - failed, CRITERIA.len());
    if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE }
}
