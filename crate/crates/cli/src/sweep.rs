use nsit_core::scenarios::{born_scenario, epsilon_mixture_scenario, max_coherent_scenario, ScenarioBody};
use nsit_core::witness::witness_suite;
use nsit_core::{ComplexMatrix, Error, Result};
use serde::{Deserialize, Serialize};

/// Sweep description read from `--config`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    /// `epsilon-mixture` (parameter `eps`), `max-coherent` (parameter `d`)
    /// or `born-rotation` (parameter `theta`).
    pub scenario: String,
    pub parameter: String,
    pub start: f64,
    pub stop: f64,
    /// Number of evenly spaced points; `d` sweeps step by one and ignore it.
    #[serde(default)]
    pub steps: Option<usize>,
    /// System dimension for `epsilon-mixture`.
    #[serde(default)]
    pub dim: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub parameter: String,
    pub value: f64,
    pub p1: Option<f64>,
    pub p2: Option<f64>,
    pub p3: Option<f64>,
    pub p4: Option<f64>,
    pub w_a: f64,
    pub w_b: Option<f64>,
    pub w_c: Option<f64>,
    pub w_a_bound_slack: Option<f64>,
    pub w_b_bound_slack: Option<f64>,
}

impl SweepRow {
    pub fn cells(&self) -> Vec<String> {
        let opt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
        vec![
            self.parameter.clone(),
            self.value.to_string(),
            opt(self.p1),
            opt(self.p2),
            opt(self.p3),
            opt(self.p4),
            self.w_a.to_string(),
            opt(self.w_b),
            opt(self.w_c),
            opt(self.w_a_bound_slack),
            opt(self.w_b_bound_slack),
        ]
    }
}

fn invalid(msg: String) -> Error {
    Error::InvalidArgument(msg)
}

fn expect_parameter(spec: &SweepSpec, name: &str) -> Result<()> {
    if spec.parameter != name {
        return Err(invalid(format!("scenario {} sweeps parameter {name}, not {}", spec.scenario, spec.parameter)));
    }
    Ok(())
}

fn linspace(spec: &SweepSpec) -> Result<Vec<f64>> {
    if !spec.start.is_finite() || !spec.stop.is_finite() || spec.start > spec.stop {
        return Err(invalid(format!("empty range {}..{}", spec.start, spec.stop)));
    }
    match spec.steps {
        None | Some(0) => Err(invalid("steps must be at least 1".into())),
        Some(1) => Ok(vec![spec.start]),
        Some(n) => {
            let h = (spec.stop - spec.start) / (n - 1) as f64;
            Ok((0..n).map(|k| if k + 1 == n { spec.stop } else { spec.start + h * k as f64 }).collect())
        }
    }
}

fn integer_range(spec: &SweepSpec) -> Result<Vec<usize>> {
    let is_count = |x: f64| x.fract() == 0.0 && x >= 0.0;
    if !is_count(spec.start) || !is_count(spec.stop) {
        return Err(invalid("integer parameter needs whole-number bounds".into()));
    }
    if spec.start > spec.stop {
        return Err(invalid(format!("empty range {}..{}", spec.start, spec.stop)));
    }
    Ok((spec.start as usize..=spec.stop as usize).collect())
}

fn rotation(theta: f64) -> Result<ComplexMatrix<f64>> {
    let (s, c) = theta.sin_cos();
    ComplexMatrix::from_real_rows(&[&[c, -s], &[s, c]])
}

fn dynamics_row(parameter: &str, value: f64, sc: &nsit_core::Scenario<f64>) -> Result<SweepRow> {
    let r = witness_suite(sc)?;
    Ok(SweepRow {
        parameter: parameter.into(),
        value,
        p1: Some(r.p1),
        p2: Some(r.p2),
        p3: Some(r.p3),
        p4: Some(r.p4),
        w_a: r.w_a,
        w_b: Some(r.w_b),
        w_c: Some(r.w_c),
        w_a_bound_slack: Some(r.bounds.w_a_bound.slack),
        w_b_bound_slack: Some(r.bounds.w_b_bound.slack),
    })
}

pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    match spec.scenario.as_str() {
        "epsilon-mixture" => {
            expect_parameter(spec, "eps")?;
            let d = spec.dim.unwrap_or(2);
            linspace(spec)?
                .into_iter()
                .map(|eps| {
                    let named = epsilon_mixture_scenario::<f64>(d, eps)?;
                    let ScenarioBody::StateLevel(probe) = &named.body else { unreachable!() };
                    let r = probe.evaluate()?;
                    Ok(SweepRow {
                        parameter: spec.parameter.clone(),
                        value: eps,
                        p1: None,
                        p2: None,
                        p3: None,
                        p4: None,
                        w_a: r.w_a,
                        w_b: None,
                        w_c: None,
                        w_a_bound_slack: None,
                        w_b_bound_slack: None,
                    })
                })
                .collect()
        }
        "max-coherent" => {
            expect_parameter(spec, "d")?;
            integer_range(spec)?
                .into_iter()
                .map(|d| {
                    let named = max_coherent_scenario::<f64>(d)?;
                    dynamics_row(&spec.parameter, d as f64, named.dynamics().expect("dynamics scenario"))
                })
                .collect()
        }
        "born-rotation" => {
            expect_parameter(spec, "theta")?;
            linspace(spec)?
                .into_iter()
                .map(|theta| {
                    let named = born_scenario::<f64>(&rotation(theta)?, false)?;
                    dynamics_row(&spec.parameter, theta, named.dynamics().expect("dynamics scenario"))
                })
                .collect()
        }
        other => Err(invalid(format!("scenario {other:?} cannot be swept"))),
    }
}
