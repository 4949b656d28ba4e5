use crate::channel::{InterruptionKind, KrausChannel};
use crate::error::{Error, Result};
use crate::real::Real;
use crate::state::{DensityMatrix, Effect};
use crate::witness::{probability, Scenario};
use serde::{Deserialize, Serialize};

/// Which interruption pair a witness compares.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum WitnessKind {
    #[serde(rename = "w_a")]
    A,
    #[serde(rename = "w_b")]
    B,
    #[serde(rename = "w_c")]
    C,
}

impl WitnessKind {
    pub fn interruptions(self) -> (InterruptionKind, InterruptionKind) {
        use InterruptionKind::*;
        match self {
            Self::A => (DoNothing, DynamicallyClassicalise),
            Self::B => (DoNothing, PiecewiseClassicalise),
            Self::C => (ResetEnvironment, PiecewiseClassicalise),
        }
    }

    pub fn evaluate<T: Real>(self, sc: &Scenario<T>) -> Result<T> {
        let (a, b) = self.interruptions();
        Ok(probability(sc, &sc.interruption(a))? - probability(sc, &sc.interruption(b))?)
    }
}

impl std::str::FromStr for WitnessKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "w_a" | "a" => Ok(Self::A),
            "w_b" | "b" => Ok(Self::B),
            "w_c" | "c" => Ok(Self::C),
            _ => Err(Error::InvalidArgument(format!("unknown witness {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct BaselineInterval<T: Real> {
    /// Witness value for each classical preparation, indexed by basis label.
    pub baseline: Vec<T>,
    pub min_w: T,
    pub max_w: T,
    pub test_w: T,
    /// Distance by which the test value lies outside the interval; negative inside.
    pub margin: T,
    pub violated: bool,
}

/// Copies of `sc` prepared in each computational basis state `|i⟩⟨i|`.
pub fn baseline_family<T: Real>(sc: &Scenario<T>) -> Result<Vec<Scenario<T>>> {
    let d = sc.layout().dim_s;
    (0..d).map(|i| sc.with_initial_state(DensityMatrix::basis(d, i)?)).collect()
}

/// Tests whether the witness of `test` lies outside the range spanned by the
/// classical preparations `family[i]`.
pub fn baseline_interval<T: Real>(
    family: &[Scenario<T>],
    test: &Scenario<T>,
    witness: WitnessKind,
    tolerance: T,
) -> Result<BaselineInterval<T>> {
    let d = test.layout().dim_s;
    if family.len() != d {
        return Err(Error::InvalidArgument(format!("baseline family of size {} for dimension {d}", family.len())));
    }
    let baseline = family.iter().map(|sc| witness.evaluate(sc)).collect::<Result<Vec<T>>>()?;
    let min_w = baseline.iter().copied().fold(baseline[0], |a, b| if b < a { b } else { a });
    let max_w = baseline.iter().copied().fold(baseline[0], |a, b| if b > a { b } else { a });
    let test_w = witness.evaluate(test)?;
    let above = test_w - max_w;
    let below = min_w - test_w;
    let margin = if above > below { above } else { below };
    Ok(BaselineInterval { baseline, min_w, max_w, test_w, margin, violated: margin > tolerance })
}

/// `V_E(ρ, M) = tr(M[ρ − E(ρ)])`, bounded above by `‖ρ − E(ρ)‖_tr`.
pub fn generalized_witness_v<T: Real>(rho: &DensityMatrix<T>, m: &Effect<T>, e: &KrausChannel<T>) -> Result<T> {
    if rho.dim() != m.dim() || e.dim_in() != rho.dim() || e.dim_out() != rho.dim() {
        return Err(Error::DimensionMismatch("state, effect and channel must share a dimension".into()));
    }
    let diff = rho.matrix() - e.apply(rho)?.matrix();
    Ok(m.matrix().trace_product_re(&diff))
}

/// Number of distinct experiments needed to estimate one witness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExperimentBudget {
    pub kind: InterruptionKind,
    pub dim: usize,
    pub experiment_count: usize,
}

/// Experiment count for interruption `kind` at system dimension `d`.
///
/// `I` and `II` need the reference run and the interrupted run. `IV` needs
/// one re-preparation per basis state plus the reference, `III` one per
/// tomographic setting plus the reference. The `+1` is a counting convention.
pub fn budget(kind: InterruptionKind, d: usize) -> ExperimentBudget {
    let experiment_count = match kind {
        InterruptionKind::DoNothing | InterruptionKind::DynamicallyClassicalise => 2,
        InterruptionKind::PiecewiseClassicalise => d + 1,
        InterruptionKind::ResetEnvironment => d * d + 1,
    };
    ExperimentBudget { kind, dim: d, experiment_count }
}
