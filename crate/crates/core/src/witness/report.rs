use super::bounds::{bound_check_thm4, bound_check_wb, prop1_check, BoundRecord};
use super::decompose::{correlation_split, decompose_w_a, decompose_w_b, iq_distance, measurement_maps, WaTerms, WbTerms};
use super::engine::{probability, r_monotone};
use super::scenario::Scenario;
use crate::channel::InterruptionKind;
use crate::error::Result;
use crate::linalg::trace_norm;
use crate::optimize::SearchConfig;
use crate::real::Real;
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct Decomposition<T: Real> {
    pub w_a: WaTerms<T>,
    pub w_b: WbTerms<T>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct BoundChecks<T: Real> {
    pub w_a_bound: BoundRecord<T>,
    pub w_b_bound: BoundRecord<T>,
    /// Only filled when a search configuration is supplied.
    pub map_bound: Option<BoundRecord<T>>,
}

/// Everything computed for one scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct WitnessReport<T: Real> {
    pub schema_version: u32,
    pub p1: T,
    pub p2: T,
    pub p3: T,
    pub p4: T,
    pub w_a: T,
    pub w_b: T,
    pub w_c: T,
    /// `tr(E_IV†(M)[ρ_S(τ) − Γρ_S(τ)])`, the isolated witness of the reduced state.
    pub w_isolated: T,
    pub r_monotone: T,
    pub chi_trace_norm: T,
    pub env_displacement: T,
    pub iq_distance: T,
    pub decomposition: Decomposition<T>,
    pub bounds: BoundChecks<T>,
}

impl<T: Real> WitnessReport<T> {
    pub fn witness(&self, name: &str) -> Option<T> {
        match name {
            "w_a" => Some(self.w_a),
            "w_b" => Some(self.w_b),
            "w_c" => Some(self.w_c),
            "w_isolated" => Some(self.w_isolated),
            _ => None,
        }
    }
}

/// Probabilities, witnesses, decompositions and the closed-form bound checks.
pub fn witness_suite<T: Real>(sc: &Scenario<T>) -> Result<WitnessReport<T>> {
    let [p1, p2, p3, p4] = {
        let mut out = [T::zero(); 4];
        for (slot, kind) in out.iter_mut().zip(InterruptionKind::ALL) {
            *slot = probability(sc, &sc.interruption(kind))?;
        }
        out
    };
    let rho_tau = sc.state_at_tau();
    let split = correlation_split(&rho_tau, sc.layout())?;
    let maps = measurement_maps(sc)?;
    let m_iv = maps.measure_iv.dual().apply_matrix(sc.effect().matrix())?;
    Ok(WitnessReport {
        schema_version: SCHEMA_VERSION,
        p1,
        p2,
        p3,
        p4,
        w_a: p1 - p2,
        w_b: p1 - p4,
        w_c: p3 - p4,
        w_isolated: m_iv.trace_product_re(&split.rho_s.matrix().hollow()),
        r_monotone: r_monotone(&split.rho_s),
        chi_trace_norm: split.chi_trace_norm(),
        env_displacement: trace_norm(&(split.rho_e.matrix() - sc.env0().matrix()))?,
        iq_distance: iq_distance(&rho_tau, sc.layout(), sc.basis())?,
        decomposition: Decomposition { w_a: decompose_w_a(sc)?, w_b: decompose_w_b(sc)? },
        bounds: BoundChecks {
            w_a_bound: bound_check_thm4(sc)?,
            w_b_bound: bound_check_wb(sc)?,
            map_bound: None,
        },
    })
}

/// [`witness_suite`] plus the search-based measurement-map bound.
pub fn witness_suite_with_search<T: Real>(sc: &Scenario<T>, cfg: &SearchConfig) -> Result<WitnessReport<T>> {
    let mut report = witness_suite(sc)?;
    report.bounds.map_bound = Some(prop1_check(sc, cfg)?);
    Ok(report)
}
