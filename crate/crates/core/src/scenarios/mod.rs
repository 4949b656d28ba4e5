//! Scenario generators, the named catalogue and the partial-summation protocol.

mod baseline;
pub mod gates;
mod io;
mod named;
mod random;
mod summation;

pub use baseline::{
    baseline_family, baseline_interval, budget, generalized_witness_v, BaselineInterval, ExperimentBudget,
    WitnessKind,
};
pub use io::{
    from_document, matrix_from_doc, matrix_to_doc, scenario_from_json, scenario_to_json, to_document, BodyDoc,
    DynamicsDoc, MatrixDoc, ScenarioDocument, StateLevelDoc,
};
pub use named::{
    bell_scenario, born_hadamard_scenario, born_scenario, by_name, catalogue, classical_false_positive_scenario,
    epsilon_mixture_scenario, incoherent_probe_scenario, lookup, max_coherent_scenario, Evaluation, Expectation,
    ExpectationCheck, NamedScenario, Provenance, ScenarioBody, ScenarioOutput, StateLevelReport, StateProbe,
    SCENARIO_NAMES,
};
pub use random::{
    correlated_coherent_vector, perturbed_iq_state, random_born_scenario, random_iq_state, random_scenario,
    random_weights, EnvironmentPrior,
};
pub use summation::{
    isolated_reduction, partial_summation, partial_summation_pair, partial_summation_sampled,
    summation_from_values, PartialSummationTrace, Series, SummationOptions,
};
