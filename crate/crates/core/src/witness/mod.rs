//! Scenario evaluation: interruption probabilities, witnesses, superchannel,
//! decompositions and bound checks.

mod bounds;
mod decompose;
mod engine;
mod report;
mod scenario;
mod superchannel;

pub use bounds::{bound_check_thm4, bound_check_wb, dimension_lower_bound, prop1_check, BoundRecord};
pub use decompose::{
    correlation_split, decompose_w_a, decompose_w_b, iq_distance, is_iq, measurement_maps, CorrelationSplit,
    MeasurementMaps, WaTerms, WbTerms,
};
pub use engine::{final_system_state, probability, r_monotone, w_a_for_state, w_isolated};
pub use report::{witness_suite, witness_suite_with_search, BoundChecks, Decomposition, WitnessReport, SCHEMA_VERSION};
pub use scenario::Scenario;
pub use superchannel::{apply_superchannel, build_superchannel, Superchannel};
