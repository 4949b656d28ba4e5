//! Registry of every CSV column the binary can emit, one table per command.

/// `run`: the report flattened to dotted paths, followed by one row per expectation.
pub const RUN: &[(&str, &str)] = &[
    ("section", "`report` for report fields, `check` for expectation rows"),
    ("quantity", "dotted path into the report, or an `a - b` expression"),
    ("value", "computed value"),
    ("expected", "expected value (check rows only)"),
    ("tolerance", "allowed absolute deviation (check rows only)"),
    ("provenance", "published, derived or definitional (check rows only)"),
    ("passed", "true when the check holds (check rows only)"),
];

/// `sweep`: one row per parameter value. Probability and bound columns are
/// empty for state-level scenarios.
pub const SWEEP: &[(&str, &str)] = &[
    ("parameter", "swept parameter name"),
    ("value", "parameter value for the row"),
    ("p1", "probability with no interruption"),
    ("p2", "probability under dynamic classicalisation"),
    ("p3", "probability under environment reset"),
    ("p4", "probability under piecewise classicalisation"),
    ("w_a", "p1 - p2, or the state-level witness"),
    ("w_b", "p1 - p4"),
    ("w_c", "p3 - p4"),
    ("w_a_bound_slack", "R - (2|w_a| - 2 chi)"),
    ("w_b_bound_slack", "R - (2|w_b| - 2 chi - 2 displacement)"),
];

/// `verify`: one row per check part.
pub const VERIFY: &[(&str, &str)] = &[
    ("check", "check name"),
    ("criterion", "criterion number"),
    ("label", "what the part measures"),
    ("class", "tolerance class, addressable as check.class"),
    ("comparison", "equal, at_least or at_most"),
    ("value", "measured value"),
    ("target", "value compared against"),
    ("tolerance", "tolerance applied"),
    ("slack", "nonnegative exactly when the part passes"),
    ("passed", "part outcome"),
];

/// `list`
pub const LIST: &[(&str, &str)] = &[("kind", "scenario or check"), ("name", "identifier accepted by the CLI")];

pub fn header(table: &'static [(&'static str, &'static str)]) -> Vec<&'static str> {
    table.iter().map(|(name, _)| *name).collect()
}
