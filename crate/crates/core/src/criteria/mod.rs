//! Blow-up criterion functionals over sampled norm traces.
//!
//! Every integral is a trapezoid rule carrying a certificate obtained by
//! re-evaluating on every other sample.

mod nested;
mod quadrature;
mod report;
mod series;
mod synthetic;

pub use nested::{
    growth_minus_one, nested_direct, nested_functional, nested_inner_direct, nested_reduced,
    NestedResult,
};
pub use quadrature::{
    certified, check_trace, cumulative_trapezoid, observed_order, subsample, trapezoid, window,
    Estimate,
};
pub use report::{
    bkm_integral, exp_criterion, global_report, keyforma_check, local_report, type_one_sup,
    CriterionReport, Keyforma, Provenance, ReportOptions, TypeOne, TAIL_FRACTION,
};
pub use series::{BallTrace, NormSample, NormSeries, SeriesMeta};
pub use synthetic::{
    geometric_nodes, synthetic_profile, zero_profile, ChainLines, CutResult, Growth,
    SyntheticOptions, SyntheticReport,
};

#[cfg(test)]
mod tests;
