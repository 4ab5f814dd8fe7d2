//! Seeded Monte Carlo estimates, parameter sweeps and the validation suite.

mod mc;
mod mu3;
mod rates_table;
mod stats;
mod sweep;
mod validate;

pub use mc::{
    estimate_p3, estimate_p3_with, estimate_pe, estimate_pe_with, p3_event, trial_outcomes,
    RunOptions, TrialOutcome,
};
pub use mu3::{
    conditional_mu3, estimate_mu3, in_conditioning_set, Mu3Estimate, Mu3Options, DEFAULT_DELTA,
};
pub use rates_table::{q_segment, rates_table, write_rates_csv};
pub use stats::{binomial_upper_tail, wilson_interval, McEstimate};
pub use sweep::{run_sweep, write_sweep_csv, SweepMode, SweepRow, SweepSpec, TSpec};
pub use validate::{
    run_validate, run_validate_with, CheckResult, ExactRates, RateSource, ValidationReport,
};
