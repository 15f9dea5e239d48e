//! Experiment runner, rate fitting, equivalence checks and property suites.

mod config;
mod experiment;
mod fit;
mod suites;

pub use config::{parse_index_list, ExperimentConfig, Measure, OutputFormat};
pub use experiment::{measure_value, run_experiment, Check, Example, FitRow, Report, Row};
pub use fit::{check_equivalence, fit_rate, EquivalenceReport, RateFit, RateModel, ZERO_ATOL};
pub use suites::{verify_suite, Suite, SuiteReport};
