//! Multi-path experiments: hull convergence curves and the probability
//! checks that accompany them.

mod convergence;
mod lemma1;
mod levy;
mod rate;
pub mod stats;

pub use convergence::{
    aggregate, default_grid_size, geometric_checkpoints, run_convergence, run_paths,
    ConvergenceCurve, ExperimentConfig, PathSeries, QuantileRow,
};
pub use lemma1::{lemma1_probe, Lemma1Row, Lemma1Table, LEMMA1_SLACK};
pub use levy::{levy_check, LevyReport, LevyRow, MIN_TRIALS, SLACK_SE};
pub use rate::{rate_probe, RateRow, RateTable};
