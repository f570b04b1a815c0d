//! The periodic Ramsey sequence: schedules, Monte Carlo series and
//! ensembles, and the empirical statistics computed from them.

mod ensemble;
mod histogram;
mod schedule;
mod series;
mod stats;

pub use ensemble::{run_ensemble, run_ensemble_with, EnsembleOptions, EnsembleResult, DEFAULT_CHUNK};
pub use histogram::OutcomeHistogram;
pub use schedule::{outcome_probability, MeasurementSchedule};
pub use series::{run_series, NoiseSource, OutcomeSeries, SeriesSimulator};
pub use stats::{
    bootstrap_variance_se, empirical_r1, empirical_r2, empirical_variance, CorrelatorAccumulator, Estimate,
};
