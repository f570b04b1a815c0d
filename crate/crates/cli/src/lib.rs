//! Configuration-driven runner for repeated-Ramsey experiments: scenario
//! presets, deterministic seeding, parallel ensembles and CSV/JSON output.

pub mod config;
pub mod manifest;
pub mod presets;
pub mod runner;

pub use config::{load_config, load_config_str, ConfigError, ExperimentConfig, OutputKind};
pub use manifest::{verify_manifest, Manifest};
pub use runner::{emit_static_theory, run_experiment, RunError, RunOptions};
