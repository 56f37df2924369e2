//! JSON-configured verification runs.
//!
//! An [`ExperimentConfig`] names a model, an experiment kind, a sample
//! budget, a seed and a tolerance. [`run_experiment`] evaluates the suite and
//! returns an [`ExperimentReport`], which [`emit_report`] writes as JSON plus
//! a CSV sibling with one row per detail record. Mathematical failures are
//! reported with `pass = false`, never as errors.

mod config;
mod report;
mod runner;

pub use config::{ExperimentConfig, ExperimentKind};
pub use report::{emit_report, write_json, DetailRecord, ExperimentReport};
pub use runner::run_experiment;
