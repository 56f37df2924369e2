//! Runs a configured experiment and writes its JSON report and CSV rows.
//!
//! `cargo run --example run_experiment -- [out.json]`

use folilab::experiment::{emit_report, run_experiment, ExperimentConfig, ExperimentKind};
use folilab::{ModelName, ModelSpec};

fn main() -> folilab::Result<()> {
    let out = std::env::args().nth(1).unwrap_or_else(|| std::env::temp_dir().join("gray_oneill.json").display().to_string());
    let cfg = ExperimentConfig::new(ModelSpec::new(ModelName::HopfS3).with("epsilon", 0.7), ExperimentKind::GrayOneill, 8, 42, 1e-6);
    let report = run_experiment(&cfg)?;
    println!("{} on {}: {} samples, max residual {:.3e}, pass {}", cfg.experiment, cfg.model.name, report.num_samples, report.max_residual, report.pass);
    emit_report(&report, &out)?;
    println!("wrote {out} and its .csv sibling");
    Ok(())
}
