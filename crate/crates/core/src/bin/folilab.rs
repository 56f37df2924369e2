use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use folilab::experiment::{emit_report, run_experiment, write_json, ExperimentConfig, ExperimentKind, ExperimentReport};
use folilab::models::list_models;
use folilab::{ModelName, ModelSpec};

#[derive(Parser)]
#[command(name = "folilab", version, about = "Numerical checks for Riemannian foliations on model geometries")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the built-in models and their parameters.
    ListModels,
    /// Run the experiment described by a JSON config.
    Run {
        config: PathBuf,
        /// Write `timing_s: null` so that equal configs give identical bytes.
        #[arg(long)]
        no_timing: bool,
    },
    /// Run an experiment configured from the command line.
    Check {
        kind: String,
        #[arg(long)]
        model: String,
        /// Model parameter as `key=value`; repeatable.
        #[arg(long = "param", value_name = "KEY=VALUE")]
        params: Vec<String>,
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        no_timing: bool,
    },
}

fn parse_param(s: &str) -> folilab::Result<(String, f64)> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| folilab::Error::Config(format!("parameter {s:?} is not key=value")))?;
    let v: f64 = v
        .trim()
        .parse()
        .map_err(|_| folilab::Error::Config(format!("parameter {k}: {v:?} is not a number")))?;
    Ok((k.trim().to_string(), v))
}

fn fmt_opt(v: f64) -> String {
    if v.is_nan() {
        "n/a".into()
    } else {
        format!("{v:.3e}")
    }
}

fn finish(mut report: ExperimentReport, no_timing: bool, out: Option<PathBuf>) -> folilab::Result<bool> {
    if no_timing {
        report.timing_s = None;
    }
    match out {
        Some(path) => {
            emit_report(&report, &path)?;
            eprintln!("report written to {}", path.display());
        }
        None => {
            write_json(&report, std::io::stdout().lock())?;
            println!();
        }
    }
    eprintln!(
        "{} on {}: {} (max_residual {}, margin {}, {} samples)",
        report.config.experiment,
        report.config.model.name,
        if report.pass { "PASS" } else { "FAIL" },
        fmt_opt(report.max_residual),
        fmt_opt(report.margin),
        report.num_samples
    );
    Ok(report.pass)
}

fn run(cli: Cli) -> folilab::Result<bool> {
    match cli.command {
        Command::ListModels => {
            for (name, description, defaults) in list_models() {
                let params: Vec<String> = defaults.iter().map(|(k, v)| format!("{k}={v}")).collect();
                println!("{name:<14} {description}");
                println!("{:<14} defaults: {}", "", params.join(", "));
            }
            Ok(true)
        }
        Command::Run { config, no_timing } => {
            let cfg = ExperimentConfig::load(&config)?;
            let out = (!cfg.output_path.is_empty()).then(|| PathBuf::from(&cfg.output_path));
            let report = run_experiment(&cfg)?;
            finish(report, no_timing, out)
        }
        Command::Check {
            kind,
            model,
            params,
            samples,
            seed,
            tol,
            out,
            no_timing,
        } => {
            let kind: ExperimentKind = kind.parse()?;
            let name: ModelName = model.parse()?;
            let mut spec = ModelSpec::new(name);
            for p in &params {
                let (k, v) = parse_param(p)?;
                spec = spec.with(&k, v);
            }
            let mut cfg = ExperimentConfig::new(spec, kind, samples, seed, tol);
            if let Some(path) = &out {
                cfg.output_path = path.display().to_string();
            }
            let report = run_experiment(&cfg)?;
            finish(report, no_timing, out)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = std::env::var("FOLILAB_THREADS").ok().and_then(|s| s.parse::<usize>().ok()) {
        if n > 0 {
            // Fails only if a pool already exists, which cannot happen here.
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
