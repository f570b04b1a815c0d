use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ramsey_cli::config::{load_config, load_config_str, ConfigError, ExperimentConfig};
use ramsey_cli::presets;
use ramsey_cli::{emit_static_theory, run_experiment, verify_manifest, RunOptions};

const WORKERS_ENV: &str = "RAMSEY_WORKERS";

#[derive(Parser)]
#[command(name = "ramsey", version, about = "Simulate statistics of repeated Ramsey measurements")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// JSON configuration file
    #[arg(long)]
    config: Option<PathBuf>,
    /// Built-in scenario preset (see `list-scenarios`)
    #[arg(long)]
    scenario: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Run a configuration and write CSV artifacts plus manifest.json
    Run {
        #[command(flatten)]
        source: Source,
        /// Master seed (overrides run.master_seed)
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads; defaults to $RAMSEY_WORKERS, then the CPU count
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long)]
        out: PathBuf,
        /// Series per M (overrides run.n_series and drops the per-M overrides)
        #[arg(long)]
        n_series: Option<u64>,
        /// Comma-separated M values (overrides run.m_values)
        #[arg(long, value_delimiter = ',')]
        m_values: Option<Vec<usize>>,
        #[arg(long)]
        quiet: bool,
    },
    /// List built-in scenario presets
    ListScenarios,
    /// Validate a configuration and print its canonical form
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Write the static-limit distributions only
    Theory {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        out: PathBuf,
    },
    /// Re-hash the files listed in a bundle's manifest
    Verify {
        #[arg(long)]
        out: PathBuf,
    },
}

enum Failure {
    Config(String),
    Runtime(String),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("config error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

fn load(source: &Source) -> Result<(ExperimentConfig, Vec<String>), Failure> {
    let config = match (&source.config, &source.scenario) {
        (Some(path), _) => load_config(path)?,
        (None, Some(name)) => load_config_str(&serde_json::json!({ "scenario": name }).to_string())?,
        (None, None) => unreachable!("clap enforces one source"),
    };
    let notes = presets::preset(&config.scenario.name).map(|p| p.notes).unwrap_or_default();
    Ok((config, notes))
}

fn with_overrides(
    config: ExperimentConfig,
    seed: Option<u64>,
    n_series: Option<u64>,
    m_values: Option<Vec<usize>>,
) -> Result<ExperimentConfig, Failure> {
    if seed.is_none() && n_series.is_none() && m_values.is_none() {
        return Ok(config);
    }
    // Patch the canonical document and re-validate it as a whole.
    let mut doc: serde_json::Value = serde_json::from_str(&config.to_canonical_json()).expect("canonical JSON");
    let run = &mut doc["run"];
    if let Some(s) = seed {
        run["master_seed"] = s.into();
    }
    if let Some(n) = n_series {
        run["n_series"] = n.into();
        run["n_series_overrides"] = serde_json::json!([]);
    }
    if let Some(m) = m_values {
        run["m_values"] = m.into();
    }
    Ok(load_config_str(&doc.to_string())?)
}

fn workers(flag: Option<usize>) -> Result<usize, Failure> {
    if let Some(w) = flag {
        return if w == 0 {
            Err(Failure::Config("--workers: must be >= 1".into()))
        } else {
            Ok(w)
        };
    }
    if let Ok(v) = std::env::var(WORKERS_ENV) {
        return match v.parse::<usize>() {
            Ok(w) if w >= 1 => Ok(w),
            _ => Err(Failure::Config(format!("{WORKERS_ENV}: must be an integer >= 1, got `{v}`"))),
        };
    }
    Ok(std::thread::available_parallelism().map_or(1, |n| n.get()))
}

fn dispatch(command: Command) -> Result<(), Failure> {
    match command {
        Command::Run {
            source,
            seed,
            workers: w,
            out,
            n_series,
            m_values,
            quiet,
        } => {
            let (config, notes) = load(&source)?;
            let config = with_overrides(config, seed, n_series, m_values)?;
            let mut options = RunOptions::new(&out, workers(w)?);
            options.progress = !quiet;
            options.notes = notes;
            let manifest = run_experiment(&config, &options).map_err(|e| Failure::Runtime(e.to_string()))?;
            if !quiet {
                eprintln!(
                    "wrote {} files to {} in {:.2} s",
                    manifest.files.len(),
                    out.display(),
                    manifest.wall_time_s
                );
            }
            Ok(())
        }
        Command::ListScenarios => {
            for name in presets::NAMES {
                let p = presets::preset(name).expect("listed preset exists");
                println!("{name:<12} {}", p.config.scenario.description);
            }
            Ok(())
        }
        Command::Validate { config } => {
            let c = load_config(&config)?;
            println!("{}", c.to_canonical_json());
            Ok(())
        }
        Command::Theory { source, out } => {
            let (config, notes) = load(&source)?;
            let mut options = RunOptions::new(&out, workers(None)?);
            options.notes = notes;
            emit_static_theory(&config, &options).map_err(|e| Failure::Runtime(e.to_string()))?;
            Ok(())
        }
        Command::Verify { out } => {
            let bad = verify_manifest(&out).map_err(|e| Failure::Runtime(e.to_string()))?;
            if bad.is_empty() {
                println!("ok");
                Ok(())
            } else {
                Err(Failure::Runtime(format!("hash mismatch: {}", bad.join(", "))))
            }
        }
    }
}
