use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use emdsm_core::harness::{load_config, preset, run_experiment, verify, ExperimentConfig, NoiseSpec, OutputFormat};

/// Direct sampling experiments for electromagnetic medium scattering.
#[derive(Parser)]
#[command(name = "emdsm", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a JSON configuration file.
    Run {
        config: PathBuf,
        /// Overrides `outputs.directory`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a built-in experiment.
    Preset {
        name: String,
        /// Relative noise level.
        #[arg(long)]
        noise: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output directory (defaults to `out/<name>`).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Sampling spacing override.
        #[arg(long)]
        spacing: Option<f64>,
        /// Print the configuration as JSON instead of running it.
        #[arg(long)]
        print_config: bool,
    },
    /// Check an identity or solver property and print a JSON report.
    Verify { kind: String },
    /// Produce the point diagnostic maps.
    Fig {
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        spacing: Option<f64>,
    },
}

fn configure_threads() -> Result<(), String> {
    if let Ok(v) = std::env::var("EMDSM_THREADS") {
        let n: usize = v.parse().map_err(|_| format!("EMDSM_THREADS must be a positive integer, got `{v}`"))?;
        if n == 0 {
            return Err("EMDSM_THREADS must be a positive integer, got `0`".into());
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())?;
    }
    Ok(())
}

fn execute(mut cfg: ExperimentConfig, out: Option<PathBuf>) -> Result<(), String> {
    if let Some(dir) = out {
        cfg.outputs.directory = Some(dir);
    }
    if cfg.outputs.directory.is_none() {
        cfg.outputs.directory = Some(PathBuf::from("out").join(&cfg.name));
    }
    if cfg.outputs.formats.is_empty() {
        cfg.outputs.formats = vec![OutputFormat::Csv, OutputFormat::Pgm, OutputFormat::Report];
    }
    let result = run_experiment(&cfg).map_err(|e| e.to_string())?;
    println!("{}", serde_json::to_string_pretty(&result.report).map_err(|e| e.to_string())?);
    Ok(())
}

fn main_inner(cli: Cli) -> Result<bool, String> {
    configure_threads()?;
    match cli.command {
        Command::Run { config, out } => {
            let cfg = load_config(&config).map_err(|e| format!("{}: {e}", config.display()))?;
            execute(cfg, out)?;
        }
        Command::Preset { name, noise, seed, out, spacing, print_config } => {
            let mut cfg = preset(&name).map_err(|e| e.to_string())?;
            if let Some(epsilon) = noise {
                cfg.noise = NoiseSpec { epsilon, seed };
            } else {
                cfg.noise.seed = seed;
            }
            if spacing.is_some() {
                cfg.sampling.spacing = spacing;
            }
            if print_config {
                println!("{}", cfg.to_json());
                return Ok(true);
            }
            execute(cfg, out)?;
        }
        Command::Verify { kind } => {
            let report = verify(&kind).map_err(|e| e.to_string())?;
            println!("{}", serde_json::to_string_pretty(&report).map_err(|e| e.to_string())?);
            return Ok(report.passed);
        }
        Command::Fig { name, out, spacing } => {
            if name != "fig1" && name != "fig2" {
                return Err(format!("unknown figure `{name}`; expected fig1 or fig2"));
            }
            let mut cfg = preset(&name).map_err(|e| e.to_string())?;
            if spacing.is_some() {
                cfg.sampling.spacing = spacing;
            }
            execute(cfg, out)?;
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match main_inner(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
