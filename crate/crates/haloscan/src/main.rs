use clap::{Parser, Subcommand};
use haloscan::commands::{
    apply_output_section, resolve_out_dir, run_all, run_by_name, CommandOutcome, RunContext,
};
use haloscan::config::RunConfig;
use haloscan::Error;
use std::path::PathBuf;
use std::process::ExitCode;

/// Batch reproduction of a dark-photon haloscope sensitivity study:
/// spectra, thermal backgrounds, exclusion curves, scan plans, and
/// Monte-Carlo detection statistics from declarative TOML configs.
#[derive(Parser)]
#[command(name = "haloscan", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output directory (overrides config and HALOSCAN_OUT).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Master seed override for seeded commands.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Treat model warnings as errors.
    #[arg(long, global = true)]
    strict: bool,

    /// Write a generic plotting script next to each CSV.
    #[arg(long, global = true)]
    emit_plots: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Steady-state readout spectrum with the moment-equation self-check.
    Spectrum(ConfigArg),
    /// Detector tuning table and thermal excitation spectrum.
    Thermal(ConfigArg),
    /// Exclusion-curve families across the configured band.
    Exclusion(ConfigArg),
    /// Scan-campaign point count and duration.
    Plan(ConfigArg),
    /// Seeded Monte-Carlo detection statistics.
    Montecarlo(ConfigArg),
    /// Run every config in a directory (each names its own command).
    RunAll {
        /// Directory of TOML configs.
        #[arg(long, default_value = "figures")]
        figures: PathBuf,
    },
}

#[derive(clap::Args)]
struct ConfigArg {
    /// Path to the run configuration.
    #[arg(long)]
    config: PathBuf,
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::SelfCheck(_) | Error::Numerics { .. } => 3,
        _ => 2,
    }
}

fn report(stem: &str, outcome: &CommandOutcome) {
    for warning in &outcome.warnings {
        eprintln!("note[{stem}]: {warning}");
    }
    for file in &outcome.files {
        println!("wrote {}", file.display());
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    let (name, config_path) = match &cli.command {
        Command::Spectrum(a) => ("spectrum", Some(&a.config)),
        Command::Thermal(a) => ("thermal", Some(&a.config)),
        Command::Exclusion(a) => ("exclusion", Some(&a.config)),
        Command::Plan(a) => ("plan", Some(&a.config)),
        Command::Montecarlo(a) => ("montecarlo", Some(&a.config)),
        Command::RunAll { .. } => ("run-all", None),
    };

    match (&cli.command, config_path) {
        (Command::RunAll { figures }, _) => {
            let ctx = RunContext {
                out_dir: cli.out.clone().unwrap_or_else(|| PathBuf::from("out")),
                stem: String::new(),
                seed_override: cli.seed,
                strict: cli.strict,
                emit_plots: cli.emit_plots,
                write_csv: true,
                write_json: true,
            };
            // Honor HALOSCAN_OUT when no flag was given.
            let ctx = if cli.out.is_none() {
                match std::env::var("HALOSCAN_OUT") {
                    Ok(dir) if !dir.is_empty() => RunContext { out_dir: PathBuf::from(dir), ..ctx },
                    _ => ctx,
                }
            } else {
                ctx
            };
            for (stem, outcome) in run_all(figures, &ctx)? {
                report(&stem, &outcome);
            }
            Ok(())
        }
        (_, Some(path)) => {
            let cfg = RunConfig::load(path)?;
            let stem = path
                .file_stem()
                .and_then(|s| s.to_str())
                .unwrap_or("run")
                .to_string();
            let mut ctx = RunContext {
                out_dir: resolve_out_dir(cli.out.as_deref(), &cfg),
                stem: stem.clone(),
                seed_override: cli.seed,
                strict: cli.strict,
                emit_plots: cli.emit_plots,
                write_csv: true,
                write_json: true,
            };
            apply_output_section(&mut ctx, &cfg)?;
            let outcome = run_by_name(name, &cfg, &ctx)?;
            report(&stem, &outcome);
            Ok(())
        }
        _ => unreachable!("every subcommand except run-all carries a config"),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}
