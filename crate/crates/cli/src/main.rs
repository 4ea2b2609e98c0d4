use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use latnc::{parse_config, presets, render, run_experiment_with, write_results, CliError, Format};

#[derive(Parser)]
#[command(
    name = "latnc",
    version,
    about = "Rate-diverse network coding simulations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a JSON config.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output file; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        /// Worker threads.
        #[arg(long, env = "LATNC_THREADS")]
        threads: Option<usize>,
        /// Overrides the config's base seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Shipped presets.
    Presets {
        #[command(subcommand)]
        action: PresetAction,
    },
}

#[derive(Subcommand)]
enum PresetAction {
    /// List preset names.
    List,
    /// Print a preset config.
    Show { name: String },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            let config_error = err
                .downcast_ref::<CliError>()
                .is_some_and(CliError::is_config_error);
            ExitCode::from(if config_error { 2 } else { 1 })
        }
    }
}

fn execute(command: Command) -> anyhow::Result<()> {
    match command {
        Command::Presets {
            action: PresetAction::List,
        } => {
            for p in &presets::PRESETS {
                println!("{:<14} {}", p.name, p.summary);
            }
            Ok(())
        }
        Command::Presets {
            action: PresetAction::Show { name },
        } => {
            let preset = presets::find(&name).with_context(|| format!("no preset named {name}"))?;
            print!("{}", preset.text);
            Ok(())
        }
        Command::Run {
            config,
            out,
            format,
            threads,
            seed,
        } => {
            let text = std::fs::read_to_string(&config).map_err(|e| CliError::Validation {
                field: "--config".into(),
                message: format!("cannot read {}: {e}", config.display()),
            })?;
            let mut experiment = parse_config(&text)?;
            if let Some(seed) = seed {
                experiment.seed = seed;
            }
            if let Some(n) = threads {
                rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global()
                    .context("thread pool")?;
            }
            let rows = run_experiment_with(&experiment, |row| {
                eprintln!(
                    "{} user {} at {:.2} dB: {} errors in {} trials, rate {:.3e} ({:.1} s)",
                    row.scheme,
                    row.user,
                    row.snr_db,
                    row.errors,
                    row.trials,
                    row.error_rate,
                    row.wall_seconds
                );
            })?;
            match out {
                Some(path) => write_results(&rows, &path, format)?,
                None => {
                    use std::io::Write;
                    std::io::stdout().write_all(&render(&rows, format)?)?;
                }
            }
            Ok(())
        }
    }
}
