use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use adiaproj::cli::{self, config, Experiment, Status};

#[derive(Parser)]
#[command(
    name = "adiaproj",
    version,
    about = "Adiabatic ground-state projection experiments"
)]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a config file.
    Run {
        config: PathBuf,
        /// Override a config value, e.g. `--set model.lambda=1.5`.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
    /// Check a config file and print every problem found.
    Validate {
        config: PathBuf,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
    /// List the named experiments.
    ListExperiments,
}

fn exit(status: Status) -> ExitCode {
    ExitCode::from(status.code() as u8)
}

fn resolve(path: &Path, overrides: &[String]) -> Result<cli::ExperimentConfig, Vec<String>> {
    let table =
        config::load(path, overrides).map_err(|e| vec![format!("{}: {e}", path.display())])?;
    config::resolve(&table)
}

fn main() -> ExitCode {
    let args = Args::parse();
    match args.command {
        Command::ListExperiments => {
            for e in Experiment::ALL {
                println!("{:<14} {}", e.name(), e.description());
            }
            exit(Status::Success)
        }
        Command::Validate { config, overrides } => match resolve(&config, &overrides) {
            Ok(cfg) => {
                println!(
                    "{}: ok ({} run points)",
                    config.display(),
                    cfg.points().len()
                );
                exit(Status::Success)
            }
            Err(diags) => {
                for d in diags {
                    eprintln!("error: {d}");
                }
                exit(Status::InvalidConfig)
            }
        },
        Command::Run { config, overrides } => {
            let cfg = match resolve(&config, &overrides) {
                Ok(cfg) => cfg,
                Err(diags) => {
                    for d in diags {
                        eprintln!("error: {d}");
                    }
                    return exit(Status::InvalidConfig);
                }
            };
            match cli::run(&cfg) {
                Ok(report) => {
                    let status = report.status();
                    match &report.error {
                        Some(e) => eprintln!("run failed: {e}"),
                        None => {
                            let flagged = report
                                .outcome
                                .runs
                                .iter()
                                .filter(|r| !(r.adiabatic && r.norm_compliant))
                                .count();
                            if flagged > 0 {
                                eprintln!("warning: {flagged} run(s) flagged in the manifest");
                            }
                            println!(
                                "{}: wrote {} table(s) to {} in {:.1} s",
                                cfg.experiment,
                                report.outcome.tables.len(),
                                cfg.output.directory.display(),
                                report.wall_time_seconds
                            );
                        }
                    }
                    exit(status)
                }
                Err(e) => {
                    eprintln!("run failed: {e}");
                    exit(Status::RunFailed)
                }
            }
        }
    }
}
