//! Experiment orchestration behind the `adiaproj` binary.

pub mod config;
pub mod experiments;
pub mod output;

use std::time::Instant;

pub use config::{load, load_str, resolve, validate, Experiment, ExperimentConfig};
pub use experiments::{DataTable, Outcome, RunRecord};

use crate::{Error, Result};

/// Exit status of a finished `run`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Success,
    RunFailed,
    InvalidConfig,
}

impl Status {
    pub fn code(self) -> i32 {
        match self {
            Status::Success => 0,
            Status::RunFailed => 1,
            Status::InvalidConfig => 2,
        }
    }
}

#[derive(Debug)]
pub struct RunReport {
    pub outcome: Outcome,
    pub error: Option<Error>,
    pub wall_time_seconds: f64,
}

impl RunReport {
    pub fn status(&self) -> Status {
        if self.error.is_some() {
            Status::RunFailed
        } else {
            Status::Success
        }
    }
}

/// Runs the experiment on a pool of `cfg.workers` threads and writes its
/// outputs. Only I/O failures while writing are returned as `Err`.
pub fn run(cfg: &ExperimentConfig) -> Result<RunReport> {
    let started = Instant::now();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::Config(e.to_string()))?;
    let mut outcome = Outcome::default();
    let error = pool
        .install(|| experiments::execute(cfg, &mut outcome))
        .err();
    let wall_time_seconds = started.elapsed().as_secs_f64();

    let mut sink = output::Sink::create(&cfg.output.directory)?;
    sink.write_tables(cfg, &outcome.tables)?;
    if error.is_some() {
        sink.mark_partial()?;
    }
    let message = error.as_ref().map(|e| e.to_string());
    sink.write_manifest(cfg, &outcome.runs, message.as_deref(), wall_time_seconds)?;
    Ok(RunReport {
        outcome,
        error,
        wall_time_seconds,
    })
}
