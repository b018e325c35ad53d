//! Experiment harness: seeded, parallel suites over the `covent` library with
//! CSV rows, JSON summaries and structured traces as output.
//!
//! A run is a pure function of its [`ExperimentConfig`]: trials are derived
//! from the base seed and aggregated in seed order, so output files are
//! byte-identical across thread counts.

pub mod config;
pub mod oracles;
pub mod report;
pub mod seeds;
pub mod suites;

use std::path::PathBuf;

use thiserror::Error;

pub use config::{ExperimentConfig, Overrides, Suite, Tolerances};
pub use report::{Check, CsvRow, RunSummary, SuiteReport, Violation};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("numerical abort in {suite} (seed {seed}): {message}")]
    Numerical { suite: Suite, seed: u64, message: String },

    #[error("{suite} failed to run (seed {seed}): {source}")]
    Core {
        suite: Suite,
        seed: u64,
        #[source]
        source: covent::Error,
    },
}

impl HarnessError {
    /// Process exit code: 2 for configuration and output errors, 3 for a
    /// numerical abort, 1 for any other failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) | HarnessError::Io { .. } => 2,
            HarnessError::Numerical { .. } => 3,
            HarnessError::Core { .. } => 1,
        }
    }

    pub(crate) fn from_core(suite: Suite, seed: u64, e: covent::Error) -> Self {
        match e {
            covent::Error::Numerical(message) => HarnessError::Numerical { suite, seed, message },
            source => HarnessError::Core { suite, seed, source },
        }
    }
}

/// Result of a completed run.
#[derive(Debug)]
pub struct RunOutcome {
    pub reports: Vec<SuiteReport>,
    pub summary: RunSummary,
}

impl RunOutcome {
    pub fn passed(&self) -> bool {
        self.summary.passed
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            1
        }
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.reports.iter().flat_map(|r| &r.checks).find(|c| c.name == name)
    }
}

/// Runs the configured suites and writes their outputs under `cfg.out`.
pub fn run(cfg: &ExperimentConfig) -> Result<RunOutcome, HarnessError> {
    cfg.validate()?;
    let reports = if cfg.single_thread {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .map_err(|e| HarnessError::Config(format!("cannot build thread pool: {e}")))?;
        pool.install(|| run_suites(cfg))?
    } else {
        run_suites(cfg)?
    };
    let summary = RunSummary::new(cfg, &reports);
    report::write_outputs(&cfg.out, &reports, &summary)?;
    Ok(RunOutcome { reports, summary })
}

fn run_suites(cfg: &ExperimentConfig) -> Result<Vec<SuiteReport>, HarnessError> {
    cfg.suite.expand().into_iter().map(|s| suites::run_suite(s, cfg)).collect()
}
