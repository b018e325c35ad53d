//! Check records, CSV rows, summaries and the files they are written to.

use std::fs;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::config::{ExperimentConfig, Suite, Tolerances};
use crate::HarnessError;

/// How a recorded value is compared with the threshold.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Bound {
    /// Pass iff `value <= threshold`; the worst value is the largest.
    AtMost,
    /// Pass iff `value >= threshold`; the worst value is the smallest.
    AtLeast,
    /// Pass/fail decided by the caller; `value` is informational.
    Predicate,
}

/// A failing trial.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    /// Trial seed, or the case index for deterministic sweeps.
    pub seed: u64,
    pub case: String,
    pub value: f64,
}

/// Aggregated outcome of one named check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub description: String,
    pub bound: Bound,
    pub threshold: f64,
    pub trials: usize,
    pub passed: usize,
    /// Largest value for `at-most`, smallest for `at-least`, largest for
    /// `predicate`; `null` before any trial.
    pub worst: Option<f64>,
    pub violations: Vec<Violation>,
    pub notes: Vec<String>,
}

impl Check {
    pub fn new(name: &str, description: &str, bound: Bound, threshold: f64) -> Self {
        Self {
            name: name.to_string(),
            description: description.to_string(),
            bound,
            threshold,
            trials: 0,
            passed: 0,
            worst: None,
            violations: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn at_most(name: &str, description: &str, threshold: f64) -> Self {
        Self::new(name, description, Bound::AtMost, threshold)
    }

    pub fn at_least(name: &str, description: &str, threshold: f64) -> Self {
        Self::new(name, description, Bound::AtLeast, threshold)
    }

    pub fn predicate(name: &str, description: &str) -> Self {
        Self::new(name, description, Bound::Predicate, 0.0)
    }

    /// Records a value against the bound.
    pub fn record(&mut self, seed: u64, case: impl Into<String>, value: f64) {
        let ok = match self.bound {
            Bound::AtMost => value <= self.threshold,
            Bound::AtLeast => value >= self.threshold,
            Bound::Predicate => panic!("predicate checks take an explicit outcome"),
        };
        self.record_outcome(seed, case, ok, value);
    }

    /// Records an explicit pass/fail with an informational value.
    pub fn record_outcome(&mut self, seed: u64, case: impl Into<String>, ok: bool, value: f64) {
        self.trials += 1;
        let value = if value.is_nan() { f64::INFINITY } else { value };
        self.worst = Some(match (self.worst, self.bound) {
            (None, _) => value,
            (Some(w), Bound::AtLeast) => w.min(value),
            (Some(w), _) => w.max(value),
        });
        if ok {
            self.passed += 1;
        } else {
            self.violations.push(Violation {
                seed,
                case: case.into(),
                value,
            });
        }
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    /// Passes when at least one trial ran and all trials passed.
    pub fn ok(&self) -> bool {
        self.trials > 0 && self.passed == self.trials
    }

    pub fn violating_seeds(&self) -> Vec<u64> {
        self.violations.iter().map(|v| v.seed).collect()
    }

    /// One-line human summary.
    pub fn line(&self) -> String {
        let worst = self.worst.map_or("-".to_string(), |w| format!("{w:.3e}"));
        let rel = match self.bound {
            Bound::AtMost => format!(" (worst {worst} <= {:.1e})", self.threshold),
            Bound::AtLeast => format!(" (worst {worst} >= {:.1e})", self.threshold),
            Bound::Predicate => String::new(),
        };
        format!(
            "{} {}: {}/{} trials{}",
            if self.ok() { "PASS" } else { "FAIL" },
            self.name,
            self.passed,
            self.trials,
            rel
        )
    }
}

/// One monotone comparison, as written to `<suite>.csv`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CsvRow {
    pub seed: u64,
    pub space: String,
    #[serde(rename = "channel-J")]
    pub channel_j: String,
    /// `<monotone>@<isometry>`.
    pub monotone: String,
    pub before: f64,
    pub after: f64,
    pub delta: f64,
    pub verdict: String,
}

/// An additional named CSV table emitted next to the suite's rows.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub suite: Suite,
    pub checks: Vec<Check>,
    pub rows: Vec<CsvRow>,
    pub tables: Vec<Table>,
    /// Structured trace for the worked examples.
    pub trace: Option<Value>,
}

impl SuiteReport {
    pub fn new(suite: Suite) -> Self {
        Self {
            suite,
            checks: Vec::new(),
            rows: Vec::new(),
            tables: Vec::new(),
            trace: None,
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::ok)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteSummary {
    pub suite: Suite,
    pub passed: bool,
    pub checks: Vec<Check>,
    pub rows: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunSummary {
    pub suite: Suite,
    pub seed: u64,
    pub trials_override: Option<usize>,
    pub tolerances: Tolerances,
    pub passed: bool,
    pub checks_passed: usize,
    pub checks_total: usize,
    pub suites: Vec<SuiteSummary>,
}

impl RunSummary {
    pub fn new(cfg: &ExperimentConfig, reports: &[SuiteReport]) -> Self {
        let suites: Vec<SuiteSummary> = reports
            .iter()
            .map(|r| SuiteSummary {
                suite: r.suite,
                passed: r.passed(),
                checks: r.checks.clone(),
                rows: r.rows.len(),
            })
            .collect();
        let all: Vec<&Check> = reports.iter().flat_map(|r| &r.checks).collect();
        Self {
            suite: cfg.suite,
            seed: cfg.seed,
            trials_override: cfg.trials,
            tolerances: cfg.tolerances.clone(),
            passed: suites.iter().all(|s| s.passed),
            checks_passed: all.iter().filter(|c| c.ok()).count(),
            checks_total: all.len(),
            suites,
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), HarnessError> {
    fs::write(path, bytes).map_err(io_err(path))
}

fn to_json_bytes<T: Serialize>(value: &T) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("report values serialize");
    bytes.push(b'\n');
    bytes
}

fn csv_bytes<F>(path: &Path, fill: F) -> Result<Vec<u8>, HarnessError>
where
    F: FnOnce(&mut csv::Writer<Vec<u8>>) -> csv::Result<()>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    fill(&mut w).map_err(|e| HarnessError::Io {
        path: path.to_path_buf(),
        source: std::io::Error::other(e),
    })?;
    w.into_inner().map_err(|e| HarnessError::Io {
        path: path.to_path_buf(),
        source: std::io::Error::other(e.to_string()),
    })
}

const ROW_HEADER: [&str; 8] = ["seed", "space", "channel-J", "monotone", "before", "after", "delta", "verdict"];

/// Writes `<suite>.csv`, `<suite>.summary.json`, optional `<suite>.trace.json`
/// and `<suite>.<table>.csv` for each report, then `run.summary.json`.
pub fn write_outputs(dir: &Path, reports: &[SuiteReport], summary: &RunSummary) -> Result<(), HarnessError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    for (r, s) in reports.iter().zip(&summary.suites) {
        let name = r.suite.name();
        let path = dir.join(format!("{name}.csv"));
        let bytes = csv_bytes(&path, |w| {
            if r.rows.is_empty() {
                w.write_record(ROW_HEADER)?;
            }
            for row in &r.rows {
                w.serialize(row)?;
            }
            Ok(())
        })?;
        write_file(&path, &bytes)?;
        write_file(&dir.join(format!("{name}.summary.json")), &to_json_bytes(s))?;
        if let Some(trace) = &r.trace {
            write_file(&dir.join(format!("{name}.trace.json")), &to_json_bytes(trace))?;
        }
        for t in &r.tables {
            let path = dir.join(format!("{name}.{}.csv", t.name));
            let bytes = csv_bytes(&path, |w| {
                w.write_record(&t.header)?;
                for row in &t.rows {
                    w.write_record(row)?;
                }
                Ok(())
            })?;
            write_file(&path, &bytes)?;
        }
    }
    write_file(&dir.join("run.summary.json"), &to_json_bytes(summary))
}
