use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use covent_cli::{run, ExperimentConfig, HarnessError, Overrides};

/// Run seeded experiment suites over covariant channels and their LOCC
/// simulations.
///
/// Exit status: 0 all checks passed, 1 a check failed, 2 configuration or
/// output error, 3 numerical abort.
#[derive(Debug, Parser)]
#[command(name = "covent", version)]
struct Cli {
    /// rep-checks, locc-sim, monotonicity, finite-set, counterexample-L,
    /// pinch-rules, abelian, conservation or all.
    #[arg(long)]
    suite: Option<String>,

    /// JSON experiment config; command-line flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,

    #[arg(long)]
    seed: Option<u64>,

    /// Overrides every suite's default trial count.
    #[arg(long)]
    trials: Option<usize>,

    /// Output directory for CSV, summary and trace files.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Run on one thread; output is identical either way.
    #[arg(long)]
    single_thread: bool,

    /// Tolerance override `name=value`; repeatable. Names: construction,
    /// channel, monotonicity, conservation, negative-control.
    #[arg(long = "tolerance", value_name = "NAME=VALUE")]
    tolerances: Vec<String>,
}

fn configure(cli: Cli) -> Result<ExperimentConfig, HarnessError> {
    let base = match &cli.config {
        Some(path) => ExperimentConfig::from_json_file(path)?,
        None => ExperimentConfig::default(),
    };
    Overrides {
        suite: cli.suite,
        seed: cli.seed,
        trials: cli.trials,
        out: cli.out,
        single_thread: cli.single_thread,
        tolerances: cli.tolerances,
    }
    .apply(base)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = configure(cli).and_then(|cfg| run(&cfg));
    match outcome {
        Ok(outcome) => {
            for report in &outcome.reports {
                for check in &report.checks {
                    println!("[{}] {}", report.suite, check.line());
                }
            }
            println!(
                "{}/{} checks passed",
                outcome.summary.checks_passed, outcome.summary.checks_total
            );
            ExitCode::from(outcome.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("covent: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
