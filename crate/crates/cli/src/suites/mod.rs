//! The experiment suites. Each returns a [`SuiteReport`] whose checks are
//! aggregated in trial order, independent of scheduling.

mod abelian;
mod conservation;
pub mod counterexample;
mod finite_set;
mod locc;
mod monotonicity;
pub mod pinch;
mod rep;

use covent::channels::CovariantChannel;
use covent::monotones::MonotoneReport;
use covent::random::TrialRng;
use covent::repkit::couples;
use covent::{random_covariant_channel, GroupKind, IrrepLabel, SpaceSpec};
use rand::Rng;
use rayon::prelude::*;

use crate::config::{ExperimentConfig, Suite};
use crate::report::{CsvRow, SuiteReport};
use crate::seeds::trial_seeds;
use crate::HarnessError;

pub fn run_suite(suite: Suite, cfg: &ExperimentConfig) -> Result<SuiteReport, HarnessError> {
    match suite {
        Suite::RepChecks => rep::run(cfg),
        Suite::LoccSim => locc::run(cfg),
        Suite::FiniteSet => finite_set::run(cfg),
        Suite::Monotonicity => monotonicity::run(cfg),
        Suite::Conservation => conservation::run(cfg),
        Suite::CounterexampleL => counterexample::run(cfg),
        Suite::PinchRules => pinch::run(cfg),
        Suite::Abelian => abelian::run(cfg),
        Suite::All => unreachable!("`all` is expanded before dispatch"),
    }
}

/// Runs `f` on the seeds of `stream` in parallel; results come back in seed
/// order and the first error (in that order) aborts the suite.
pub(crate) fn par_trials<T, F>(
    suite: Suite,
    cfg: &ExperimentConfig,
    stream: &str,
    n: usize,
    f: F,
) -> Result<Vec<(u64, T)>, HarnessError>
where
    T: Send,
    F: Fn(u64) -> covent::Result<T> + Sync,
{
    let seeds = trial_seeds(cfg.seed, &format!("{}/{stream}", suite.name()), n);
    let results: Vec<(u64, covent::Result<T>)> = seeds.par_iter().map(|&s| (s, f(s))).collect();
    results
        .into_iter()
        .map(|(s, r)| r.map(|v| (s, v)).map_err(|e| HarnessError::from_core(suite, s, e)))
        .collect()
}

pub(crate) fn core_err(suite: Suite, seed: u64) -> impl Fn(covent::Error) -> HarnessError {
    move |e| HarnessError::from_core(suite, seed, e)
}

pub(crate) fn su2_pool(shapes: &[&[u32]]) -> Vec<SpaceSpec> {
    shapes.iter().map(|s| SpaceSpec::su2(s).expect("valid default space")).collect()
}

pub(crate) fn u1_pool(shapes: &[&[i32]]) -> Vec<SpaceSpec> {
    shapes.iter().map(|s| SpaceSpec::u1(s).expect("valid default space")).collect()
}

pub(crate) fn pick<'a, T>(rng: &mut TrialRng, items: &'a [T]) -> &'a T {
    &items[rng.random_range(0..items.len())]
}

/// Ranks for which some sector pair of `space` couples.
pub(crate) fn satisfiable_ranks(space: &SpaceSpec) -> Vec<IrrepLabel> {
    let candidates: Vec<IrrepLabel> = match space.group() {
        GroupKind::Su2 => (0..=4).map(IrrepLabel::Spin).collect(),
        GroupKind::U1 => (-2..=2).map(IrrepLabel::Charge).collect(),
    };
    candidates
        .into_iter()
        .filter(|&rank| {
            space
                .sectors()
                .iter()
                .any(|i| space.sectors().iter().any(|o| couples(i.irrep, rank, o.irrep)))
        })
        .collect()
}

/// A random covariant channel with a random satisfiable rank and one or two
/// multiplicity labels.
pub(crate) fn random_channel(space: &SpaceSpec, rng: &mut TrialRng) -> covent::Result<CovariantChannel> {
    let ranks = satisfiable_ranks(space);
    let rank = *pick(rng, &ranks);
    let alpha_count = rng.random_range(1..=2);
    random_covariant_channel(space, rank, alpha_count, rng.random())
}

/// CSV rows of a monotone report.
pub(crate) fn report_rows(seed: u64, space: &SpaceSpec, channel: &CovariantChannel, rep: &MonotoneReport) -> Vec<CsvRow> {
    rep.entries
        .iter()
        .map(|e| CsvRow {
            seed,
            space: space.describe(),
            channel_j: channel.rank_description(),
            monotone: format!("{}@{}", e.monotone, e.isometry),
            before: e.before,
            after: e.after,
            delta: e.delta,
            verdict: e.verdict.to_string(),
        })
        .collect()
}
