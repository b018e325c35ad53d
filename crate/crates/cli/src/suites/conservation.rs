//! Covariant unitaries conserve every asymmetry monotone and the
//! `L`-image monotones.

use covent::monotones::conservation_check;
use covent::random::rng;
use covent::{random_covariant_unitary, DensityMatrix, GroupKind};
use rand::Rng;

use super::{par_trials, pick, report_rows, su2_pool, u1_pool};
use crate::config::{ExperimentConfig, Suite};
use crate::report::{Check, SuiteReport};
use crate::HarnessError;

const SUITE: Suite = Suite::Conservation;

pub fn run(cfg: &ExperimentConfig) -> Result<SuiteReport, HarnessError> {
    let tol = &cfg.tolerances;
    let mut report = SuiteReport::new(SUITE);
    let su2 = cfg.space_pool(GroupKind::Su2, &su2_pool(&[&[1, 1, 2], &[2, 2, 1, 0], &[1, 2, 1, 0], &[3, 1, 3]]));
    let u1 = cfg.space_pool(GroupKind::U1, &u1_pool(&[&[0, 0, 1, 1], &[-1, 0, 1, 0]]));

    let trials = par_trials(SUITE, cfg, "unitaries", cfg.trials_or(100), |seed| {
        let mut r = rng(seed);
        let space = if r.random_bool(0.2) { pick(&mut r, &u1) } else { pick(&mut r, &su2) }.clone();
        let u = random_covariant_unitary(&space, r.random())?;
        let rho = DensityMatrix::random(space.clone(), r.random_range(1..=3), r.random());
        let rep = conservation_check(&rho, &u)?;
        Ok((report_rows(seed, &space, &u, &rep), rep.max_abs_delta()))
    })?;
    let mut check = Check::predicate(
        "conservation",
        "random covariant unitaries leave every A^s_E and the L-image monotones unchanged",
    );
    check.threshold = tol.conservation;
    for (seed, (rows, worst)) in trials {
        let ok = rows.iter().all(|row| row.delta.abs() < tol.conservation);
        check.record_outcome(seed, rows.first().map_or(String::new(), |r| r.space.clone()), ok, worst);
        report.rows.extend(rows);
    }
    report.checks.push(check);
    Ok(report)
}
