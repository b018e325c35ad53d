//! Channel synthesis and the LOCC simulation identities.
//!
//! - covariance of synthesized channels over random group elements, with a
//!   corrupted-coefficient negative control;
//! - `V E(ρ) V† = Σ K̃ V ρ V† K̃†` for `V = C` and `C_s`, `s ∈ S`;
//! - the `L`-side reconstruction of `L(E(ρ))`.

use covent::embed::{finite_set, l_reproduction_residual, locc_simulation_residual};
use covent::linalg::CMat;
use covent::random::rng;
use covent::{covariance_residual, CovariantChannel, DensityMatrix, GroupElement, GroupKind, SpaceSpec, WeightRegister};
use rand::Rng;

use super::{par_trials, pick, random_channel, su2_pool, u1_pool};
use crate::config::{ExperimentConfig, Suite};
use crate::report::{Check, SuiteReport};
use crate::HarnessError;

const SUITE: Suite = Suite::LoccSim;
const GROUP_ELEMENTS_PER_CHANNEL: usize = 100;

/// Doubles the largest-magnitude Kraus entry whose input lies in an irrep of
/// dimension above one. Returns `None` when no such entry exists (for
/// example on U(1), where every irrep is one-dimensional and rescaling a
/// single coefficient keeps the family covariant).
fn corrupt(channel: &CovariantChannel) -> Option<CovariantChannel> {
    let space = channel.space();
    let mut best: Option<(usize, usize, usize, usize, f64)> = None;
    for (ci, comp) in channel.components.iter().enumerate() {
        for (ki, k) in comp.family.kraus.iter().enumerate() {
            for c in 0..k.matrix.ncols() {
                let (sector, _) = space.basis_label(c).expect("index in range");
                if sector.irrep.dim() < 2 {
                    continue;
                }
                for r in 0..k.matrix.nrows() {
                    let v = k.matrix[(r, c)].norm();
                    if v > best.map_or(1e-6, |b| b.4) {
                        best = Some((ci, ki, r, c, v));
                    }
                }
            }
        }
    }
    let (ci, ki, r, c, _) = best?;
    let mut bad = channel.clone();
    let m: &mut CMat = &mut bad.components[ci].family.kraus[ki].matrix;
    m[(r, c)] *= 2.0;
    Some(bad)
}

struct SynthesisTrial {
    space: String,
    rank: String,
    covariance: f64,
    completeness: f64,
    corrupted: Option<f64>,
}

fn default_spaces(cfg: &ExperimentConfig) -> (Vec<SpaceSpec>, Vec<SpaceSpec>) {
    let su2 = cfg.space_pool(
        GroupKind::Su2,
        &su2_pool(&[&[2, 1, 0], &[1, 1, 2], &[2, 3, 1, 0], &[4, 2, 0], &[1, 3], &[2, 2, 1], &[3, 1, 2, 0]]),
    );
    let u1 = cfg.space_pool(GroupKind::U1, &u1_pool(&[&[0, 1, 2], &[-1, 0, 1, 0], &[0, 0, 1, 2, 1]]));
    (su2, u1)
}

pub fn run(cfg: &ExperimentConfig) -> Result<SuiteReport, HarnessError> {
    let tol = &cfg.tolerances;
    let mut report = SuiteReport::new(SUITE);
    let (su2, u1) = default_spaces(cfg);

    let synth = par_trials(SUITE, cfg, "synthesis", cfg.trials_or(100), |seed| {
        let mut r = rng(seed);
        let (space, group) = if r.random_bool(0.2) {
            (pick(&mut r, &u1).clone(), GroupKind::U1)
        } else {
            (pick(&mut r, &su2).clone(), GroupKind::Su2)
        };
        let ch = random_channel(&space, &mut r)?;
        let elements: Vec<GroupElement> =
            (0..GROUP_ELEMENTS_PER_CHANNEL).map(|_| GroupElement::random(group, &mut r)).collect();
        let mut covariance: f64 = 0.0;
        for g in &elements {
            covariance = covariance.max(covariance_residual(&ch, g)?);
        }
        let corrupted = match corrupt(&ch) {
            Some(bad) => {
                let mut worst: f64 = 0.0;
                for g in &elements {
                    worst = worst.max(covariance_residual(&bad, g)?);
                }
                Some(worst)
            }
            None => None,
        };
        Ok(SynthesisTrial {
            space: space.describe(),
            rank: ch.rank_description(),
            covariance,
            completeness: ch.completeness_defect(),
            corrupted,
        })
    })?;
    let mut covariance = Check::at_most(
        "covariance-synthesis",
        "synthesized channels commute with the group action on 100 random elements and are trace preserving",
        tol.channel,
    );
    let mut control = Check::at_least(
        "covariance-negative-control",
        "doubling one coefficient of a synthesized SU(2) channel breaks covariance detectably",
        tol.negative_control,
    );
    let mut skipped = 0;
    for (seed, t) in &synth {
        let case = format!("{} {}", t.space, t.rank);
        covariance.record(*seed, case.clone(), t.covariance.max(t.completeness));
        match t.corrupted {
            Some(v) => control.record(*seed, case, v),
            None => skipped += 1,
        }
    }
    if skipped > 0 {
        control.note(format!(
            "{skipped} channel(s) without an entry in a multi-dimensional irrep (U(1)) have no corruption that breaks covariance and were skipped"
        ));
    }
    report.checks.push(covariance);
    report.checks.push(control);

    let locc = par_trials(SUITE, cfg, "locc-identity", cfg.trials_or(50), |seed| {
        let mut r = rng(seed);
        let space = pick(&mut r, &su2).clone();
        let ch = random_channel(&space, &mut r)?;
        let reg = WeightRegister::for_channel(&ch);
        let mut worst: f64 = locc_simulation_residual(&ch, &reg, None)?;
        for s in finite_set(space.group()) {
            worst = worst.max(locc_simulation_residual(&ch, &reg, Some(&s))?);
        }
        Ok((format!("{} {}", space.describe(), ch.rank_description()), worst))
    })?;
    let mut check = Check::at_most(
        "locc-simulation",
        "C_s E(rho) C_s^dagger equals the local Kraus set (U K U^dagger) x T_M applied to C_s(rho), for C and every s in S",
        tol.channel,
    );
    for (seed, (case, v)) in locc {
        check.record(seed, case, v);
    }
    report.checks.push(check);

    let l_rep = par_trials(SUITE, cfg, "l-reproduction", cfg.trials_or(100), |seed| {
        let mut r = rng(seed);
        let space = if r.random_bool(0.2) { pick(&mut r, &u1) } else { pick(&mut r, &su2) }.clone();
        let ch = random_channel(&space, &mut r)?;
        let rho = DensityMatrix::random(space.clone(), r.random_range(1..=3), r.random());
        Ok((format!("{} {}", space.describe(), ch.rank_description()), l_reproduction_residual(&ch, &rho)?))
    })?;
    let mut check = Check::at_most(
        "l-reproduction",
        "L(E(rho)) equals the projected L-side Kraus action on L(rho)",
        tol.channel,
    );
    for (seed, (case, v)) in l_rep {
        check.record(seed, case, v);
    }
    report.checks.push(check);
    Ok(report)
}
