//! The U(1) specialization: invariance is equivalent to a separable `C`
//! image, every `C_θ` equals `C`, the `C` and `L` Kraus sets are related by a
//! relabeling, and pinched channel outputs are separable.

use std::f64::consts::TAU;

use covent::abelian::{
    abelian_isometry_equivalence, abelian_kraus, abelian_separability_theorem, phase_covariance_residual,
    twirl_is_pinching, AbelianEntry, ChargeSector,
};
use covent::linalg::real;
use covent::random::rng;
use covent::{twirl, DensityMatrix, GroupKind, SpaceSpec};
use rand::Rng;

use super::{par_trials, pick, random_channel, u1_pool};
use crate::config::{ExperimentConfig, Suite};
use crate::report::{Check, SuiteReport};
use crate::HarnessError;

const SUITE: Suite = Suite::Abelian;
const PHASES_PER_STATE: usize = 20;

struct AbelianTrial {
    case: String,
    biconditional: bool,
    twirl_distance: f64,
    sigma_certified: bool,
    sigma_residual: f64,
    cg_vs_c: f64,
    relabeling: f64,
    twirl_pinching: f64,
    phase_covariance: f64,
}

/// A shift that leaves the space is rejected unless truncation is allowed,
/// in which case the family is flagged and loses trace.
fn truncation_behaviour() -> covent::Result<bool> {
    let space = SpaceSpec::u1(&[0, 1])?;
    let entries = [
        AbelianEntry {
            alpha: 0,
            input: ChargeSector::new(0, 0),
            out_lambda: 0,
            value: real(1.0),
        },
        AbelianEntry {
            alpha: 0,
            input: ChargeSector::new(1, 0),
            out_lambda: 0,
            value: real(1.0),
        },
    ];
    let strict = matches!(
        abelian_kraus(&space, 1, 1, &entries, false),
        Err(covent::Error::Truncation { target: 2 })
    );
    let lenient = abelian_kraus(&space, 1, 1, &entries, true)?;
    Ok(strict && lenient.truncating && lenient.family.completeness_defect() > 0.5)
}

pub fn run(cfg: &ExperimentConfig) -> Result<SuiteReport, HarnessError> {
    let tol = &cfg.tolerances;
    let mut report = SuiteReport::new(SUITE);
    let spaces = cfg.space_pool(
        GroupKind::U1,
        &u1_pool(&[&[0, 1, 2, 1], &[-1, 0, 1, 1, 0], &[0, 0, 1, 2], &[-2, 0, 2, 0]]),
    );

    let trials = par_trials(SUITE, cfg, "states", cfg.trials_or(300), |seed| {
        let mut r = rng(seed);
        let space = pick(&mut r, &spaces).clone();
        let base = DensityMatrix::random(space.clone(), r.random_range(1..=space.dim()), r.random());
        let invariant = r.random_bool(0.5);
        let rho = if invariant { twirl(&base) } else { base };
        let ch = random_channel(&space, &mut r)?;
        let family = &ch.components[0].family;
        let thetas: Vec<f64> = (0..PHASES_PER_STATE).map(|_| r.random::<f64>() * TAU).collect();
        let sep = abelian_separability_theorem(&rho, &ch)?;
        let eq = abelian_isometry_equivalence(&rho, family, &thetas)?;
        let mut phase_covariance: f64 = 0.0;
        for &theta in &thetas {
            phase_covariance = phase_covariance.max(phase_covariance_residual(family, theta)?);
        }
        Ok(AbelianTrial {
            case: format!("{} {} {}", space.describe(), ch.rank_description(), if invariant { "invariant" } else { "generic" }),
            biconditional: sep.invariant == sep.image_separable,
            twirl_distance: sep.twirl_distance,
            sigma_certified: sep.sigma_bar.certifies(),
            sigma_residual: sep.sigma_bar.residual,
            cg_vs_c: eq.cg_vs_c,
            relabeling: eq.kraus_relabeling,
            twirl_pinching: twirl_is_pinching(&rho)?,
            phase_covariance,
        })
    })?;

    let mut bicond = Check::predicate(
        "abelian-biconditional",
        "a U(1) state is invariant exactly when its C image is separable",
    );
    let mut sigma = Check::predicate(
        "abelian-sigma-bar-separable",
        "the pinched channel output sigma_bar has a certified product decomposition",
    );
    let mut cg = Check::at_most("abelian-cg-equals-c", "C_theta(rho) = C(rho) for 20 random phases", tol.construction);
    let mut relabel = Check::at_most(
        "abelian-kraus-relabeling",
        "R (K x T_N) R^dagger = Pi_W (V_N x K_tilde) Pi_W with R = V_L V_C^dagger",
        tol.construction,
    );
    let mut pinching = Check::at_most("twirl-is-pinching", "the U(1) twirl is the charge pinching", tol.construction);
    let mut phase = Check::at_most(
        "abelian-phase-covariance",
        "U(theta) K U(theta)^dagger = e^{i N theta} K for every Kraus operator",
        tol.construction,
    );
    for (seed, t) in &trials {
        bicond.record_outcome(*seed, t.case.clone(), t.biconditional, t.twirl_distance);
        sigma.record_outcome(*seed, t.case.clone(), t.sigma_certified, t.sigma_residual);
        cg.record(*seed, t.case.clone(), t.cg_vs_c);
        relabel.record(*seed, t.case.clone(), t.relabeling);
        pinching.record(*seed, t.case.clone(), t.twirl_pinching);
        phase.record(*seed, t.case.clone(), t.phase_covariance);
    }
    report.checks.extend([bicond, sigma, cg, relabel, pinching, phase]);

    let mut trunc = Check::predicate(
        "abelian-truncation",
        "charge shifts leaving the space are rejected, or flagged as trace-decreasing when allowed",
    );
    let ok = truncation_behaviour().map_err(super::core_err(SUITE, cfg.seed))?;
    trunc.record_outcome(0, "U1[0,1] shift +1", ok, 0.0);
    report.checks.push(trunc);
    Ok(report)
}
