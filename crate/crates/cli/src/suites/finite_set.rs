//! Invariance detection: weight coherence against PPT of the `C` image on
//! small cuts, the finite set `S` against the twirl, and faithfulness of the
//! supremum over `S`.

use covent::channels::twirl_distance;
use covent::embed::{coherence_criterion, invariance_via_finite_set};
use covent::linalg::{conjugate, trace, CMat};
use covent::monotones::is_ppt;
use covent::random::{random_density_matrix, rng, TrialRng};
use covent::{
    asymmetry_sup, embed_c, representation_matrix, twirl, DensityMatrix, EntanglementMonotone, GroupElement,
    GroupKind, SpaceSpec, WeightRegister,
};
use rand::seq::SliceRandom;
use rand::Rng;

use super::{par_trials, pick, su2_pool, u1_pool};
use crate::config::{ExperimentConfig, Suite};
use crate::report::{Check, SuiteReport};
use crate::HarnessError;

const SUITE: Suite = Suite::FiniteSet;

/// Zeroes every coherence between different weights.
pub(crate) fn weight_pinch(space: &SpaceSpec, m: &CMat) -> CMat {
    let basis = space.basis();
    CMat::from_fn(m.nrows(), m.ncols(), |a, b| {
        if basis[a].1 == basis[b].1 {
            m[(a, b)]
        } else {
            Default::default()
        }
    })
}

fn normalized(space: &SpaceSpec, m: CMat) -> covent::Result<DensityMatrix> {
    let tr = trace(&m).re;
    DensityMatrix::new(space.clone(), m.unscale(tr))
}

/// Basis vectors spanning a 2⊗2 cut (two distinct weights) or a 3⊗2 cut
/// (two vectors sharing a weight plus one of another weight). Falls back to
/// 2⊗2 when no weight is repeated.
fn small_support(space: &SpaceSpec, three: bool, r: &mut TrialRng) -> Vec<usize> {
    let basis = space.basis();
    let n = basis.len();
    if three {
        let mut pairs: Vec<(usize, usize)> = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                if basis[a].1 == basis[b].1 {
                    pairs.push((a, b));
                }
            }
        }
        if let Some(&(a, b)) = pairs.get(r.random_range(0..pairs.len().max(1))) {
            let others: Vec<usize> = (0..n).filter(|&c| basis[c].1 != basis[a].1).collect();
            let c = *pick(r, &others);
            let mut s = vec![a, b, c];
            s.shuffle(r);
            return s;
        }
    }
    let a = r.random_range(0..n);
    let others: Vec<usize> = (0..n).filter(|&c| basis[c].1 != basis[a].1).collect();
    vec![a, *pick(r, &others)]
}

/// Random state supported on `support`, optionally pinched by weight.
fn restricted_state(space: &SpaceSpec, support: &[usize], pinch: bool, r: &mut TrialRng) -> covent::Result<DensityMatrix> {
    let k = support.len();
    let small = random_density_matrix(r, k, k);
    let mut m = CMat::zeros(space.dim(), space.dim());
    for (i, &a) in support.iter().enumerate() {
        for (j, &b) in support.iter().enumerate() {
            m[(a, b)] = small[(i, j)];
        }
    }
    if pinch {
        m = weight_pinch(space, &m);
    }
    normalized(space, m)
}

/// Mixed sample of invariant, weight-diagonal, rotated and generic states.
fn invariance_sample(space: &SpaceSpec, category: usize, r: &mut TrialRng) -> covent::Result<(DensityMatrix, &'static str)> {
    let base = DensityMatrix::random(space.clone(), r.random_range(1..=space.dim()), r.random());
    Ok(match category {
        0 => (base, "generic"),
        1 => (twirl(&base), "twirled"),
        2 => (normalized(space, weight_pinch(space, base.matrix()))?, "weight-diagonal"),
        3 => {
            let p = weight_pinch(space, base.matrix());
            let g = match space.group() {
                GroupKind::Su2 => GroupElement::ry_half_pi(),
                GroupKind::U1 => GroupElement::random(GroupKind::U1, r),
            };
            let u = representation_matrix(space, &g)?;
            (normalized(space, conjugate(&u, &p))?, "rotated-weight-diagonal")
        }
        _ => {
            let eps = 1e-6;
            let mixed = twirl(&base).matrix().scale(1.0 - eps) + base.matrix().scale(eps);
            (normalized(space, mixed)?, "near-invariant")
        }
    })
}

pub fn run(cfg: &ExperimentConfig) -> Result<SuiteReport, HarnessError> {
    let tol = &cfg.tolerances;
    let mut report = SuiteReport::new(SUITE);
    let su2 = cfg.space_pool(GroupKind::Su2, &su2_pool(&[&[1, 1], &[1, 2, 0], &[2, 2], &[1, 2, 1], &[2, 3, 1, 0]]));
    let u1 = cfg.space_pool(GroupKind::U1, &u1_pool(&[&[0, 0, 1], &[0, 1, 1, 2], &[-1, 0, 1]]));

    let coh = par_trials(SUITE, cfg, "coherence-ppt", cfg.trials_or(500), |seed| {
        let mut r = rng(seed);
        let space = if r.random_bool(0.25) { pick(&mut r, &u1) } else { pick(&mut r, &su2) }.clone();
        let support = small_support(&space, r.random_bool(0.5), &mut r);
        let pinch = r.random_bool(0.5);
        let rho = restricted_state(&space, &support, pinch, &mut r)?;
        let verdict = coherence_criterion(&rho);
        let img = embed_c(&rho, &WeightRegister::for_space(&space, 0))?;
        let ppt = is_ppt(&img, tol.construction)?;
        let cut = format!("{}x2", support.len());
        Ok((format!("{} {cut}", space.describe()), verdict.invariant_weights == ppt, verdict.max_commutator_norm))
    })?;
    let mut check = Check::predicate(
        "coherence-vs-ppt",
        "the C image is NPT exactly when the state has coherence between weights (2x2 and 3x2 cuts)",
    );
    for (seed, (case, ok, v)) in coh {
        check.record_outcome(seed, case, ok, v);
    }
    report.checks.push(check);

    let fs = par_trials(SUITE, cfg, "finite-set-twirl", cfg.trials_or(500), |seed| {
        let mut r = rng(seed);
        let space = if r.random_bool(0.2) { pick(&mut r, &u1) } else { pick(&mut r, &su2) }.clone();
        let category = r.random_range(0..5);
        let (rho, label) = invariance_sample(&space, category, &mut r)?;
        let d = twirl_distance(&rho);
        let ok = invariance_via_finite_set(&rho) == (d < tol.channel);
        Ok((format!("{} {label}", space.describe()), ok, d))
    })?;
    let mut check = Check::predicate(
        "finite-set-vs-twirl",
        "weight coherence after each s in S vanishes exactly when the state is group invariant",
    );
    for (seed, (case, ok, v)) in fs {
        check.record_outcome(seed, case, ok, v);
    }
    report.checks.push(check);

    let sup = par_trials(SUITE, cfg, "sup-faithfulness", cfg.trials_or(100), |seed| {
        let mut r = rng(seed);
        let space = pick(&mut r, &su2).clone();
        let (rho, label) = invariance_sample(&space, r.random_range(0..4), &mut r)?;
        let s = asymmetry_sup(EntanglementMonotone::Negativity, &rho)?;
        let ok = (s > tol.channel) == (twirl_distance(&rho) > tol.channel);
        Ok((format!("{} {label}", space.describe()), ok, s))
    })?;
    let mut check = Check::predicate(
        "sup-faithfulness",
        "the supremum over S of the negativity of the C_s image is positive exactly for non-invariant states",
    );
    for (seed, (case, ok, v)) in sup {
        check.record_outcome(seed, case, ok, v);
    }
    report.checks.push(check);
    Ok(report)
}
