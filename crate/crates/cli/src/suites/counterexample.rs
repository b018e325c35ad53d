//! The `L`-image negativity is not an asymmetry monotone: a covariant channel
//! on `{1/2, 1, 0}` maps the product image of `|1/2; 1/2⟩` to an entangled one.

use covent::channels::{expand_kraus, normalize_family, CovariantChannel, ReducedElementTable};
use covent::embed::{embed_l, LLayout};
use covent::linalg::{conjugate, real, to_rows, trace};
use covent::monotones::{log_negativity, monotonicity_report, negativity};
use covent::{apply_channel, DensityMatrix, IrrepLabel, SectorKey, SpaceSpec};
use serde_json::{json, Value};

use super::core_err;
use crate::config::{ExperimentConfig, Suite};
use crate::report::{Check, SuiteReport};
use crate::HarnessError;

const SUITE: Suite = Suite::CounterexampleL;

fn spin(tj: u32) -> SectorKey {
    SectorKey::new(IrrepLabel::Spin(tj), 0)
}

/// Rank-1/2 channel with unit reduced elements between the spin-1/2 sector
/// and each integer sector, in both directions.
pub fn counterexample_channel() -> covent::Result<CovariantChannel> {
    let space = SpaceSpec::su2(&[1, 2, 0])?;
    let mut t = ReducedElementTable::new(IrrepLabel::Spin(1), 1)?;
    for (o, i) in [(2, 1), (0, 1), (1, 2), (1, 0)] {
        t.insert(0, spin(o), spin(i), real(1.0))?;
    }
    Ok(CovariantChannel::from_family(normalize_family(&expand_kraus(&space, &t)?)?))
}

/// `L`-image negativity before and after the channel, and the full trace.
pub struct CounterexampleResult {
    pub before: f64,
    pub after: f64,
    pub c_side_passed: bool,
    pub trace: Value,
}

pub fn counterexample() -> covent::Result<CounterexampleResult> {
    let ch = counterexample_channel()?;
    let space = ch.space().clone();
    let psi = DensityMatrix::basis_state(space.clone(), 0)?;
    let out = apply_channel(&ch, &psi)?;
    let l_in = embed_l(&psi)?;
    let l_out = embed_l(&out)?;
    let before = negativity(&l_in)?;
    let after = negativity(&l_out)?;
    let layout = LLayout::new(&space);

    let mut branches = Vec::new();
    for k in ch.pooled_kraus() {
        let branch = conjugate(&k.matrix, psi.matrix());
        let p = trace(&branch).re;
        let entry = if p > 1e-14 {
            let state = DensityMatrix::new(space.clone(), branch.unscale(p))?;
            let img = embed_l(&state)?;
            json!({
                "twice_M": k.twice_m,
                "alpha": k.alpha,
                "probability": p,
                "kraus": to_rows(&k.matrix),
                "state": to_rows(state.matrix()),
                "l_negativity": negativity(&img)?,
            })
        } else {
            json!({ "twice_M": k.twice_m, "alpha": k.alpha, "probability": 0.0, "kraus": to_rows(&k.matrix) })
        };
        branches.push(entry);
    }
    let c_side = monotonicity_report(&psi, &ch)?;
    let trace = json!({
        "description": "covariant rank-1/2 channel on SU2{1/2,1,0} applied to |1/2; m=1/2>; the L image goes from product to entangled",
        "space": space,
        "basis": space.basis().iter().map(|(s, w)| format!("{} 2m={}", space.sectors()[*s], w.0)).collect::<Vec<_>>(),
        "l_cut": [layout.m_dim, layout.n_dim],
        "l_irrep_order": layout.irreps.iter().map(|j| j.to_string()).collect::<Vec<_>>(),
        "channel": {
            "rank": ch.rank_description(),
            "reduced_elements": ch.components[0].family.reduced,
            "completeness_defect": ch.completeness_defect(),
        },
        "input": {
            "state": to_rows(psi.matrix()),
            "l_image": to_rows(&l_in.matrix),
            "l_negativity": before,
            "l_log_negativity": log_negativity(&l_in)?,
        },
        "branches": branches,
        "output": {
            "state": to_rows(out.matrix()),
            "l_image": to_rows(&l_out.matrix),
            "l_negativity": after,
            "l_log_negativity": log_negativity(&l_out)?,
        },
        "c_side_monotones": c_side.entries,
        "verdict": if after > before {
            "L-image negativity increased under a covariant channel; it is not an asymmetry monotone"
        } else {
            "no increase observed"
        },
    });
    Ok(CounterexampleResult {
        before,
        after,
        c_side_passed: c_side.passed(),
        trace,
    })
}

pub fn run(cfg: &ExperimentConfig) -> Result<SuiteReport, HarnessError> {
    let tol = &cfg.tolerances;
    let mut report = SuiteReport::new(SUITE);
    let result = counterexample().map_err(core_err(SUITE, cfg.seed))?;

    let mut check = Check::predicate(
        "l-counterexample",
        "the L image of |1/2; 1/2> is a product state and its image after the channel is entangled",
    );
    let ok = result.before.abs() <= tol.construction && result.after > tol.monotonicity;
    check.record_outcome(0, format!("before {:e}, after {:e}", result.before, result.after), ok, result.after);
    check.note(format!("L-image negativity: before {}, after {}", result.before, result.after));
    report.checks.push(check);

    let mut check = Check::predicate(
        "l-counterexample-c-side",
        "on the same state and channel the C-image monotones do not grow",
    );
    check.record_outcome(0, "", result.c_side_passed, 0.0);
    report.checks.push(check);
    report.trace = Some(result.trace);
    Ok(report)
}
