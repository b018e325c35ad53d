//! Irrep-block pinching on the `L` image: the pinched channel output `σ̄`
//! never carries more negativity than `L(ρ)`, and the `|φ⟩` worked example.

use covent::channels::{expand_kraus, normalize_family, CovariantChannel, ReducedElementTable};
use covent::embed::{block_product_decomposition, embed_l, pinch_rho_bar, pinch_sigma_bar, PinchedState};
use covent::linalg::{real, to_rows, CVec};
use covent::monotones::negativity;
use covent::random::rng;
use covent::repkit::couples;
use covent::{DensityMatrix, GroupKind, IrrepLabel, SectorKey, SpaceSpec, WeightLabel};
use rand::Rng;
use serde_json::{json, Value};

use super::{core_err, par_trials, pick, random_channel, su2_pool, u1_pool};
use crate::config::{ExperimentConfig, Suite};
use crate::report::{Check, SuiteReport};
use crate::HarnessError;

const SUITE: Suite = Suite::PinchRules;

struct PinchTrial {
    case: String,
    raw_trace: f64,
    l_negativity: f64,
    sigma_negativity: f64,
    rho_bar_negativity: f64,
}

/// Facts about the `|φ⟩` example.
pub struct PhiResult {
    pub l_negativity: f64,
    pub rho_bar_negativity: f64,
    pub sigma_bar_negativity: f64,
    pub raw_traces: (f64, f64),
    pub rho_bar_certified: bool,
    pub sigma_bar_certified: bool,
    pub verdict: String,
    pub trace: Value,
}

fn pinched_json(p: &PinchedState, neg: f64, certified: Option<bool>) -> Value {
    json!({
        "raw_trace": p.raw_trace,
        "negativity": neg,
        "product_decomposition_certified": certified,
        "state": to_rows(&p.state.matrix),
    })
}

/// `(|3/2; 1/2⟩ + |1/2; 1/2⟩)/√2` on `SU2{3/2,1/2,2,1,0}` through the
/// rank-1/2 channel with every allowed reduced element equal to one.
pub fn phi_example() -> covent::Result<PhiResult> {
    let space = SpaceSpec::su2(&[3, 1, 4, 2, 0])?;
    let half = IrrepLabel::Spin(1);
    let mut t = ReducedElementTable::new(half, 1)?;
    for &i in space.sectors() {
        for &o in space.sectors() {
            if couples(i.irrep, half, o.irrep) {
                t.insert(0, o, i, real(1.0))?;
            }
        }
    }
    let ch = CovariantChannel::from_family(normalize_family(&expand_kraus(&space, &t)?)?);
    let mut psi = CVec::zeros(space.dim());
    for tj in [3, 1] {
        let idx = space
            .index_of(SectorKey::new(IrrepLabel::Spin(tj), 0), WeightLabel(1))
            .expect("sector present");
        psi[idx] = real(1.0);
    }
    let rho = DensityMatrix::from_pure(space.clone(), &psi)?;
    let l_negativity = negativity(&embed_l(&rho)?)?;
    let rho_bar = pinch_rho_bar(&rho)?;
    let sigma = pinch_sigma_bar(&ch, &rho)?;
    let rho_bar_negativity = negativity(&rho_bar.state)?;
    let sigma_bar_negativity = negativity(&sigma.state)?;
    let rho_bar_certified = block_product_decomposition(&space, &rho_bar.state).is_some_and(|d| d.certifies());
    let sigma_bar_certified = block_product_decomposition(&space, &sigma.state).is_some_and(|d| d.certifies());
    let describe = |neg: f64, certified: bool| match (neg > 1e-12, certified) {
        (true, _) => format!("entangled (negativity {neg})"),
        (false, true) => "separable (certified product decomposition)".to_string(),
        (false, false) => "PPT, no product decomposition found".to_string(),
    };
    let verdict = format!(
        "L(phi) negativity {l_negativity}; rho_bar {}; sigma_bar {}",
        describe(rho_bar_negativity, rho_bar_certified),
        describe(sigma_bar_negativity, sigma_bar_certified)
    );
    let trace = json!({
        "description": "(|3/2;1/2> + |1/2;1/2>)/sqrt(2) on SU2{3/2,1/2,2,1,0}, rank-1/2 channel with unit reduced elements",
        "space": space,
        "channel": {
            "rank": ch.rank_description(),
            "reduced_elements": ch.components[0].family.reduced,
            "completeness_defect": ch.completeness_defect(),
        },
        "input": { "state": to_rows(rho.matrix()), "l_negativity": l_negativity },
        "rho_bar": pinched_json(&rho_bar, rho_bar_negativity, Some(rho_bar_certified)),
        "sigma_bar": pinched_json(&sigma, sigma_bar_negativity, Some(sigma_bar_certified)),
        "verdict": verdict,
    });
    Ok(PhiResult {
        l_negativity,
        rho_bar_negativity,
        sigma_bar_negativity,
        raw_traces: (rho_bar.raw_trace, sigma.raw_trace),
        rho_bar_certified,
        sigma_bar_certified,
        verdict,
        trace,
    })
}

pub fn run(cfg: &ExperimentConfig) -> Result<SuiteReport, HarnessError> {
    let tol = &cfg.tolerances;
    let mut report = SuiteReport::new(SUITE);
    let su2 = cfg.space_pool(
        GroupKind::Su2,
        &su2_pool(&[&[1, 1, 2, 0], &[2, 2, 1, 0], &[1, 2, 0], &[3, 1, 1, 2], &[2, 0, 2, 0]]),
    );
    let u1 = cfg.space_pool(GroupKind::U1, &u1_pool(&[&[0, 0, 1, 2], &[-1, 0, 0, 1]]));

    let trials = par_trials(SUITE, cfg, "pinched-bound", cfg.trials_or(500), |seed| {
        let mut r = rng(seed);
        let space = if r.random_bool(0.2) { pick(&mut r, &u1) } else { pick(&mut r, &su2) }.clone();
        let ch = random_channel(&space, &mut r)?;
        let rho = DensityMatrix::random(space.clone(), r.random_range(1..=3), r.random());
        let sigma = pinch_sigma_bar(&ch, &rho)?;
        Ok(PinchTrial {
            case: format!("{} {}", space.describe(), ch.rank_description()),
            raw_trace: sigma.raw_trace,
            l_negativity: negativity(&embed_l(&rho)?)?,
            sigma_negativity: negativity(&sigma.state)?,
            rho_bar_negativity: negativity(&pinch_rho_bar(&rho)?.state)?,
        })
    })?;
    let mut check = Check::predicate(
        "pinched-bound",
        "N(L(rho)) >= N(sigma_bar) and the pinched channel output keeps unit trace",
    );
    check.threshold = tol.monotonicity;
    let (mut sigma_above_rho_bar, mut sigma_npt) = (0, 0);
    for (seed, t) in &trials {
        let margin = t.sigma_negativity - t.l_negativity;
        let ok = margin <= tol.monotonicity && (t.raw_trace - 1.0).abs() <= tol.channel;
        check.record_outcome(*seed, t.case.clone(), ok, margin);
        sigma_above_rho_bar += usize::from(t.sigma_negativity > t.rho_bar_negativity + tol.monotonicity);
        sigma_npt += usize::from(t.sigma_negativity > tol.monotonicity);
    }
    check.note(format!(
        "sigma_bar entangled in {sigma_npt}/{n}; N(sigma_bar) > N(rho_bar) in {sigma_above_rho_bar}/{n}",
        n = trials.len()
    ));
    report.checks.push(check);

    let phi = phi_example().map_err(core_err(SUITE, cfg.seed))?;
    let mut check = Check::predicate(
        "phi-pinched-states",
        "the |phi> example: rho_bar and sigma_bar computed with unit raw trace and classified",
    );
    let ok = (phi.raw_traces.0 - 1.0).abs() <= tol.channel
        && (phi.raw_traces.1 - 1.0).abs() <= tol.channel
        && (phi.sigma_bar_negativity > tol.construction || phi.sigma_bar_certified)
        && (phi.rho_bar_negativity > tol.construction || phi.rho_bar_certified);
    check.record_outcome(0, "phi", ok, phi.sigma_bar_negativity);
    check.note(phi.verdict.clone());
    report.checks.push(check);
    report.trace = Some(phi.trace);
    Ok(report)
}
