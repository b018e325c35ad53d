//! Representation-level identities: CG coefficients against the
//! diagonalization oracle, CG unitarity, and the homomorphism property.

use covent::linalg::{c64, is_unitary, max_abs_diff, CMat};
use covent::random::rng;
use covent::{cg_coefficient, representation_matrix, GroupElement, GroupKind, IrrepLabel, WeightLabel};

use super::{par_trials, pick, su2_pool, u1_pool};
use crate::config::{ExperimentConfig, Suite};
use crate::oracles::cg_oracle_deviation;
use crate::report::{Check, SuiteReport, Table};
use crate::HarnessError;

const SUITE: Suite = Suite::RepChecks;

/// Largest `2j1`, `2j2` compared with the oracle.
const ORACLE_MAX_TWICE_J: u32 = 4;
/// Largest `2j1`, `2j2` whose full CG matrix is tested for unitarity.
const UNITARITY_MAX_TWICE_J: u32 = 8;

fn triples(max: u32) -> Vec<(u32, u32, u32)> {
    let mut out = Vec::new();
    for tj1 in 0..=max {
        for tj2 in 0..=max {
            let mut tj3 = tj1.abs_diff(tj2);
            while tj3 <= tj1 + tj2 {
                out.push((tj1, tj2, tj3));
                tj3 += 2;
            }
        }
    }
    out
}

/// The CG matrix of `j1 ⊗ j2`: rows are product states, columns coupled states.
fn cg_matrix(tj1: u32, tj2: u32) -> CMat {
    let d = ((tj1 + 1) * (tj2 + 1)) as usize;
    let mut u = CMat::zeros(d, d);
    let mut col = 0;
    let mut tj3 = tj1.abs_diff(tj2);
    while tj3 <= tj1 + tj2 {
        for k3 in 0..=tj3 {
            let tm3 = tj3 as i32 - 2 * k3 as i32;
            for k1 in 0..=tj1 {
                for k2 in 0..=tj2 {
                    let (tm1, tm2) = (tj1 as i32 - 2 * k1 as i32, tj2 as i32 - 2 * k2 as i32);
                    let v = cg_coefficient(
                        IrrepLabel::Spin(tj1),
                        WeightLabel(tm1),
                        IrrepLabel::Spin(tj2),
                        WeightLabel(tm2),
                        IrrepLabel::Spin(tj3),
                        WeightLabel(tm3),
                    )
                    .expect("valid labels");
                    u[((k1 * (tj2 + 1) + k2) as usize, col)] = c64(v, 0.0);
                }
            }
            col += 1;
        }
        tj3 += 2;
    }
    u
}

pub fn run(cfg: &ExperimentConfig) -> Result<SuiteReport, HarnessError> {
    let tol = &cfg.tolerances;
    let mut report = SuiteReport::new(SUITE);

    let mut oracle = Check::at_most(
        "cg-oracle",
        "CG coefficients equal the coupled basis obtained by diagonalizing J^2 (2j1, 2j2 <= 4)",
        tol.construction,
    );
    for (case, (tj1, tj2, tj3)) in triples(ORACLE_MAX_TWICE_J).into_iter().enumerate() {
        oracle.record(case as u64, format!("2j=({tj1},{tj2},{tj3})"), cg_oracle_deviation(tj1, tj2, tj3));
    }
    report.checks.push(oracle);

    let mut unitarity = Check::at_most(
        "cg-unitarity",
        "CG orthogonality and completeness for 2j1, 2j2 <= 8",
        tol.construction,
    );
    let mut table = Table {
        name: "cg-unitarity".into(),
        header: ["twice_j1", "twice_j2", "orthogonality", "completeness"].map(String::from).to_vec(),
        rows: Vec::new(),
    };
    let mut case = 0u64;
    for tj1 in 0..=UNITARITY_MAX_TWICE_J {
        for tj2 in 0..=UNITARITY_MAX_TWICE_J {
            let u = cg_matrix(tj1, tj2);
            let id = CMat::identity(u.nrows(), u.ncols());
            let orth = max_abs_diff(&(u.adjoint() * &u), &id);
            let comp = max_abs_diff(&(&u * u.adjoint()), &id);
            unitarity.record(case, format!("2j=({tj1},{tj2})"), orth.max(comp));
            table.rows.push(vec![tj1.to_string(), tj2.to_string(), orth.to_string(), comp.to_string()]);
            case += 1;
        }
    }
    report.checks.push(unitarity);
    report.tables.push(table);

    let spaces = cfg.space_pool(GroupKind::Su2, &su2_pool(&[&[1, 2, 3, 4], &[0, 1, 2], &[6, 3, 1]]));
    let u1_spaces = cfg.space_pool(GroupKind::U1, &u1_pool(&[&[-2, 0, 3], &[0, 1, 1, 2]]));
    let trials = par_trials(SUITE, cfg, "homomorphism", cfg.trials_or(100), |seed| {
        let mut r = rng(seed);
        let (space, group) = if seed % 4 == 0 {
            (pick(&mut r, &u1_spaces).clone(), GroupKind::U1)
        } else {
            (pick(&mut r, &spaces).clone(), GroupKind::Su2)
        };
        let g = GroupElement::random(group, &mut r);
        let h = GroupElement::random(group, &mut r);
        let ug = representation_matrix(&space, &g)?;
        let uh = representation_matrix(&space, &h)?;
        let ugh = representation_matrix(&space, &g.compose(&h)?)?;
        let ginv = representation_matrix(&space, &g.inverse())?;
        let unitary = if is_unitary(&ug, tol.construction) { 0.0 } else { f64::INFINITY };
        let residual = max_abs_diff(&(&ug * &uh), &ugh)
            .max(max_abs_diff(&ginv, &ug.adjoint()))
            .max(unitary);
        Ok((space.describe(), residual))
    })?;
    let mut homo = Check::at_most(
        "representation-homomorphism",
        "U(g)U(h) = U(gh), U(g^-1) = U(g)^dagger and unitarity on random elements",
        tol.construction,
    );
    for (seed, (space, residual)) in trials {
        homo.record(seed, space, residual);
    }
    report.checks.push(homo);
    Ok(report)
}
