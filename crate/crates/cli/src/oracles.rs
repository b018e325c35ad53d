//! Independent constructions the harness compares library results against.

use covent::linalg::{eigh, real, CMat, CVec};

/// `(J_z, J_+)` for spin `tj/2`, basis ordered by descending weight.
fn spin_ops(tj: u32) -> (CMat, CMat) {
    let d = tj as usize + 1;
    let j = tj as f64 / 2.0;
    let mut jz = CMat::zeros(d, d);
    let mut jp = CMat::zeros(d, d);
    for k in 0..d {
        let m = j - k as f64;
        jz[(k, k)] = real(m);
        if k > 0 {
            jp[(k - 1, k)] = real((j * (j + 1.0) - m * (m + 1.0)).sqrt());
        }
    }
    (jz, jp)
}

/// The coupled states `|j3, m3⟩`, `m3 = j3, j3-1, …`, of `j1 ⊗ j2` expanded in
/// the product basis `|m1⟩|m2⟩` (row index `k1 * (tj2+1) + k2`).
///
/// Built by diagonalizing `J²` on the `J_z = j3` subspace, fixing the
/// Condon–Shortley sign (the leading `m1 = j1` component is positive) and
/// lowering with `J₋`.
pub fn coupled_basis(tj1: u32, tj2: u32, tj3: u32) -> Vec<CVec> {
    let (z1, p1) = spin_ops(tj1);
    let (z2, p2) = spin_ops(tj2);
    let i1 = CMat::identity(z1.nrows(), z1.nrows());
    let i2 = CMat::identity(z2.nrows(), z2.nrows());
    let jz = z1.kronecker(&i2) + i1.kronecker(&z2);
    let jp = p1.kronecker(&i2) + i1.kronecker(&p2);
    let jm = jp.adjoint();
    let j_sq = &jm * &jp + &jz * &jz + &jz;
    let j3 = tj3 as f64 / 2.0;
    let idx: Vec<usize> = (0..jz.nrows()).filter(|&i| (jz[(i, i)].re - j3).abs() < 1e-12).collect();
    let sub = CMat::from_fn(idx.len(), idx.len(), |r, c| j_sq[(idx[r], idx[c])]);
    let (values, vectors) = eigh(&sub);
    let target = j3 * (j3 + 1.0);
    let k = (0..idx.len())
        .find(|&k| (values[k] - target).abs() < 1e-9)
        .expect("j3 satisfies the triangle rule");
    let mut top = CVec::zeros(jz.nrows());
    for (r, &i) in idx.iter().enumerate() {
        top[i] = vectors[(r, k)];
    }
    // Remove the eigensolver's arbitrary phase, then fix the sign.
    let d2 = tj2 as usize + 1;
    let lead = (0..d2).map(|b| top[b]).find(|x| x.norm() > 1e-12).expect("m1 = j1 component");
    top *= lead.conj() / lead.norm();
    let mut states = vec![top];
    for _ in 0..tj3 {
        let next = &jm * states.last().unwrap();
        let n = next.norm();
        states.push(next.unscale(n));
    }
    states
}

/// Element-wise comparison of the library's CG coefficients with
/// [`coupled_basis`] for one triple; returns the largest deviation.
pub fn cg_oracle_deviation(tj1: u32, tj2: u32, tj3: u32) -> f64 {
    use covent::{cg_coefficient, IrrepLabel, WeightLabel};
    let states = coupled_basis(tj1, tj2, tj3);
    let d2 = tj2 as usize + 1;
    let mut worst: f64 = 0.0;
    for (k3, state) in states.iter().enumerate() {
        let tm3 = tj3 as i32 - 2 * k3 as i32;
        for k1 in 0..=tj1 as usize {
            for k2 in 0..d2 {
                let tm1 = tj1 as i32 - 2 * k1 as i32;
                let tm2 = tj2 as i32 - 2 * k2 as i32;
                let ours = cg_coefficient(
                    IrrepLabel::Spin(tj1),
                    WeightLabel(tm1),
                    IrrepLabel::Spin(tj2),
                    WeightLabel(tm2),
                    IrrepLabel::Spin(tj3),
                    WeightLabel(tm3),
                )
                .expect("valid labels");
                let oracle = state[k1 * d2 + k2];
                worst = worst.max((oracle - real(ours)).norm());
            }
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spin_half_pair() {
        // Singlet (|↑↓⟩ − |↓↑⟩)/√2 and the triplet top |↑↑⟩.
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let singlet = &coupled_basis(1, 1, 0)[0];
        assert!((singlet[1] - real(s)).norm() < 1e-12);
        assert!((singlet[2] + real(s)).norm() < 1e-12);
        let triplet = coupled_basis(1, 1, 2);
        assert!((triplet[0][0] - real(1.0)).norm() < 1e-12);
        assert!(cg_oracle_deviation(1, 1, 0) < 1e-12);
    }
}
