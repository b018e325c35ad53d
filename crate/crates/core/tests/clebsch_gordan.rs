//! Clebsch–Gordan coefficients against an independent construction: the
//! coupled basis of `j1 ⊗ j2` obtained by diagonalizing `J²` on the product
//! space, with the Condon–Shortley phase fixed at the top weight and lower
//! weights reached with `J₋`.

use covent::linalg::{c64, CMat};
use covent::{cg_coefficient, IrrepLabel, WeightLabel};
use nalgebra::{DMatrix, DVector, SymmetricEigen};

/// `(J_z, J_+)` for spin `tj/2`, basis ordered by descending weight.
fn spin_ops(tj: u32) -> (DMatrix<f64>, DMatrix<f64>) {
    let d = tj as usize + 1;
    let j = tj as f64 / 2.0;
    let mut jz = DMatrix::zeros(d, d);
    let mut jp = DMatrix::zeros(d, d);
    for k in 0..d {
        let m = j - k as f64;
        jz[(k, k)] = m;
        if k > 0 {
            jp[(k - 1, k)] = (j * (j + 1.0) - m * (m + 1.0)).sqrt();
        }
    }
    (jz, jp)
}

/// Coupled states `|j3 m3⟩` expanded in the product basis `|m1⟩|m2⟩`.
fn coupled_basis(tj1: u32, tj2: u32, tj3: u32) -> Vec<DVector<f64>> {
    let (z1, p1) = spin_ops(tj1);
    let (z2, p2) = spin_ops(tj2);
    let (i1, i2) = (DMatrix::identity(z1.nrows(), z1.nrows()), DMatrix::identity(z2.nrows(), z2.nrows()));
    let jz = z1.kronecker(&i2) + i1.kronecker(&z2);
    let jp = p1.kronecker(&i2) + i1.kronecker(&p2);
    let jm = jp.transpose();
    let j2 = &jm * &jp + &jz * &jz + &jz;
    let j3 = tj3 as f64 / 2.0;
    // Restrict J² to the Jz = j3 subspace and pick the eigenvalue j3(j3+1).
    let idx: Vec<usize> = (0..jz.nrows()).filter(|&i| (jz[(i, i)] - j3).abs() < 1e-12).collect();
    let sub = DMatrix::from_fn(idx.len(), idx.len(), |r, c| j2[(idx[r], idx[c])]);
    let eig = SymmetricEigen::new(sub);
    let target = j3 * (j3 + 1.0);
    let k = (0..idx.len())
        .find(|&k| (eig.eigenvalues[k] - target).abs() < 1e-9)
        .expect("coupled irrep present");
    let mut top = DVector::zeros(jz.nrows());
    for (r, &i) in idx.iter().enumerate() {
        top[i] = eig.eigenvectors[(r, k)];
    }
    // Condon–Shortley: the component with m1 = j1 is positive.
    let d2 = tj2 as usize + 1;
    let lead = (0..d2).map(|b| top[b]).find(|x| x.abs() > 1e-12).unwrap();
    if lead < 0.0 {
        top = -top;
    }
    let mut states = vec![top];
    for _ in 0..tj3 {
        let next = &jm * states.last().unwrap();
        let n = next.norm();
        states.push(next / n);
    }
    states
}

#[test]
fn cg_matches_diagonalization_oracle() {
    for tj1 in 0..=4u32 {
        for tj2 in 0..=4u32 {
            let mut tj3 = tj1.abs_diff(tj2);
            while tj3 <= tj1 + tj2 {
                let states = coupled_basis(tj1, tj2, tj3);
                let d2 = tj2 as usize + 1;
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
                            .unwrap();
                            let oracle = state[k1 * d2 + k2];
                            assert!(
                                (ours - oracle).abs() < 1e-12,
                                "<{tj1}/2 {tm1}/2; {tj2}/2 {tm2}/2 | {tj3}/2 {tm3}/2>: {ours} vs {oracle}"
                            );
                        }
                    }
                }
                tj3 += 2;
            }
        }
    }
}

/// Orthogonality and completeness of the CG matrix for `j1, j2 ≤ 4`.
#[test]
fn cg_unitarity_up_to_spin_four() {
    let mut worst: f64 = 0.0;
    for tj1 in 0..=8u32 {
        for tj2 in 0..=8u32 {
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
                            .unwrap();
                            u[((k1 * (tj2 + 1) + k2) as usize, col)] = c64(v, 0.0);
                        }
                    }
                    col += 1;
                }
                tj3 += 2;
            }
            assert_eq!(col, d);
            let id = CMat::identity(d, d);
            worst = worst
                .max(covent::linalg::max_abs_diff(&(u.adjoint() * &u), &id))
                .max(covent::linalg::max_abs_diff(&(&u * u.adjoint()), &id));
        }
    }
    assert!(worst < 1e-12, "max residual {worst:e}");
}
