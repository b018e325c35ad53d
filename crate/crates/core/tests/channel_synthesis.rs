//! Synthesized channels are covariant, complete and transform as tensor
//! operators; the twirl is an idempotent projection onto invariant states.

use covent::channels::{covariance_residual, tensor_operator_residual, twirl_matrix};
use covent::linalg::{max_abs, max_abs_diff, min_eigenvalue, trace};
use covent::random::rng;
use covent::{
    apply_channel, random_covariant_channel, representation_matrix, twirl, DensityMatrix, GroupElement,
    GroupKind, IrrepLabel, SpaceSpec,
};
use proptest::prelude::*;

fn spaces() -> Vec<SpaceSpec> {
    [&[1u32, 2, 0][..], &[1, 1, 2], &[2, 3, 1, 0], &[4, 2, 0], &[1, 3]]
        .iter()
        .map(|s| SpaceSpec::su2(s).unwrap())
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn random_channels_are_covariant_and_complete(
        which in 0usize..5, tj in 0u32..=4, alphas in 1usize..=2, seed in any::<u64>(), gseed in any::<u64>()
    ) {
        let space = &spaces()[which];
        let ch = match random_covariant_channel(space, IrrepLabel::Spin(tj), alphas, seed) {
            Ok(ch) => ch,
            Err(covent::Error::UnsatisfiableRank(_)) => return Ok(()),
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        };
        prop_assert!(ch.completeness_defect() < 1e-10);
        let g = GroupElement::random(GroupKind::Su2, &mut rng(gseed));
        prop_assert!(covariance_residual(&ch, &g).unwrap() < 1e-10);
        for c in &ch.components {
            prop_assert!(tensor_operator_residual(&c.family, &g).unwrap() < 1e-10);
        }
        let rho = DensityMatrix::random(space.clone(), 2, seed ^ 1);
        let out = apply_channel(&ch, &rho).unwrap();
        prop_assert!((trace(out.matrix()).re - 1.0).abs() < 1e-10);
        prop_assert!(min_eigenvalue(out.matrix()) > -1e-10);
    }

    #[test]
    fn twirl_is_invariant_projection(which in 0usize..5, seed in any::<u64>(), gseed in any::<u64>()) {
        let space = &spaces()[which];
        let rho = DensityMatrix::random(space.clone(), 3, seed);
        let t = twirl(&rho);
        prop_assert!(max_abs_diff(&twirl_matrix(space, t.matrix()), t.matrix()) < 1e-12);
        let g = GroupElement::random(GroupKind::Su2, &mut rng(gseed));
        let u = representation_matrix(space, &g).unwrap();
        prop_assert!(max_abs(&(&u * t.matrix() - t.matrix() * &u)) < 1e-10);
        prop_assert!((trace(t.matrix()).re - 1.0).abs() < 1e-12);
    }
}

/// Corrupting a single coefficient breaks covariance visibly.
#[test]
fn corrupted_channel_is_detected() {
    let space = SpaceSpec::su2(&[1, 2, 0]).unwrap();
    let mut ch = random_covariant_channel(&space, IrrepLabel::Spin(1), 1, 4).unwrap();
    let k = &mut ch.components[0].family.kraus[0].matrix;
    let (r, c) = (0..k.nrows())
        .flat_map(|r| (0..k.ncols()).map(move |c| (r, c)))
        .find(|&(r, c)| k[(r, c)].norm() > 1e-3)
        .unwrap();
    k[(r, c)] *= 2.0;
    let mut worst: f64 = 0.0;
    let mut g = rng(0);
    for _ in 0..10 {
        worst = worst.max(covariance_residual(&ch, &GroupElement::random(GroupKind::Su2, &mut g)).unwrap());
    }
    assert!(worst > 1e-3, "residual {worst}");
}
