//! Monotonicity, conservation, closed forms and entropic inequalities.

use covent::embed::{embed_cg, finite_set};
use covent::linalg::{real, CVec};
use covent::monotones::{
    conservation_check, monotonicity_report, pure_state_negativity, ree_lower_estimate, relative_entropy,
};
use covent::random::{random_density_matrix, rng};
use covent::{
    asymmetry_monotone, asymmetry_sup, g_asymmetry, random_covariant_channel, random_covariant_unitary, twirl,
    DensityMatrix, EntanglementMonotone, GroupElement, IrrepLabel, SpaceSpec, WeightRegister,
};
use proptest::prelude::*;
use rand::Rng;

fn spaces() -> Vec<SpaceSpec> {
    [&[1u32, 2, 0][..], &[1, 1, 2], &[2, 3, 1]]
        .iter()
        .map(|s| SpaceSpec::su2(s).unwrap())
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn asymmetry_monotones_never_increase(which in 0usize..3, tj in 0u32..=3, seed in any::<u64>(), rank in 1usize..=3) {
        let space = &spaces()[which];
        let ch = match random_covariant_channel(space, IrrepLabel::Spin(tj), 2, seed) {
            Ok(ch) => ch,
            Err(_) => return Ok(()),
        };
        let rho = DensityMatrix::random(space.clone(), rank, seed.wrapping_mul(3));
        let rep = monotonicity_report(&rho, &ch).unwrap();
        prop_assert!(rep.passed(), "{:?}", rep);
    }

    #[test]
    fn covariant_unitaries_conserve(which in 0usize..3, seed in any::<u64>()) {
        let space = &spaces()[which];
        let u = random_covariant_unitary(space, seed).unwrap();
        let rho = DensityMatrix::random(space.clone(), 2, seed ^ 5);
        let rep = conservation_check(&rho, &u).unwrap();
        prop_assert!(rep.passed(), "{:?}", rep);
    }

    #[test]
    fn relative_entropy_is_isometry_invariant(seed in any::<u64>()) {
        let space = SpaceSpec::su2(&[1, 2]).unwrap();
        let rho = DensityMatrix::random(space.clone(), 5, seed);
        let sigma = DensityMatrix::random(space.clone(), 5, seed ^ 99);
        let direct = relative_entropy(rho.matrix(), sigma.matrix()).unwrap().finite().unwrap();
        let reg = WeightRegister::for_space(&space, 0);
        for s in finite_set(space.group()) {
            let a = embed_cg(&s, &rho, &reg).unwrap();
            let b = embed_cg(&s, &sigma, &reg).unwrap();
            let img = relative_entropy(&a.matrix, &b.matrix).unwrap().finite().unwrap();
            prop_assert!((img - direct).abs() < 1e-10, "{img} vs {direct}");
        }
    }
}

/// Standard-form pure states with one spin per weight: the image is in
/// Schmidt form with coefficients `√p`, so `‖ρ^Γ‖₁ = (Σ √p)²`.
#[test]
fn pure_state_closed_form() {
    let space = SpaceSpec::su2(&[1, 2, 3, 4]).unwrap();
    let mut r = rng(3);
    let e = EntanglementMonotone::Negativity;
    for _ in 0..200 {
        // pick, for each weight, at most one basis vector carrying it
        let mut psi = CVec::zeros(space.dim());
        let mut ps = Vec::new();
        for w in space.weights() {
            let carriers: Vec<usize> = (0..space.dim()).filter(|&i| space.basis()[i].1 == w).collect();
            if r.random::<f64>() < 0.6 {
                let i = carriers[r.random_range(0..carriers.len())];
                let p: f64 = r.random();
                psi[i] = real(p.sqrt());
                ps.push(p);
            }
        }
        if ps.is_empty() {
            continue;
        }
        let total: f64 = ps.iter().sum();
        let ps: Vec<f64> = ps.iter().map(|p| p / total).collect();
        let rho = DensityMatrix::from_pure(space.clone(), &psi).unwrap();
        let n = asymmetry_monotone(e, &GroupElement::identity(space.group()), &rho).unwrap();
        assert!((n - pure_state_negativity(&ps)).abs() < 1e-10, "{n} vs {} for {ps:?}", pure_state_negativity(&ps));
        let ln = asymmetry_monotone(EntanglementMonotone::LogNegativity, &GroupElement::identity(space.group()), &rho)
            .unwrap();
        let s: f64 = ps.iter().map(|p| p.sqrt()).sum();
        assert!((ln - 2.0 * s.log2()).abs() < 1e-10);
    }
}

#[test]
fn g_asymmetry_chain() {
    let space = SpaceSpec::su2(&[1, 2, 1]).unwrap();
    let reg = WeightRegister::for_space(&space, 0);
    for seed in 0..60 {
        let rho = DensityMatrix::random(space.clone(), 1 + (seed as usize % 4), seed);
        let ag = g_asymmetry(&rho).unwrap();
        assert!(ag >= -1e-12);
        let inv = twirl(&rho);
        assert!(g_asymmetry(&inv).unwrap().abs() < 1e-10);
        for s in finite_set(space.group()) {
            let img = embed_cg(&s, &rho, &reg).unwrap();
            let lower = ree_lower_estimate(&img).unwrap();
            assert!(lower <= ag + 1e-9, "lower {lower} > A_G {ag}");
            // C_s(G(ρ)) is separable, so it witnesses E_R ≤ A_G with equality here.
            let witness = embed_cg(&s, &inv, &reg).unwrap();
            let w = relative_entropy(&img.matrix, &witness.matrix).unwrap().finite().unwrap();
            assert!((w - ag).abs() < 1e-9);
        }
    }
}

#[test]
fn invariant_sampling_approaches_g_asymmetry_from_above() {
    let space = SpaceSpec::su2(&[1, 2]).unwrap();
    let rho = DensityMatrix::random(space.clone(), 3, 8);
    let ag = g_asymmetry(&rho).unwrap();
    let mut best = f64::INFINITY;
    let mut r = rng(1);
    for _ in 0..200 {
        let m = random_density_matrix(&mut r, space.dim(), space.dim());
        let sigma = twirl(&DensityMatrix::new(space.clone(), m).unwrap());
        let v = relative_entropy(rho.matrix(), sigma.matrix()).unwrap().finite().unwrap();
        assert!(v >= ag - 1e-10);
        best = best.min(v);
    }
    let at_twirl = relative_entropy(rho.matrix(), twirl(&rho).matrix()).unwrap().finite().unwrap();
    assert!((at_twirl - ag).abs() < 1e-10);
    assert!(best >= at_twirl - 1e-10);
}

#[test]
fn sup_is_faithful() {
    let space = SpaceSpec::su2(&[2, 1]).unwrap();
    for seed in 0..40u64 {
        let base = DensityMatrix::random(space.clone(), 2, seed);
        let rho = if seed % 2 == 0 { twirl(&base) } else { base };
        let sup = asymmetry_sup(EntanglementMonotone::Negativity, &rho).unwrap();
        assert_eq!(sup > 1e-10, covent::channels::twirl_distance(&rho) > 1e-10, "seed {seed}");
    }
}

/// Arbitrary pure states: the image negativity is fixed by the total
/// population `q_m` of each weight. The sweep includes partial transposes
/// on which a dense Hermitian solver fails to converge.
#[test]
fn pure_state_weight_marginal_form() {
    let space = SpaceSpec::su2(&[1, 2, 3, 4]).unwrap();
    let basis = space.basis();
    for seed in 0..300u64 {
        let mut r = rng(seed);
        let mut psi = CVec::zeros(space.dim());
        for i in 0..space.dim() {
            if r.random_bool(0.7) {
                psi[i] = covent::random::complex_gaussian(&mut r);
            }
        }
        let norm = psi.norm();
        if norm < 1e-3 {
            continue;
        }
        let psi = psi.unscale(norm);
        let q: Vec<f64> = space
            .weights()
            .into_iter()
            .map(|w| (0..space.dim()).filter(|&a| basis[a].1 == w).map(|a| psi[a].norm_sqr()).sum())
            .collect();
        let rho = DensityMatrix::from_pure(space.clone(), &psi).unwrap();
        let n = asymmetry_monotone(EntanglementMonotone::Negativity, &GroupElement::identity(space.group()), &rho)
            .unwrap();
        assert!((n - pure_state_negativity(&q)).abs() < 1e-10, "seed {seed}: {n} vs {}", pure_state_negativity(&q));
    }
}
