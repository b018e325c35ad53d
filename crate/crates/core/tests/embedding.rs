//! The embeddings: LOCC simulation, coherence and finite-set criteria, the
//! `L` counterexample and the pinched-state comparison.

use covent::channels::{expand_kraus, normalize_family, random_covariant_unitary, twirl_distance, CovariantChannel, ReducedElementTable};
use covent::embed::{
    block_product_decomposition, coherence_criterion, embed_l, finite_set, invariance_via_finite_set,
    l_reproduction_residual, locc_simulation_residual, pinch_rho_bar, pinch_sigma_bar,
};
use covent::linalg::{real, CMat, CVec};
use covent::monotones::{is_ppt, negativity, partial_transpose};
use covent::random::rng;
use covent::{random_covariant_channel, DensityMatrix, GroupKind, IrrepLabel, SectorKey, SpaceSpec, WeightLabel, WeightRegister};
use proptest::prelude::*;
use rand::Rng;

fn spin(tj: u32) -> SectorKey {
    SectorKey::new(IrrepLabel::Spin(tj), 0)
}

/// Rank-1/2 channel on `{1/2, 1, 0}` with equal reduced elements between the
/// spin-1/2 sector and each integer sector, both ways.
fn half_channel() -> CovariantChannel {
    let space = SpaceSpec::su2(&[1, 2, 0]).unwrap();
    let mut t = ReducedElementTable::new(IrrepLabel::Spin(1), 1).unwrap();
    for (o, i) in [(2, 1), (0, 1), (1, 2), (1, 0)] {
        t.insert(0, spin(o), spin(i), real(1.0)).unwrap();
    }
    CovariantChannel::from_family(normalize_family(&expand_kraus(&space, &t).unwrap()).unwrap())
}

#[test]
fn l_counterexample() {
    let ch = half_channel();
    let space = ch.space().clone();
    let psi = DensityMatrix::basis_state(space.clone(), 0).unwrap(); // |1/2; 1/2⟩
    assert_eq!(negativity(&embed_l(&psi).unwrap()).unwrap(), 0.0);
    let out = covent::apply_channel(&ch, &psi).unwrap();
    let n = negativity(&embed_l(&out).unwrap()).unwrap();
    // Oracle: the output is ½|1,1⟩⟨1,1| + ½|χ⟩⟨χ| with |χ⟩ = (|1,0⟩+|0,0⟩)/√2.
    // Under L, |1,1⟩ ↦ |1,1⟩_M|1⟩_N is locally orthogonal to the support of
    // L|χ⟩ = (|1,0⟩_M|1⟩_N + |0,0⟩_M|0⟩_N)/√2, whose negativity is ½.
    let m_dim = 2 + 3 + 1;
    let n_dim = 3;
    let mut a = CVec::zeros(m_dim * n_dim);
    a[(2) * n_dim + 1] = real(1.0); // |1,1⟩_M = index 2 (after the two j=1/2 weights), N index of j=1 is 1
    let mut chi = CVec::zeros(m_dim * n_dim);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    chi[3 * n_dim + 1] = real(s);
    chi[5 * n_dim + 2] = real(s);
    let oracle = (&a * a.adjoint()).scale(0.5) + (&chi * chi.adjoint()).scale(0.5);
    assert!(covent::linalg::max_abs_diff(&oracle, &embed_l(&out).unwrap().matrix) < 1e-12);
    let pt = partial_transpose(&covent::BipartiteState::from_matrix(oracle, (m_dim, n_dim)).unwrap()).unwrap();
    let oracle_neg: f64 = covent::linalg::eigvalsh(&pt).iter().filter(|x| **x < 0.0).map(|x| -x).sum();
    assert!((oracle_neg - 0.25).abs() < 1e-12);
    assert!((n - 0.25).abs() < 1e-12, "negativity {n}");
}

#[test]
fn locc_identity_for_both_elements_of_s() {
    let space = SpaceSpec::su2(&[1, 2, 0, 3]).unwrap();
    for seed in 0..6 {
        let ch = random_covariant_channel(&space, IrrepLabel::Spin(seed as u32 % 4), 2, seed).unwrap();
        let reg = WeightRegister::for_channel(&ch);
        for s in finite_set(GroupKind::Su2) {
            let r = locc_simulation_residual(&ch, &reg, Some(&s)).unwrap();
            assert!(r < 1e-10, "seed {seed}: {r:e}");
        }
    }
}

/// Random state supported on the given basis vectors, optionally pinched by weight.
fn restricted_state(space: &SpaceSpec, support: &[usize], pinch: bool, seed: u64) -> DensityMatrix {
    let k = support.len();
    let small = covent::random::random_density_matrix(&mut rng(seed), k, k);
    let mut m = CMat::zeros(space.dim(), space.dim());
    let basis = space.basis();
    for (i, &a) in support.iter().enumerate() {
        for (j, &b) in support.iter().enumerate() {
            if !pinch || basis[a].1 == basis[b].1 {
                m[(a, b)] = small[(i, j)];
            }
        }
    }
    let tr = covent::linalg::trace(&m).re;
    DensityMatrix::new(space.clone(), m.unscale(tr)).unwrap()
}

#[test]
fn coherence_matches_ppt_on_small_cuts() {
    // {1/2, 1/2}: picking |1/2,0;1/2⟩, |1/2,1;1/2⟩, |1/2,0;-1/2⟩ gives a 3⊗2 cut.
    let space = SpaceSpec::su2(&[1, 1]).unwrap();
    let reg = WeightRegister::for_space(&space, 0);
    let mut r = rng(77);
    for trial in 0..200u64 {
        let support: &[usize] = if trial % 2 == 0 { &[0, 1] } else { &[0, 2, 1] };
        let pinch = r.random::<bool>();
        let rho = restricted_state(&space, support, pinch, trial);
        let coherent = !coherence_criterion(&rho).invariant_weights;
        let img = covent::embed_c(&rho, &reg).unwrap();
        let ppt = is_ppt(&img, 1e-12).unwrap();
        assert_eq!(coherent, !ppt, "trial {trial}");
    }
}

#[test]
fn finite_set_matches_twirl() {
    let space = SpaceSpec::su2(&[1, 2, 1]).unwrap();
    for seed in 0..150u64 {
        let base = DensityMatrix::random(space.clone(), 3, seed);
        let rho = match seed % 3 {
            0 => base,
            1 => covent::twirl(&base),
            _ => DensityMatrix::basis_state(space.clone(), (seed as usize) % space.dim()).unwrap(),
        };
        assert_eq!(invariance_via_finite_set(&rho), twirl_distance(&rho) < 1e-10, "seed {seed}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(30))]

    #[test]
    fn l_reproduction_identity(seed in any::<u64>(), tj in 0u32..=2) {
        let space = SpaceSpec::su2(&[1, 2, 0, 1, 2]).unwrap();
        let ch = random_covariant_channel(&space, IrrepLabel::Spin(tj), 2, seed).unwrap();
        let rho = DensityMatrix::random(space, 3, seed.wrapping_add(1));
        prop_assert!(l_reproduction_residual(&ch, &rho).unwrap() < 1e-10);
    }

    /// Pinching after the channel never creates negativity beyond the input's.
    #[test]
    fn pinched_output_bounded_by_input(seed in any::<u64>(), tj in 0u32..=2, which in 0usize..3) {
        let spaces = [&[1u32, 1, 2, 0][..], &[2, 2, 1, 0], &[1, 2, 0]];
        let space = SpaceSpec::su2(spaces[which]).unwrap();
        let ch = random_covariant_channel(&space, IrrepLabel::Spin(tj), 2, seed).unwrap();
        let rho = DensityMatrix::random(space, 2, seed ^ 0xabc);
        let before = negativity(&embed_l(&rho).unwrap()).unwrap();
        let sigma = pinch_sigma_bar(&ch, &rho).unwrap();
        prop_assert!((sigma.raw_trace - 1.0).abs() < 1e-10);
        let after = negativity(&sigma.state).unwrap();
        prop_assert!(before >= after - 1e-9, "{before} < {after}");
    }
}

/// The superposition `(|3/2;1/2⟩ + |1/2;1/2⟩)/√2` through the all-ones rank-1/2
/// channel: on a multiplicity-free space every pinched block is a product, so
/// both σ̄ and ρ̄ come out separable.
#[test]
fn phi_example_pinched_states() {
    let space = SpaceSpec::su2(&[3, 1, 4, 2, 0]).unwrap();
    let mut t = ReducedElementTable::new(IrrepLabel::Spin(1), 1).unwrap();
    for &i in space.sectors() {
        for &o in space.sectors() {
            if covent::repkit::couples(i.irrep, IrrepLabel::Spin(1), o.irrep) {
                t.insert(0, o, i, real(1.0)).unwrap();
            }
        }
    }
    let ch = CovariantChannel::from_family(normalize_family(&expand_kraus(&space, &t).unwrap()).unwrap());
    let mut psi = CVec::zeros(space.dim());
    psi[space.index_of(spin(3), WeightLabel(1)).unwrap()] = real(1.0);
    psi[space.index_of(spin(1), WeightLabel(1)).unwrap()] = real(1.0);
    let rho = DensityMatrix::from_pure(space.clone(), &psi).unwrap();
    assert!((negativity(&embed_l(&rho).unwrap()).unwrap() - 0.5).abs() < 1e-12);
    let rho_bar = pinch_rho_bar(&rho).unwrap();
    assert!(negativity(&rho_bar.state).unwrap() < 1e-12);
    let sigma = pinch_sigma_bar(&ch, &rho).unwrap();
    assert!(negativity(&sigma.state).unwrap() < 1e-12);
    assert!(block_product_decomposition(&space, &sigma.state).unwrap().certifies());
    assert!(block_product_decomposition(&space, &rho_bar.state).unwrap().certifies());
}

#[test]
fn covariant_unitary_conserves_l_negativity() {
    let space = SpaceSpec::su2(&[1, 1, 2]).unwrap();
    for seed in 0..10 {
        let u = random_covariant_unitary(&space, seed).unwrap();
        let rho = DensityMatrix::random(space.clone(), 2, 100 + seed);
        let out = covent::apply_channel(&u, &rho).unwrap();
        let (a, b) = (
            negativity(&embed_l(&rho).unwrap()).unwrap(),
            negativity(&embed_l(&out).unwrap()).unwrap(),
        );
        assert!((a - b).abs() < 1e-10);
    }
}
