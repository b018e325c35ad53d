//! The U(1) case: charge sectors, charge-shifting Kraus families, the
//! equivalence of the `C` and `L` isometries, and separability of pinched states.

use serde::{Deserialize, Serialize};

use crate::channels::{
    expand_kraus, twirl_distance, CovariantChannel, CovariantKrausFamily, DensityMatrix,
    ReducedElementTable,
};
use crate::embed::{
    block_product_decomposition, embed_c, embed_cg, isometry_c, isometry_l, l_side_kraus,
    locc_simulated_kraus, pinch_sigma_bar, SeparableDecomposition, WeightRegister, CHANNEL_TOL,
};
use crate::error::{Error, Result};
use crate::linalg::{conjugate, max_abs, max_abs_diff, C64};
use crate::monotones::{is_ppt, negativity};
use crate::repkit::{representation_matrix, GroupElement, GroupKind, IrrepLabel, SectorKey, SpaceSpec};

/// A one-dimensional U(1) irrep copy: weight equals charge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ChargeSector {
    pub charge_n: i32,
    pub lambda: u32,
}

impl ChargeSector {
    pub fn new(charge_n: i32, lambda: u32) -> Self {
        Self { charge_n, lambda }
    }
}

impl From<ChargeSector> for SectorKey {
    fn from(c: ChargeSector) -> Self {
        SectorKey::new(IrrepLabel::Charge(c.charge_n), c.lambda)
    }
}

fn require_u1(space: &SpaceSpec) -> Result<()> {
    if space.group() == GroupKind::U1 {
        Ok(())
    } else {
        Err(Error::UnsupportedGroup { expected: "U1" })
    }
}

/// One coefficient `c^{(N,α)}_{n,λ,λ'}` of `|n+N,λ'⟩⟨n,λ|`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AbelianEntry {
    pub alpha: usize,
    pub input: ChargeSector,
    pub out_lambda: u32,
    #[serde(with = "crate::linalg::serde_c64")]
    pub value: C64,
}

/// A charge-shift family and whether entries were dropped at the space edge.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AbelianFamily {
    pub family: CovariantKrausFamily,
    /// Set when some coefficient pointed outside the space and was dropped;
    /// such families are trace-decreasing.
    pub truncating: bool,
}

/// `K_{N,α} = Σ c^{(N,α)}_{n,λ,λ'} |n+N,λ'⟩⟨n,λ|`.
///
/// A coefficient whose target sector `(n+N, λ')` is absent is an error unless
/// `allow_truncation` is set, in which case it is dropped and the family is
/// flagged.
pub fn abelian_kraus(
    space: &SpaceSpec,
    shift: i32,
    alpha_count: usize,
    entries: &[AbelianEntry],
    allow_truncation: bool,
) -> Result<AbelianFamily> {
    require_u1(space)?;
    let mut table = ReducedElementTable::new(IrrepLabel::Charge(shift), alpha_count)?;
    let mut truncating = false;
    for e in entries {
        let input: SectorKey = e.input.into();
        if space.sector_index(input).is_none() {
            return Err(Error::SectorNotInSpace(input));
        }
        let target = e.input.charge_n + shift;
        let out = SectorKey::new(IrrepLabel::Charge(target), e.out_lambda);
        if space.sector_index(out).is_none() {
            if allow_truncation {
                truncating = true;
                continue;
            }
            return Err(Error::Truncation { target });
        }
        table.insert(e.alpha, out, input, e.value)?;
    }
    Ok(AbelianFamily {
        family: expand_kraus(space, &table)?,
        truncating,
    })
}

/// `max ‖U(θ) K U(θ)† − e^{iNθ} K‖` over the family.
pub fn phase_covariance_residual(family: &CovariantKrausFamily, theta: f64) -> Result<f64> {
    require_u1(&family.space)?;
    let u = representation_matrix(&family.space, &GroupElement::phase(theta))?;
    Ok(family
        .kraus
        .iter()
        .map(|k| {
            let phase = C64::from_polar(1.0, k.twice_m as f64 * theta);
            max_abs_diff(&conjugate(&u, &k.matrix), &k.matrix.map(|z| z * phase))
        })
        .fold(0.0, f64::max))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EquivalenceReport {
    /// `max_θ ‖C_θ(ρ) − C(ρ)‖`.
    pub cg_vs_c: f64,
    /// `max ‖R (K ⊗ T_N) R† − Π_W (Ṽ_N ⊗ K̃) Π_W‖` with `R = V_L V_C†`.
    pub kraus_relabeling: f64,
}

impl EquivalenceReport {
    pub fn holds(&self, tol: f64) -> bool {
        self.cg_vs_c <= tol && self.kraus_relabeling <= tol
    }
}

/// `R (K ⊗ T_N) R†` against the `L`-side form, element-wise.
pub fn relabeling_residual(family: &CovariantKrausFamily) -> Result<f64> {
    let space = &family.space;
    require_u1(space)?;
    let register = WeightRegister::for_space(space, family.max_abs_twice_m());
    let v_c = isometry_c(space, &register)?.matrix;
    let v_l = isometry_l(space).matrix;
    let r = &v_l * v_c.adjoint();
    let pi_w = &v_l * v_l.adjoint();
    let c_side = locc_simulated_kraus(family, &register)?;
    let l_side = l_side_kraus(family);
    Ok(c_side
        .iter()
        .zip(&l_side)
        .map(|(kc, kl)| {
            let lhs = &r * kc * r.adjoint();
            let rhs = &pi_w * &kl.composite * &pi_w;
            max_abs_diff(&lhs, &rhs)
        })
        .fold(0.0, f64::max))
}

/// `C_θ ≡ C` on `ρ` for each θ, and the Kraus relabeling identity for `family`.
pub fn abelian_isometry_equivalence(
    rho: &DensityMatrix,
    family: &CovariantKrausFamily,
    thetas: &[f64],
) -> Result<EquivalenceReport> {
    require_u1(rho.space())?;
    let register = WeightRegister::for_space(rho.space(), 0);
    let base = embed_c(rho, &register)?.matrix;
    let mut cg_vs_c: f64 = 0.0;
    for &theta in thetas {
        let img = embed_cg(&GroupElement::phase(theta), rho, &register)?.matrix;
        cg_vs_c = cg_vs_c.max(max_abs_diff(&img, &base));
    }
    Ok(EquivalenceReport {
        cg_vs_c,
        kraus_relabeling: relabeling_residual(family)?,
    })
}

/// The invariant ⟺ separable-image test, and the separable certificate for `σ̄`.
#[derive(Clone, Debug)]
pub struct SeparabilityVerdict {
    /// Coherence between different charges (distance from the twirl).
    pub twirl_distance: f64,
    pub invariant: bool,
    pub image_negativity: f64,
    pub image_separable: bool,
    pub sigma_bar: SeparableDecomposition,
}

impl SeparabilityVerdict {
    /// Invariant ⟺ separable image, and `σ̄` certified separable.
    pub fn holds(&self) -> bool {
        self.invariant == self.image_separable && self.sigma_bar.certifies()
    }
}

pub fn abelian_separability_theorem(rho: &DensityMatrix, channel: &CovariantChannel) -> Result<SeparabilityVerdict> {
    let space = rho.space();
    require_u1(space)?;
    let twirl_distance = twirl_distance(rho);
    let image = embed_c(rho, &WeightRegister::for_space(space, 0))?;
    let sigma = pinch_sigma_bar(channel, rho)?;
    let sigma_bar = block_product_decomposition(space, &sigma.state)
        .ok_or_else(|| Error::Numerical("U(1) blocks must factorize".into()))?;
    Ok(SeparabilityVerdict {
        twirl_distance,
        invariant: twirl_distance < CHANNEL_TOL,
        image_negativity: negativity(&image)?,
        image_separable: is_ppt(&image, CHANNEL_TOL)?,
        sigma_bar,
    })
}

/// Checks that the twirl of a U(1) state is its charge pinching.
pub fn twirl_is_pinching(rho: &DensityMatrix) -> Result<f64> {
    require_u1(rho.space())?;
    let space = rho.space();
    let mut pinched = rho.matrix().clone();
    for (a, &(_, wa)) in space.basis().iter().enumerate() {
        for (b, &(_, wb)) in space.basis().iter().enumerate() {
            if wa != wb {
                pinched[(a, b)] = C64::default();
            }
        }
    }
    Ok(max_abs(&(pinched - crate::channels::twirl(rho).matrix())))
}
