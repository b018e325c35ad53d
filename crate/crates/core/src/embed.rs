//! The LOCC-simulating isometries `C`, `C_g`, `L`, their Kraus sets, weight and
//! irrep projectors, and the pinched states built on the `L` image.

use serde::{Deserialize, Serialize};

use crate::channels::{CovariantChannel, CovariantKrausFamily, DensityMatrix};
use crate::error::{Error, Result};
use crate::linalg::{self, conjugate, kron, max_abs, op_norm, trace, CMat};
use crate::repkit::{
    coupling, representation_matrix, GroupElement, GroupKind, IrrepLabel, SpaceSpec, WeightLabel,
};

/// Construction identities hold to this tolerance.
pub const CONSTRUCTION_TOL: f64 = 1e-12;
/// End-to-end channel identities hold to this tolerance.
pub const CHANNEL_TOL: f64 = 1e-10;

/// The ancilla `H_B` spanned by weight kets `|m⟩`, stored in `2m` units.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightRegister {
    pub twice_m_min: i32,
    pub twice_m_max: i32,
    pub step: i32,
}

impl WeightRegister {
    pub fn new(twice_m_min: i32, twice_m_max: i32, step: i32) -> Result<Self> {
        if !(step == 1 || step == 2) || twice_m_min > twice_m_max || (twice_m_max - twice_m_min) % step != 0 {
            return Err(Error::Domain(format!(
                "register [{twice_m_min}, {twice_m_max}] with step {step} is malformed"
            )));
        }
        Ok(Self {
            twice_m_min,
            twice_m_max,
            step,
        })
    }

    /// Smallest register holding every weight of `space` shifted by up to
    /// `padding` (in `2M` units, the charge for U(1)) in either direction.
    ///
    /// SU(2) registers step by whole units of `m` when all weights share a
    /// parity that the padding preserves; otherwise every `2m` is present.
    pub fn for_space(space: &SpaceSpec, padding: u32) -> Self {
        let weights = space.weights();
        let pad = padding as i32;
        let min = weights.first().unwrap().0 - pad;
        let max = weights.last().unwrap().0 + pad;
        let uniform = weights.iter().all(|w| (w.0 - weights[0].0) % 2 == 0);
        let step = if space.group() == GroupKind::Su2 && uniform && pad % 2 == 0 {
            2
        } else {
            1
        };
        Self {
            twice_m_min: min,
            twice_m_max: max,
            step,
        }
    }

    /// Register for simulating `channel` on `space`.
    pub fn for_channel(channel: &CovariantChannel) -> Self {
        Self::for_space(channel.space(), channel.max_abs_twice_m())
    }

    pub fn dim(&self) -> usize {
        ((self.twice_m_max - self.twice_m_min) / self.step + 1) as usize
    }

    pub fn index_of(&self, twice_m: i32) -> Option<usize> {
        let off = twice_m - self.twice_m_min;
        (twice_m >= self.twice_m_min && twice_m <= self.twice_m_max && off % self.step == 0)
            .then(|| (off / self.step) as usize)
    }

    pub fn contains(&self, twice_m: i32) -> bool {
        self.index_of(twice_m).is_some()
    }

    /// Register weights in ascending order.
    pub fn labels(&self) -> Vec<i32> {
        (0..self.dim() as i32).map(|k| self.twice_m_min + k * self.step).collect()
    }

    /// The translation `T_M = Σ_m |m+M⟩⟨m|`, restricted to the register.
    pub fn shift(&self, twice_big_m: i32) -> CMat {
        let n = self.dim();
        let mut t = CMat::zeros(n, n);
        for m in self.labels() {
            if let Some(r) = self.index_of(m + twice_big_m) {
                t[(r, self.index_of(m).unwrap())] = linalg::real(1.0);
            }
        }
        t
    }

    fn check_holds(&self, twice_m: i32) -> Result<()> {
        if self.contains(twice_m) {
            Ok(())
        } else {
            Err(Error::RegisterTooSmall {
                min: self.twice_m_min,
                max: self.twice_m_max,
                needed: twice_m,
            })
        }
    }
}

/// A state on a declared tensor-product cut `A ⊗ B`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BipartiteState {
    #[serde(with = "linalg::serde_rows")]
    pub matrix: CMat,
    pub cut: (usize, usize),
    pub labels: (Vec<String>, Vec<String>),
}

impl BipartiteState {
    pub fn new(matrix: CMat, cut: (usize, usize), labels: (Vec<String>, Vec<String>)) -> Result<Self> {
        let n = cut.0 * cut.1;
        if matrix.shape() != (n, n) || labels.0.len() != cut.0 || labels.1.len() != cut.1 {
            return Err(Error::InvalidState(format!(
                "matrix {:?} does not match cut {cut:?}",
                matrix.shape()
            )));
        }
        if linalg::hermiticity_defect(&matrix) > crate::channels::HERMITIAN_TOL {
            return Err(Error::InvalidState("bipartite matrix is not Hermitian".into()));
        }
        Ok(Self {
            matrix: linalg::hermitian_part(&matrix),
            cut,
            labels,
        })
    }

    /// Unlabelled state, mainly for tests and oracles.
    pub fn from_matrix(matrix: CMat, cut: (usize, usize)) -> Result<Self> {
        let names = |n: usize| (0..n).map(|i| i.to_string()).collect();
        Self::new(matrix, cut, (names(cut.0), names(cut.1)))
    }

    pub fn trace(&self) -> f64 {
        trace(&self.matrix).re
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum IsometryKind {
    C,
    Cg(GroupElement),
    L,
}

/// Column isometry from the source space into `A ⊗ B`.
#[derive(Clone, Debug)]
pub struct IsometrySpec {
    pub kind: IsometryKind,
    pub source: SpaceSpec,
    pub matrix: CMat,
    pub cut: (usize, usize),
    pub labels: (Vec<String>, Vec<String>),
}

impl IsometrySpec {
    pub fn apply(&self, rho: &DensityMatrix) -> Result<BipartiteState> {
        if rho.space() != &self.source {
            return Err(Error::SpaceMismatch);
        }
        self.apply_matrix(rho.matrix())
    }

    pub fn apply_matrix(&self, rho: &CMat) -> Result<BipartiteState> {
        BipartiteState::new(conjugate(&self.matrix, rho), self.cut, self.labels.clone())
    }

    /// `‖V†V − I‖` entrywise.
    pub fn isometry_defect(&self) -> f64 {
        let n = self.source.dim();
        max_abs(&(self.matrix.adjoint() * &self.matrix - linalg::identity(n)))
    }

    /// Projector onto the image subspace.
    pub fn image_projector(&self) -> CMat {
        &self.matrix * self.matrix.adjoint()
    }
}

fn half_label(twice: i32) -> String {
    if twice % 2 == 0 {
        format!("{}", twice / 2)
    } else {
        format!("{twice}/2")
    }
}

fn weight_label(group: GroupKind, twice_m: i32) -> String {
    match group {
        GroupKind::Su2 => format!("m={}", half_label(twice_m)),
        GroupKind::U1 => format!("n={twice_m}"),
    }
}

fn source_labels(space: &SpaceSpec) -> Vec<String> {
    (0..space.dim())
        .map(|i| {
            let (key, w) = space.basis_label(i).unwrap();
            format!("{};{}", key, weight_label(space.group(), w.0))
        })
        .collect()
}

fn register_labels(space: &SpaceSpec, register: &WeightRegister) -> Vec<String> {
    register
        .labels()
        .into_iter()
        .map(|m| weight_label(space.group(), m))
        .collect()
}

/// `C: |j,λ;m⟩ ↦ |j,λ;m⟩ ⊗ |m⟩`.
pub fn isometry_c(space: &SpaceSpec, register: &WeightRegister) -> Result<IsometrySpec> {
    let d_b = register.dim();
    let n = space.dim();
    let mut v = CMat::zeros(n * d_b, n);
    for (i, (_, w)) in space.basis().into_iter().enumerate() {
        register.check_holds(w.0)?;
        v[(i * d_b + register.index_of(w.0).unwrap(), i)] = linalg::real(1.0);
    }
    Ok(IsometrySpec {
        kind: IsometryKind::C,
        source: space.clone(),
        matrix: v,
        cut: (n, d_b),
        labels: (source_labels(space), register_labels(space, register)),
    })
}

/// `C_g = (U(g) ⊗ 1) C U(g)†`. Multiplicity labels are left unchanged.
pub fn isometry_cg(space: &SpaceSpec, register: &WeightRegister, g: &GroupElement) -> Result<IsometrySpec> {
    let c = isometry_c(space, register)?;
    let u = representation_matrix(space, g)?;
    let big_u = kron(&u, &linalg::identity(register.dim()));
    Ok(IsometrySpec {
        kind: IsometryKind::Cg(*g),
        matrix: big_u * c.matrix * u.adjoint(),
        ..c
    })
}

/// Factor layout of the `L` image: `M = ⊕_j M_j` (irrep factors) and
/// `N = ⊕_j N_j` (multiplicity factors), irreps in first-appearance order.
#[derive(Clone, Debug)]
pub struct LLayout {
    pub irreps: Vec<IrrepLabel>,
    pub m_offset: Vec<usize>,
    pub n_offset: Vec<usize>,
    pub m_dim: usize,
    pub n_dim: usize,
    /// For each source sector: (irrep position, position within `N_j`).
    sector_slot: Vec<(usize, usize)>,
}

impl LLayout {
    pub fn new(space: &SpaceSpec) -> Self {
        let irreps = space.irreps();
        let (mut m_offset, mut n_offset) = (Vec::new(), Vec::new());
        let (mut m_dim, mut n_dim) = (0, 0);
        let mut sector_slot = vec![(0, 0); space.sectors().len()];
        for (k, &irrep) in irreps.iter().enumerate() {
            m_offset.push(m_dim);
            n_offset.push(n_dim);
            let sectors = space.sectors_of(irrep);
            for (pos, &s) in sectors.iter().enumerate() {
                sector_slot[s] = (k, pos);
            }
            m_dim += irrep.dim();
            n_dim += sectors.len();
        }
        Self {
            irreps,
            m_offset,
            n_offset,
            m_dim,
            n_dim,
            sector_slot,
        }
    }

    pub fn irrep_position(&self, irrep: IrrepLabel) -> Option<usize> {
        self.irreps.iter().position(|&j| j == irrep)
    }

    /// Index of `|j,m⟩` in `M`.
    pub fn m_index(&self, irrep: IrrepLabel, w: WeightLabel) -> Option<usize> {
        Some(self.m_offset[self.irrep_position(irrep)?] + irrep.weight_position(w)?)
    }

    /// Index of `|j,λ⟩` in `N` for source sector `s`.
    pub fn n_index(&self, sector: usize) -> usize {
        let (k, pos) = self.sector_slot[sector];
        self.n_offset[k] + pos
    }

    /// `Π_{M_j} ⊗ Π_{N_j}` for the irrep at position `k`.
    pub fn block_projector(&self, space: &SpaceSpec, k: usize) -> CMat {
        let irrep = self.irreps[k];
        let mut pm = CMat::zeros(self.m_dim, self.m_dim);
        for i in 0..irrep.dim() {
            pm[(self.m_offset[k] + i, self.m_offset[k] + i)] = linalg::real(1.0);
        }
        let mut pn = CMat::zeros(self.n_dim, self.n_dim);
        for i in 0..space.sectors_of(irrep).len() {
            pn[(self.n_offset[k] + i, self.n_offset[k] + i)] = linalg::real(1.0);
        }
        kron(&pm, &pn)
    }
}

/// `L: |j,λ;m⟩ ↦ |j,m⟩_M ⊗ |j,λ⟩_N`, on the full `M ⊗ N` product.
pub fn isometry_l(space: &SpaceSpec) -> IsometrySpec {
    let layout = LLayout::new(space);
    let n = space.dim();
    let mut v = CMat::zeros(layout.m_dim * layout.n_dim, n);
    for (i, (s, w)) in space.basis().into_iter().enumerate() {
        let key = space.sectors()[s];
        let row = layout.m_index(key.irrep, w).unwrap() * layout.n_dim + layout.n_index(s);
        v[(row, i)] = linalg::real(1.0);
    }
    let mut m_labels = Vec::new();
    for &j in &layout.irreps {
        for w in j.weights() {
            m_labels.push(format!("{};{}", j, weight_label(space.group(), w.0)));
        }
    }
    let mut n_labels = vec![String::new(); layout.n_dim];
    for (s, key) in space.sectors().iter().enumerate() {
        n_labels[layout.n_index(s)] = key.to_string();
    }
    IsometrySpec {
        kind: IsometryKind::L,
        source: space.clone(),
        matrix: v,
        cut: (layout.m_dim, layout.n_dim),
        labels: (m_labels, n_labels),
    }
}

pub fn embed_c(rho: &DensityMatrix, register: &WeightRegister) -> Result<BipartiteState> {
    isometry_c(rho.space(), register)?.apply(rho)
}

pub fn embed_cg(g: &GroupElement, rho: &DensityMatrix, register: &WeightRegister) -> Result<BipartiteState> {
    isometry_cg(rho.space(), register, g)?.apply(rho)
}

pub fn embed_l(rho: &DensityMatrix) -> Result<BipartiteState> {
    isometry_l(rho.space()).apply(rho)
}

/// Weight projectors on the source, irrep-block projectors on the `L` image,
/// and the projector onto the `L` image itself.
#[derive(Clone, Debug)]
pub struct ProjectorSet {
    pub pi_m: Vec<(WeightLabel, CMat)>,
    pub pi_j: Vec<(IrrepLabel, CMat)>,
    pub pi_w: CMat,
}

pub fn projectors(space: &SpaceSpec) -> ProjectorSet {
    let basis = space.basis();
    let n = space.dim();
    let pi_m = space
        .weights()
        .into_iter()
        .map(|w| {
            let mut p = CMat::zeros(n, n);
            for (i, &(_, wi)) in basis.iter().enumerate() {
                if wi == w {
                    p[(i, i)] = linalg::real(1.0);
                }
            }
            (w, p)
        })
        .collect();
    let layout = LLayout::new(space);
    let pi_j: Vec<(IrrepLabel, CMat)> = (0..layout.irreps.len())
        .map(|k| (layout.irreps[k], layout.block_projector(space, k)))
        .collect();
    let pi_w = isometry_l(space).image_projector();
    ProjectorSet { pi_m, pi_j, pi_w }
}

/// `{K_{J,M,α} ⊗ T_M}` on source ⊗ register; every shifted source weight must
/// stay inside the register.
pub fn locc_simulated_kraus(family: &CovariantKrausFamily, register: &WeightRegister) -> Result<Vec<CMat>> {
    locc_kraus_from(&family.space, family.kraus.iter().map(|k| (k.twice_m, k.matrix.clone())), register)
}

/// The LOCC Kraus set of a whole channel, optionally for the `C_g` image:
/// `{U K U† ⊗ T_M}`.
pub fn locc_channel_kraus(
    channel: &CovariantChannel,
    register: &WeightRegister,
    g: Option<&GroupElement>,
) -> Result<Vec<CMat>> {
    let space = channel.space();
    let u = g.map(|g| representation_matrix(space, g)).transpose()?;
    let ops = channel.pooled_kraus().into_iter().map(|k| {
        let m = match &u {
            Some(u) => conjugate(u, &k.matrix),
            None => k.matrix,
        };
        (k.twice_m, m)
    });
    locc_kraus_from(space, ops, register)
}

fn locc_kraus_from(
    space: &SpaceSpec,
    ops: impl Iterator<Item = (i32, CMat)>,
    register: &WeightRegister,
) -> Result<Vec<CMat>> {
    let weights = space.weights();
    let mut out = Vec::new();
    for (twice_m, k) in ops {
        for w in &weights {
            register.check_holds(w.0)?;
            register.check_holds(w.0 + twice_m)?;
        }
        out.push(kron(&k, &register.shift(twice_m)));
    }
    Ok(out)
}

/// Channel-level distance between `V E(·) V†` and `Σ K̃ V(·)V† K̃†` over all
/// source matrix units, for `V = C` or `C_g`.
pub fn locc_simulation_residual(
    channel: &CovariantChannel,
    register: &WeightRegister,
    g: Option<&GroupElement>,
) -> Result<f64> {
    let space = channel.space();
    let iso = match g {
        Some(g) => isometry_cg(space, register, g)?,
        None => isometry_c(space, register)?,
    };
    let kraus = locc_channel_kraus(channel, register, g)?;
    let v = &iso.matrix;
    let n = space.dim();
    // Both sides are sums of rank-one terms: V K e_a (V K e_b)† and
    // K̃ V e_a (K̃ V e_b)†.
    let direct: Vec<CMat> = channel.pooled_kraus().iter().map(|k| v * &k.matrix).collect();
    let simulated: Vec<CMat> = kraus.iter().map(|k| k * v).collect();
    let (p, q) = (direct.len(), simulated.len());
    let rows = v.nrows();
    let mut worst: f64 = 0.0;
    for a in 0..n {
        for b in 0..n {
            let mut x = CMat::zeros(rows, p + q);
            let mut y = CMat::zeros(rows, p + q);
            for (k, d) in direct.iter().enumerate() {
                x.set_column(k, &d.column(a));
                y.set_column(k, &d.column(b));
            }
            for (k, s) in simulated.iter().enumerate() {
                x.set_column(p + k, &s.column(a));
                y.set_column(p + k, &(-s.column(b)));
            }
            worst = worst.max(linalg::low_rank_op_norm(&x, &y));
        }
    }
    Ok(worst)
}

/// Result of the weight-coherence test.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoherenceVerdict {
    pub invariant_weights: bool,
    pub max_commutator_norm: f64,
}

/// `max_m ‖[ρ, Π_m]‖`; the `C` image is entangled iff this exceeds `1e-10`.
pub fn coherence_criterion(rho: &DensityMatrix) -> CoherenceVerdict {
    coherence_of(rho.space(), rho.matrix())
}

fn coherence_of(space: &SpaceSpec, rho: &CMat) -> CoherenceVerdict {
    let basis = space.basis();
    // [ρ, Π_m] has entries ±ρ_ab exactly where one of a, b carries weight m.
    let worst = space
        .weights()
        .into_iter()
        .map(|w| {
            let mut c = CMat::zeros(rho.nrows(), rho.ncols());
            for (a, &(_, wa)) in basis.iter().enumerate() {
                for (b, &(_, wb)) in basis.iter().enumerate() {
                    if (wa == w) != (wb == w) {
                        c[(a, b)] = if wb == w { rho[(a, b)] } else { -rho[(a, b)] };
                    }
                }
            }
            op_norm(&c)
        })
        .fold(0.0, f64::max);
    CoherenceVerdict {
        invariant_weights: worst <= CHANNEL_TOL,
        max_commutator_norm: worst,
    }
}

/// The finite set `S`: `{e, R_y(π/2)}` for SU(2), `{e}` for U(1).
pub fn finite_set(group: GroupKind) -> Vec<GroupElement> {
    match group {
        GroupKind::Su2 => vec![GroupElement::identity(group), GroupElement::ry_half_pi()],
        GroupKind::U1 => vec![GroupElement::identity(group)],
    }
}

/// Weight-coherence norms of `U(s)† ρ U(s)` for each `s ∈ S`.
pub fn finite_set_residuals(rho: &DensityMatrix) -> Vec<f64> {
    let space = rho.space();
    finite_set(space.group())
        .iter()
        .map(|g| {
            let u = representation_matrix(space, g).expect("same group");
            let rotated = u.adjoint() * rho.matrix() * &u;
            coherence_of(space, &rotated).max_commutator_norm
        })
        .collect()
}

/// Invariance decided from the finite set alone.
pub fn invariance_via_finite_set(rho: &DensityMatrix) -> bool {
    finite_set_residuals(rho).iter().all(|&r| r <= CHANNEL_TOL)
}

/// One `L`-side Kraus operator `Ṽ_{J,M} ⊗ K̃_{J,α}`.
#[derive(Clone, Debug)]
pub struct LKraus {
    pub twice_m: i32,
    pub alpha: usize,
    /// CG part on `M`.
    pub v_tilde: CMat,
    /// Reduced-element part on `N`.
    pub k_tilde: CMat,
    pub composite: CMat,
}

/// Splits a covariant family into CG factors on `M` and reduced factors on `N`.
pub fn l_side_kraus(family: &CovariantKrausFamily) -> Vec<LKraus> {
    let space = &family.space;
    let layout = LLayout::new(space);
    let rank = family.rank();
    let mut out = Vec::new();
    for alpha in 0..family.reduced.alpha_count() {
        let mut k_tilde = CMat::zeros(layout.n_dim, layout.n_dim);
        for (a, o, i, value) in family.reduced.entries() {
            if a == alpha {
                let r = layout.n_index(space.sector_index(o).unwrap());
                let c = layout.n_index(space.sector_index(i).unwrap());
                k_tilde[(r, c)] = value;
            }
        }
        for big_m in rank.weights() {
            let mut v = CMat::zeros(layout.m_dim, layout.m_dim);
            for &j1 in &layout.irreps {
                for &j2 in &layout.irreps {
                    for m1 in j1.weights() {
                        let m2 = WeightLabel(m1.0 + big_m.0);
                        if !j2.contains(m2) {
                            continue;
                        }
                        let cg = coupling(j1, m1, rank, big_m, j2, m2);
                        if cg != 0.0 {
                            v[(layout.m_index(j2, m2).unwrap(), layout.m_index(j1, m1).unwrap())] =
                                linalg::real(cg);
                        }
                    }
                }
            }
            out.push(LKraus {
                twice_m: big_m.0,
                alpha,
                composite: kron(&v, &k_tilde),
                v_tilde: v,
                k_tilde: k_tilde.clone(),
            });
        }
    }
    out
}

/// `(weight, Π_W K̃)` for every Kraus branch of a channel.
fn l_branches(channel: &CovariantChannel) -> Vec<CMat> {
    let pi_w = isometry_l(channel.space()).image_projector();
    channel
        .components
        .iter()
        .flat_map(|c| {
            let s = c.weight.sqrt();
            let pi_w = pi_w.clone();
            l_side_kraus(&c.family)
                .into_iter()
                .map(move |k| (&pi_w * k.composite).scale(s))
        })
        .collect()
}

/// `Σ Π_W K̃ L(ρ) K̃† Π_W` as a raw matrix on `M ⊗ N`.
pub fn l_simulated_output(channel: &CovariantChannel, rho: &DensityMatrix) -> Result<CMat> {
    if channel.space() != rho.space() {
        return Err(Error::SpaceMismatch);
    }
    let l_rho = embed_l(rho)?.matrix;
    let n = l_rho.nrows();
    Ok(l_branches(channel)
        .iter()
        .fold(CMat::zeros(n, n), |acc, k| acc + conjugate(k, &l_rho)))
}

/// Distance between `L(E(ρ))` and its `L`-side reconstruction.
pub fn l_reproduction_residual(channel: &CovariantChannel, rho: &DensityMatrix) -> Result<f64> {
    let direct = isometry_l(rho.space()).apply_matrix(&channel.apply_matrix(rho.matrix()))?;
    Ok(max_abs(&(direct.matrix - l_simulated_output(channel, rho)?)))
}

/// A pinched state together with its trace before renormalization.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PinchedState {
    pub raw_trace: f64,
    pub state: BipartiteState,
}

fn pinch(space: &SpaceSpec, x: &CMat, template: &IsometrySpec) -> Result<PinchedState> {
    let set = projectors(space);
    let n = x.nrows();
    let pinched = set
        .pi_j
        .iter()
        .fold(CMat::zeros(n, n), |acc, (_, p)| acc + conjugate(p, x));
    let raw_trace = trace(&pinched).re;
    if raw_trace <= 0.0 {
        return Err(Error::Numerical(format!("pinched state has trace {raw_trace:e}")));
    }
    Ok(PinchedState {
        raw_trace,
        state: BipartiteState::new(pinched.unscale(raw_trace), template.cut, template.labels.clone())?,
    })
}

/// `σ̄ = Σ_j Π_j [Σ Π_W K̃ L(ρ) K̃† Π_W] Π_j`.
pub fn pinch_sigma_bar(channel: &CovariantChannel, rho: &DensityMatrix) -> Result<PinchedState> {
    let out = l_simulated_output(channel, rho)?;
    pinch(rho.space(), &out, &isometry_l(rho.space()))
}

/// `ρ̄ = Σ_j Π_j L(ρ) Π_j`.
pub fn pinch_rho_bar(rho: &DensityMatrix) -> Result<PinchedState> {
    let iso = isometry_l(rho.space());
    let l_rho = iso.apply(rho)?.matrix;
    pinch(rho.space(), &l_rho, &iso)
}

/// `weight · A ⊗ B` with unit-trace positive factors.
#[derive(Clone, Debug)]
pub struct ProductTerm {
    pub irrep: IrrepLabel,
    pub weight: f64,
    pub a: CMat,
    pub b: CMat,
}

/// An explicit separable decomposition and how well it reconstructs the state.
#[derive(Clone, Debug)]
pub struct SeparableDecomposition {
    pub terms: Vec<ProductTerm>,
    /// Max-entry distance between `Σ weight·A⊗B` and the state.
    pub residual: f64,
    /// Most negative eigenvalue over all factors.
    pub min_factor_eigenvalue: f64,
}

impl SeparableDecomposition {
    pub fn certifies(&self) -> bool {
        self.residual < CONSTRUCTION_TOL && self.min_factor_eigenvalue >= -CONSTRUCTION_TOL
    }
}

/// Reads an irrep-block-diagonal state on the `L` cut as a sum of products,
/// which is possible whenever every block has a one-dimensional `M_j` or
/// `N_j` factor. Returns `None` otherwise.
pub fn block_product_decomposition(space: &SpaceSpec, state: &BipartiteState) -> Option<SeparableDecomposition> {
    let layout = LLayout::new(space);
    if state.cut != (layout.m_dim, layout.n_dim) {
        return None;
    }
    let mut terms = Vec::new();
    for (k, &irrep) in layout.irreps.iter().enumerate() {
        let (dm, dn) = (irrep.dim(), space.sectors_of(irrep).len());
        if dm > 1 && dn > 1 {
            return None;
        }
        let (mo, no) = (layout.m_offset[k], layout.n_offset[k]);
        let row = |i: usize, l: usize| (mo + i) * layout.n_dim + no + l;
        // The block is an operator on M_j ⊗ N_j; one factor is a scalar.
        let mut a = CMat::zeros(layout.m_dim, layout.m_dim);
        let mut b = CMat::zeros(layout.n_dim, layout.n_dim);
        if dm == 1 {
            a[(mo, mo)] = linalg::real(1.0);
            for l in 0..dn {
                for lp in 0..dn {
                    b[(no + l, no + lp)] = state.matrix[(row(0, l), row(0, lp))];
                }
            }
        } else {
            b[(no, no)] = linalg::real(1.0);
            for i in 0..dm {
                for ip in 0..dm {
                    a[(mo + i, mo + ip)] = state.matrix[(row(i, 0), row(ip, 0))];
                }
            }
        }
        let weight = trace(&a).re * trace(&b).re;
        if weight.abs() < 1e-14 {
            continue;
        }
        let (ta, tb) = (trace(&a).re, trace(&b).re);
        terms.push(ProductTerm {
            irrep,
            weight,
            a: a.unscale(ta),
            b: b.unscale(tb),
        });
    }
    let n = state.matrix.nrows();
    let rebuilt = terms
        .iter()
        .fold(CMat::zeros(n, n), |acc, t| acc + kron(&t.a, &t.b).scale(t.weight));
    let min_factor_eigenvalue = terms
        .iter()
        .flat_map(|t| [linalg::min_eigenvalue(&t.a), linalg::min_eigenvalue(&t.b)])
        .fold(0.0, f64::min);
    Some(SeparableDecomposition {
        residual: max_abs(&(rebuilt - &state.matrix)),
        terms,
        min_factor_eigenvalue,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{random_covariant_channel, random_covariant_unitary, twirl};
    use crate::linalg::{c64, max_abs_diff, real, CVec};
    use crate::repkit::{wigner_big_d, SectorKey};

    fn su2(tjs: &[u32]) -> SpaceSpec {
        SpaceSpec::su2(tjs).unwrap()
    }

    #[test]
    fn register_shapes() {
        let r = WeightRegister::for_space(&su2(&[2, 4]), 0);
        assert_eq!((r.twice_m_min, r.twice_m_max, r.step, r.dim()), (-4, 4, 2, 5));
        let r = WeightRegister::for_space(&su2(&[1, 2]), 0);
        assert_eq!((r.step, r.dim()), (1, 5));
        let r = WeightRegister::for_space(&su2(&[1]), 1);
        assert_eq!((r.twice_m_min, r.twice_m_max, r.step), (-2, 2, 1));
        assert!(WeightRegister::new(0, 3, 2).is_err());
    }

    #[test]
    fn shift_is_isometric_on_reachable_weights() {
        let space = su2(&[2]);
        let r = WeightRegister::for_space(&space, 2);
        let t = r.shift(2);
        for w in space.weights() {
            let e = r.index_of(w.0).unwrap();
            let col = t.column(e);
            assert_eq!(col.norm(), 1.0);
            assert_eq!(col[r.index_of(w.0 + 2).unwrap()], real(1.0));
        }
        assert_eq!(r.shift(0), linalg::identity(r.dim()));
    }

    #[test]
    fn c_maps_basis_to_product() {
        let space = su2(&[1, 2]);
        let reg = WeightRegister::for_space(&space, 0);
        let iso = isometry_c(&space, &reg).unwrap();
        assert!(iso.isometry_defect() < 1e-15);
        for c in 0..space.dim() {
            let nz: Vec<_> = iso.matrix.column(c).iter().filter(|z| z.norm() > 0.0).copied().collect();
            assert_eq!(nz, vec![real(1.0)]);
        }
    }

    #[test]
    fn register_too_small_rejected() {
        let space = su2(&[2]);
        let reg = WeightRegister::new(-2, 0, 2).unwrap();
        assert!(matches!(isometry_c(&space, &reg), Err(Error::RegisterTooSmall { .. })));
        let ch = random_covariant_channel(&space, IrrepLabel::Spin(2), 1, 0).unwrap();
        let tight = WeightRegister::for_space(&space, 0);
        assert!(matches!(
            locc_channel_kraus(&ch, &tight, None),
            Err(Error::RegisterTooSmall { .. })
        ));
    }

    #[test]
    fn cg_change_of_basis() {
        let space = su2(&[2, 1]);
        let reg = WeightRegister::for_space(&space, 0);
        let g = GroupElement::euler(0.3, 1.1, -0.7);
        let cg = isometry_cg(&space, &reg, &g).unwrap();
        let c = isometry_c(&space, &reg).unwrap();
        let u = representation_matrix(&space, &g).unwrap();
        let d_inv = wigner_big_d(IrrepLabel::Spin(2), &g.inverse()).unwrap();
        // column 0 is |1,0;m=1⟩
        let mut expect = CVec::zeros(cg.matrix.nrows());
        let big_u = kron(&u, &linalg::identity(reg.dim()));
        for mp in 0..3 {
            expect += (&big_u * c.matrix.column(mp)) * d_inv[(mp, 0)];
        }
        assert!((cg.matrix.column(0) - expect).norm() < 1e-12);
        assert!(cg.isometry_defect() < 1e-12);
    }

    #[test]
    fn l_maps_basis_to_product() {
        let space = su2(&[1, 2, 1]);
        let iso = isometry_l(&space);
        assert_eq!(iso.cut, (5, 3));
        assert!(iso.isometry_defect() < 1e-15);
        let layout = LLayout::new(&space);
        // |1/2, λ=1; -1/2⟩ -> |1/2,-1/2⟩_M ⊗ |1/2, λ=1⟩_N
        let idx = space
            .index_of(SectorKey::new(IrrepLabel::Spin(1), 1), WeightLabel(-1))
            .unwrap();
        let row = 1 * layout.n_dim + 1;
        assert_eq!(iso.matrix[(row, idx)], real(1.0));
    }

    #[test]
    fn projector_identities() {
        let space = su2(&[1, 2, 1, 0]);
        let set = projectors(&space);
        let sum_m = set.pi_m.iter().fold(CMat::zeros(space.dim(), space.dim()), |a, (_, p)| a + p);
        assert_eq!(sum_m, linalg::identity(space.dim()));
        let n = set.pi_w.nrows();
        let sum_j = set.pi_j.iter().fold(CMat::zeros(n, n), |a, (_, p)| a + p);
        assert!(max_abs_diff(&sum_j, &set.pi_w) < 1e-15);
        for (_, p) in &set.pi_j {
            assert!(max_abs_diff(&(p * p), p) < 1e-15);
        }
    }

    #[test]
    fn c_image_of_superposition_has_negativity_cc() {
        let space = su2(&[2]);
        let reg = WeightRegister::for_space(&space, 0);
        let (c1, c2) = (0.6, 0.8);
        let psi = CVec::from_vec(vec![real(c1), real(0.0), real(c2)]);
        let rho = DensityMatrix::from_pure(space, &psi).unwrap();
        let img = embed_c(&rho, &reg).unwrap();
        // Oracle: the image is c1|0⟩|0⟩ + c2|2⟩|2⟩ in Schmidt form.
        let pt = crate::monotones::partial_transpose(&img).unwrap();
        let neg: f64 = linalg::eigvalsh(&pt).iter().filter(|&&x| x < 0.0).map(|x| -x).sum();
        assert!((neg - c1 * c2).abs() < 1e-12);
    }

    #[test]
    fn locc_identity_random_channels() {
        let space = su2(&[1, 2, 1]);
        for seed in 0..4 {
            let ch = random_covariant_channel(&space, IrrepLabel::Spin(1 + (seed % 2) as u32), 2, seed).unwrap();
            let reg = WeightRegister::for_channel(&ch);
            for g in finite_set(GroupKind::Su2) {
                assert!(locc_simulation_residual(&ch, &reg, Some(&g)).unwrap() < 1e-10);
            }
        }
    }

    #[test]
    fn coherence_examples() {
        // |1/2;1/2⟩ and |1;1⟩ carry different weights: that coherence counts.
        let space = su2(&[1, 2]);
        let psi = CVec::from_fn(5, |i, _| if i == 0 || i == 2 { real(1.0) } else { real(0.0) });
        let rho = DensityMatrix::from_pure(space, &psi).unwrap();
        assert!(!coherence_criterion(&rho).invariant_weights);
        // Two copies of j=1/2 at equal weight: coherence between them does not.
        let space = su2(&[1, 1]);
        let mut d = CMat::zeros(4, 4);
        d[(0, 0)] = real(0.5);
        d[(2, 2)] = real(0.5);
        d[(0, 2)] = c64(0.0, 0.5);
        d[(2, 0)] = c64(0.0, -0.5);
        let same = DensityMatrix::new(space, d).unwrap();
        let v = coherence_criterion(&same);
        assert!(v.invariant_weights && v.max_commutator_norm == 0.0);
    }

    #[test]
    fn finite_set_examples() {
        let space = su2(&[2, 1, 1]);
        let basis = DensityMatrix::basis_state(space.clone(), 0).unwrap();
        assert!(coherence_criterion(&basis).invariant_weights);
        assert!(!invariance_via_finite_set(&basis));
        let rho = DensityMatrix::random(space, 3, 4);
        assert!(invariance_via_finite_set(&twirl(&rho)));
        assert!(!invariance_via_finite_set(&rho));
    }

    #[test]
    fn l_reproduction() {
        let space = su2(&[1, 2, 0, 1]);
        for seed in 0..4 {
            let ch = random_covariant_channel(&space, IrrepLabel::Spin(1), 2, seed).unwrap();
            let rho = DensityMatrix::random(space.clone(), 2, 50 + seed);
            assert!(l_reproduction_residual(&ch, &rho).unwrap() < 1e-10);
        }
    }

    #[test]
    fn rank_zero_l_kraus_is_local_and_inside_w() {
        let space = su2(&[1, 2, 1]);
        let u = random_covariant_unitary(&space, 9).unwrap();
        let ks = l_side_kraus(&u.components[0].family);
        assert_eq!(ks.len(), 1);
        let layout = LLayout::new(&space);
        assert_eq!(ks[0].v_tilde, linalg::identity(layout.m_dim));
        let pi_w = isometry_l(&space).image_projector();
        let restricted = &ks[0].composite * &pi_w;
        assert!(max_abs_diff(&(&pi_w * &restricted), &restricted) < 1e-15);
    }

    #[test]
    fn rho_bar_single_j_is_l_image() {
        let space = su2(&[2, 2]);
        let rho = DensityMatrix::random(space, 6, 1);
        let bar = pinch_rho_bar(&rho).unwrap();
        assert!((bar.raw_trace - 1.0).abs() < 1e-12);
        assert!(max_abs_diff(&bar.state.matrix, &embed_l(&rho).unwrap().matrix) < 1e-15);
    }

    #[test]
    fn sigma_bar_trace() {
        let space = su2(&[1, 2, 0]);
        let ch = random_covariant_channel(&space, IrrepLabel::Spin(1), 1, 2).unwrap();
        let rho = DensityMatrix::random(space, 3, 2);
        let s = pinch_sigma_bar(&ch, &rho).unwrap();
        assert!((s.raw_trace - 1.0).abs() < 1e-10);
    }
}
