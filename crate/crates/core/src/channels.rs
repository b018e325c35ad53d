//! Density matrices, Wigner–Eckart synthesis of covariant channels, twirling.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    self, commutator, conjugate, hermitian_fn, hermitian_part, max_abs, op_norm, trace,
    CMat, CVec, C64,
};
use crate::random::{complex_gaussian, haar_unitary, random_density_matrix, rng};
use crate::repkit::{
    cartan_operator, couples, coupling, generators, representation_matrix, wigner_big_d,
    GroupElement, GroupKind, IrrepLabel, RawSector, SectorKey, SpaceSpec,
};

/// Hermiticity tolerance for constructed states.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Most negative eigenvalue still accepted as a state.
pub const POSITIVITY_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct DensityMatrix {
    space: SpaceSpec,
    matrix: CMat,
}

impl DensityMatrix {
    /// Validates hermiticity, positivity and unit trace.
    pub fn new(space: SpaceSpec, matrix: CMat) -> Result<Self> {
        let n = space.dim();
        if matrix.shape() != (n, n) {
            return Err(Error::InvalidState(format!(
                "matrix is {:?}, space has dimension {n}",
                matrix.shape()
            )));
        }
        let defect = linalg::hermiticity_defect(&matrix);
        if defect > HERMITIAN_TOL {
            return Err(Error::InvalidState(format!("not Hermitian (defect {defect:e})")));
        }
        let tr = trace(&matrix).re;
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} != 1")));
        }
        let min = linalg::min_eigenvalue(&matrix);
        if min < -POSITIVITY_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
        }
        Ok(Self {
            space,
            matrix: hermitian_part(&matrix),
        })
    }

    /// Skips validation; for outputs of maps that preserve states by construction.
    pub(crate) fn from_parts(space: SpaceSpec, matrix: CMat) -> Self {
        Self {
            matrix: hermitian_part(&matrix),
            space,
        }
    }

    pub fn from_pure(space: SpaceSpec, psi: &CVec) -> Result<Self> {
        let norm = psi.norm();
        if psi.len() != space.dim() || norm == 0.0 {
            return Err(Error::InvalidState("bad state vector".into()));
        }
        let v = psi.unscale(norm);
        Self::new(space, linalg::outer(&v))
    }

    /// `|index⟩⟨index|` in the flat basis.
    pub fn basis_state(space: SpaceSpec, index: usize) -> Result<Self> {
        if index >= space.dim() {
            return Err(Error::InvalidState(format!("basis index {index} out of range")));
        }
        let m = linalg::matrix_unit(space.dim(), index, index);
        Ok(Self::from_parts(space, m))
    }

    pub fn maximally_mixed(space: SpaceSpec) -> Self {
        let n = space.dim();
        Self::from_parts(space, linalg::identity(n).unscale(n as f64))
    }

    /// Random state of the given rank, deterministic in `seed`.
    pub fn random(space: SpaceSpec, rank: usize, seed: u64) -> Self {
        let m = random_density_matrix(&mut rng(seed), space.dim(), rank);
        Self::from_parts(space, m)
    }

    pub fn space(&self) -> &SpaceSpec {
        &self.space
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMat {
        self.matrix
    }
}

impl AsRef<CMat> for DensityMatrix {
    fn as_ref(&self) -> &CMat {
        &self.matrix
    }
}

/// Reduced matrix elements `⟨j',λ'‖K_{J,α}‖j,λ⟩` of one irreducible tensor family.
///
/// Absent entries are zero. Inserting an entry that violates the coupling rule
/// for the family's rank is rejected.
#[derive(Clone, Debug, PartialEq)]
pub struct ReducedElementTable {
    rank: IrrepLabel,
    alpha_count: usize,
    entries: BTreeMap<(usize, SectorKey, SectorKey), C64>,
}

impl ReducedElementTable {
    pub fn new(rank: IrrepLabel, alpha_count: usize) -> Result<Self> {
        if alpha_count == 0 {
            return Err(Error::Domain("alpha_count must be at least 1".into()));
        }
        Ok(Self {
            rank,
            alpha_count,
            entries: BTreeMap::new(),
        })
    }

    pub fn rank(&self) -> IrrepLabel {
        self.rank
    }

    pub fn alpha_count(&self) -> usize {
        self.alpha_count
    }

    pub fn insert(&mut self, alpha: usize, out: SectorKey, input: SectorKey, value: C64) -> Result<()> {
        if alpha >= self.alpha_count {
            return Err(Error::Domain(format!(
                "alpha {alpha} out of range (alpha_count {})",
                self.alpha_count
            )));
        }
        if !couples(input.irrep, self.rank, out.irrep) {
            return Err(Error::TriangleRule {
                out: out.to_string(),
                input: input.to_string(),
                rank: self.rank.to_string(),
            });
        }
        self.entries.insert((alpha, out, input), value);
        Ok(())
    }

    pub fn with(mut self, alpha: usize, out: SectorKey, input: SectorKey, value: C64) -> Result<Self> {
        self.insert(alpha, out, input, value)?;
        Ok(self)
    }

    pub fn get(&self, alpha: usize, out: SectorKey, input: SectorKey) -> C64 {
        self.entries
            .get(&(alpha, out, input))
            .copied()
            .unwrap_or_default()
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, SectorKey, SectorKey, C64)> + '_ {
        self.entries.iter().map(|(&(a, o, i), &v)| (a, o, i, v))
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    fn to_doc(&self) -> ReducedTableDoc {
        ReducedTableDoc {
            group: self.rank.group(),
            rank: self.rank.raw(),
            alpha_count: self.alpha_count,
            entries: self
                .entries()
                .map(|(alpha, out, input, value)| ReducedEntryDoc {
                    alpha,
                    out: RawSector(out.irrep.raw(), out.lambda),
                    input: RawSector(input.irrep.raw(), input.lambda),
                    value,
                })
                .collect(),
        }
    }

    fn from_doc(doc: ReducedTableDoc) -> Result<Self> {
        let label = |raw: RawSector| -> Result<SectorKey> {
            Ok(SectorKey::new(IrrepLabel::from_raw(doc.group, raw.0)?, raw.1))
        };
        let mut table = Self::new(IrrepLabel::from_raw(doc.group, doc.rank)?, doc.alpha_count)?;
        for e in doc.entries {
            table.insert(e.alpha, label(e.out)?, label(e.input)?, e.value)?;
        }
        Ok(table)
    }
}

#[derive(Serialize, Deserialize)]
struct ReducedTableDoc {
    group: GroupKind,
    /// `2J` for SU(2), the charge shift for U(1).
    rank: i64,
    alpha_count: usize,
    entries: Vec<ReducedEntryDoc>,
}

#[derive(Serialize, Deserialize)]
struct ReducedEntryDoc {
    alpha: usize,
    out: RawSector,
    #[serde(rename = "in")]
    input: RawSector,
    #[serde(with = "linalg::serde_c64")]
    value: C64,
}

impl Serialize for ReducedElementTable {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_doc().serialize(s)
    }
}

impl<'de> Deserialize<'de> for ReducedElementTable {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let doc = ReducedTableDoc::deserialize(d)?;
        Self::from_doc(doc).map_err(serde::de::Error::custom)
    }
}

/// One Kraus operator `K_{J,M,α}`; `twice_m` is `2M` (the charge shift for U(1)).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct KrausOp {
    pub twice_m: i32,
    pub alpha: usize,
    #[serde(with = "linalg::serde_rows")]
    pub matrix: CMat,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CovariantKrausFamily {
    pub space: SpaceSpec,
    pub reduced: ReducedElementTable,
    pub kraus: Vec<KrausOp>,
}

impl CovariantKrausFamily {
    pub fn rank(&self) -> IrrepLabel {
        self.reduced.rank()
    }

    /// `Σ K†K`.
    pub fn completeness_operator(&self) -> CMat {
        let n = self.space.dim();
        self.kraus
            .iter()
            .fold(CMat::zeros(n, n), |acc, k| acc + k.matrix.adjoint() * &k.matrix)
    }

    /// Max-entry distance of `Σ K†K` from the identity.
    pub fn completeness_defect(&self) -> f64 {
        let n = self.space.dim();
        max_abs(&(self.completeness_operator() - linalg::identity(n)))
    }

    pub fn max_abs_twice_m(&self) -> u32 {
        self.kraus.iter().map(|k| k.twice_m.unsigned_abs()).max().unwrap_or(0)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("family serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

fn check_table_in_space(space: &SpaceSpec, reduced: &ReducedElementTable) -> Result<()> {
    if reduced.rank().group() != space.group() {
        return Err(Error::Domain(format!(
            "rank {} does not belong to {}",
            reduced.rank(),
            space.group()
        )));
    }
    for (_, out, input, _) in reduced.entries() {
        for key in [out, input] {
            if space.sector_index(key).is_none() {
                return Err(Error::SectorNotInSpace(key));
            }
        }
    }
    Ok(())
}

/// Builds `K_{J,M,α}` from reduced elements:
/// `⟨j',λ';m'|K_{J,M,α}|j,λ;m⟩ = ⟨j m; J M|j' m'⟩ ⟨j',λ'‖K_{J,α}‖j,λ⟩`.
///
/// The family is returned raw; see [`normalize_family`].
pub fn expand_kraus(space: &SpaceSpec, reduced: &ReducedElementTable) -> Result<CovariantKrausFamily> {
    check_table_in_space(space, reduced)?;
    let rank = reduced.rank();
    let n = space.dim();
    let mut kraus = Vec::new();
    for alpha in 0..reduced.alpha_count() {
        for big_m in rank.weights() {
            let mut k = CMat::zeros(n, n);
            for (a, out, input, value) in reduced.entries() {
                if a != alpha {
                    continue;
                }
                for m in input.irrep.weights() {
                    let mp = crate::repkit::WeightLabel(m.0 + big_m.0);
                    if !out.irrep.contains(mp) {
                        continue;
                    }
                    let cg = coupling(input.irrep, m, rank, big_m, out.irrep, mp);
                    if cg == 0.0 {
                        continue;
                    }
                    let r = space.index_of(out, mp).expect("checked sector");
                    let c = space.index_of(input, m).expect("checked sector");
                    k[(r, c)] += value * cg;
                }
            }
            kraus.push(KrausOp {
                twice_m: big_m.0,
                alpha,
                matrix: k,
            });
        }
    }
    Ok(CovariantKrausFamily {
        space: space.clone(),
        reduced: reduced.clone(),
        kraus,
    })
}

/// Largest commutator of `op` with the Lie-algebra generators of the space.
pub fn invariance_defect(space: &SpaceSpec, op: &CMat) -> f64 {
    match space.group() {
        GroupKind::Su2 => {
            let g = generators(space).expect("SU2 space");
            max_abs(&commutator(op, &g.jz)).max(max_abs(&commutator(op, &g.jplus)))
        }
        GroupKind::U1 => max_abs(&commutator(op, &cartan_operator(space))),
    }
}

/// Re-expresses `K P` for an invariant `P = ⊕_j 1 ⊗ Q_j` as new reduced elements.
fn reduced_after_right_multiply(
    space: &SpaceSpec,
    reduced: &ReducedElementTable,
    p: &CMat,
) -> Result<ReducedElementTable> {
    let mut out_table = ReducedElementTable::new(reduced.rank(), reduced.alpha_count())?;
    let mut acc: BTreeMap<(usize, SectorKey, SectorKey), C64> = BTreeMap::new();
    for (alpha, out, input, value) in reduced.entries() {
        let top = input.irrep.weights()[0];
        for &s in &space.sectors_of(input.irrep) {
            let target = space.sectors()[s];
            let q = p[(
                space.index_of(input, top).unwrap(),
                space.index_of(target, top).unwrap(),
            )];
            *acc.entry((alpha, out, target)).or_default() += value * q;
        }
    }
    for ((alpha, out, input), v) in acc {
        if v != C64::default() {
            out_table.insert(alpha, out, input, v)?;
        }
    }
    Ok(out_table)
}

fn singular_sectors(space: &SpaceSpec, p: &CMat, tol: f64) -> Vec<SectorKey> {
    let (vals, vecs) = linalg::eigh(p);
    let mut hit = vec![false; space.sectors().len()];
    for (k, &v) in vals.iter().enumerate() {
        if v > tol {
            continue;
        }
        for (i, (s, _)) in space.basis().into_iter().enumerate() {
            if vecs[(i, k)].norm_sqr() > 1e-6 {
                hit[s] = true;
            }
        }
    }
    space
        .sectors()
        .iter()
        .zip(hit)
        .filter_map(|(&key, h)| h.then_some(key))
        .collect()
}

const SINGULAR_TOL: f64 = 1e-12;

/// Returns `{K P^{-1/2}}` with `P = Σ K†K`, which is complete and still covariant.
pub fn normalize_family(family: &CovariantKrausFamily) -> Result<CovariantKrausFamily> {
    let p = hermitian_part(&family.completeness_operator());
    let scale = max_abs(&p).max(1.0);
    let defect = invariance_defect(&family.space, &p);
    if defect > 1e-9 * scale {
        return Err(Error::Numerical(format!(
            "completeness operator is not invariant (commutator {defect:e})"
        )));
    }
    let tol = SINGULAR_TOL * scale;
    let bad = singular_sectors(&family.space, &p, tol);
    if !bad.is_empty() {
        return Err(Error::SingularCompleteness { sectors: bad });
    }
    let p_inv_sqrt = hermitian_fn(&p, |x| 1.0 / x.sqrt());
    rescale_family(family, &p_inv_sqrt)
}

fn rescale_family(family: &CovariantKrausFamily, right: &CMat) -> Result<CovariantKrausFamily> {
    // Re-expanding (rather than multiplying the matrices) keeps the selection
    // rule zeros exact.
    let reduced = reduced_after_right_multiply(&family.space, &family.reduced, right)?;
    expand_kraus(&family.space, &reduced)
}

/// Normalizes on the support of `P` and returns the invariant projector onto
/// its kernel (zero if `P` is full rank).
fn normalize_on_support(family: &CovariantKrausFamily) -> Result<(CovariantKrausFamily, CMat)> {
    let p = hermitian_part(&family.completeness_operator());
    let scale = max_abs(&p).max(1.0);
    let tol = 1e-10 * scale;
    let pinv_sqrt = hermitian_fn(&p, |x| if x > tol { 1.0 / x.sqrt() } else { 0.0 });
    let kernel = hermitian_fn(&p, |x| if x > tol { 0.0 } else { 1.0 });
    Ok((rescale_family(family, &pinv_sqrt)?, kernel))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ChannelComponent {
    pub weight: f64,
    pub family: CovariantKrausFamily,
}

/// Weighted sum of irreducible covariant families.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CovariantChannel {
    pub components: Vec<ChannelComponent>,
}

impl CovariantChannel {
    pub fn from_family(family: CovariantKrausFamily) -> Self {
        Self {
            components: vec![ChannelComponent {
                weight: 1.0,
                family,
            }],
        }
    }

    pub fn space(&self) -> &SpaceSpec {
        &self.components[0].family.space
    }

    /// All Kraus operators with `sqrt(weight)` folded in, as `(2M, α, K)`.
    pub fn pooled_kraus(&self) -> Vec<KrausOp> {
        self.components
            .iter()
            .flat_map(|c| {
                let s = c.weight.sqrt();
                c.family.kraus.iter().map(move |k| KrausOp {
                    twice_m: k.twice_m,
                    alpha: k.alpha,
                    matrix: k.matrix.scale(s),
                })
            })
            .collect()
    }

    pub fn completeness_defect(&self) -> f64 {
        let n = self.space().dim();
        let sum = self
            .pooled_kraus()
            .iter()
            .fold(CMat::zeros(n, n), |acc, k| acc + k.matrix.adjoint() * &k.matrix);
        max_abs(&(sum - linalg::identity(n)))
    }

    pub fn max_abs_twice_m(&self) -> u32 {
        self.components
            .iter()
            .map(|c| c.family.max_abs_twice_m())
            .max()
            .unwrap_or(0)
    }

    /// Ranks of the irreducible components, e.g. `"j=1/2"`.
    pub fn rank_description(&self) -> String {
        let mut ranks: Vec<String> = Vec::new();
        for c in &self.components {
            let r = c.family.rank().to_string();
            if !ranks.contains(&r) {
                ranks.push(r);
            }
        }
        ranks.join("+")
    }

    /// The single Kraus operator, if this channel is one unitary.
    pub fn as_unitary(&self) -> Option<&CMat> {
        match self.components.as_slice() {
            [c] if c.family.kraus.len() == 1 && (c.weight - 1.0).abs() < 1e-12 => {
                let u = &c.family.kraus[0].matrix;
                linalg::is_unitary(u, 1e-10).then_some(u)
            }
            _ => None,
        }
    }

    pub fn apply_matrix(&self, rho: &CMat) -> CMat {
        let n = rho.nrows();
        self.pooled_kraus()
            .iter()
            .fold(CMat::zeros(n, n), |acc, k| acc + conjugate(&k.matrix, rho))
    }
}

/// `Σ_c w_c Σ_{M,α} K ρ K†`.
pub fn apply_channel(channel: &CovariantChannel, rho: &DensityMatrix) -> Result<DensityMatrix> {
    if channel.space() != rho.space() {
        return Err(Error::SpaceMismatch);
    }
    let out = channel.apply_matrix(rho.matrix());
    let tr = trace(&out).re;
    if (tr - 1.0).abs() > TRACE_TOL {
        return Err(Error::InvalidState(format!(
            "channel output has trace {tr}; the channel is not trace preserving"
        )));
    }
    Ok(DensityMatrix::from_parts(rho.space().clone(), out))
}

/// Group average of a state, computed as an exact block projection: within
/// each irrep type the irrep factor becomes maximally mixed and the
/// multiplicity factor keeps its partial trace.
pub fn twirl_matrix(space: &SpaceSpec, rho: &CMat) -> CMat {
    let n = space.dim();
    let mut out = CMat::zeros(n, n);
    for irrep in space.irreps() {
        let sectors = space.sectors_of(irrep);
        let d = irrep.dim() as f64;
        for &a in &sectors {
            for &b in &sectors {
                let (oa, ob) = (space.sector_offset(a), space.sector_offset(b));
                let tr: C64 = (0..irrep.dim()).map(|k| rho[(oa + k, ob + k)]).sum();
                for k in 0..irrep.dim() {
                    out[(oa + k, ob + k)] = tr / d;
                }
            }
        }
    }
    out
}

pub fn twirl(rho: &DensityMatrix) -> DensityMatrix {
    DensityMatrix::from_parts(rho.space().clone(), twirl_matrix(rho.space(), rho.matrix()))
}

/// Operator-norm distance from the twirled state.
pub fn twirl_distance(rho: &DensityMatrix) -> f64 {
    op_norm(&(rho.matrix() - twirl_matrix(rho.space(), rho.matrix())))
}

/// Max over matrix units `|a⟩⟨b|` of `‖E(U X U†) − U E(X) U†‖`.
pub fn covariance_residual(channel: &CovariantChannel, g: &GroupElement) -> Result<f64> {
    let space = channel.space();
    let u = representation_matrix(space, g)?;
    let kraus = channel.pooled_kraus();
    // E(U|a><b|U†) = Σ (K U e_a)(K U e_b)†, U E(|a><b|) U† = Σ (U K e_a)(U K e_b)†
    let left: Vec<CMat> = kraus.iter().map(|k| &k.matrix * &u).collect();
    let right: Vec<CMat> = kraus.iter().map(|k| &u * &k.matrix).collect();
    let n = space.dim();
    let r = kraus.len();
    let mut worst: f64 = 0.0;
    for a in 0..n {
        for b in 0..n {
            // diff = Σ l_a l_b† − Σ r_a r_b† = X Y†
            let mut x = CMat::zeros(n, 2 * r);
            let mut y = CMat::zeros(n, 2 * r);
            for (k, (l, rt)) in left.iter().zip(&right).enumerate() {
                x.set_column(k, &l.column(a));
                y.set_column(k, &l.column(b));
                x.set_column(r + k, &rt.column(a));
                y.set_column(r + k, &(-rt.column(b)));
            }
            worst = worst.max(linalg::low_rank_op_norm(&x, &y));
        }
    }
    Ok(worst)
}

/// Max over `M, α` of `‖U K_{J,M,α} U† − Σ_{M'} D^J_{M'M}(g) K_{J,M',α}‖`.
pub fn tensor_operator_residual(family: &CovariantKrausFamily, g: &GroupElement) -> Result<f64> {
    let u = representation_matrix(&family.space, g)?;
    let rank = family.rank();
    let d = wigner_big_d(rank, g)?;
    let weights = rank.weights();
    let mut worst: f64 = 0.0;
    for k in &family.kraus {
        let col = rank
            .weight_position(crate::repkit::WeightLabel(k.twice_m))
            .expect("family weight");
        let lhs = conjugate(&u, &k.matrix);
        let mut rhs = CMat::zeros(lhs.nrows(), lhs.ncols());
        for other in family.kraus.iter().filter(|o| o.alpha == k.alpha) {
            let row = weights.iter().position(|w| w.0 == other.twice_m).unwrap();
            rhs += other.matrix.map(|z| z * d[(row, col)]);
        }
        worst = worst.max(max_abs(&(lhs - rhs)));
    }
    Ok(worst)
}

/// Seeded random covariant channel of the given rank.
///
/// Reduced elements are complex Gaussian for every sector pair allowed by the
/// coupling rule. Sectors that no allowed pair leaves are completed with the
/// identity (a rank-zero component), so the result is always trace preserving.
pub fn random_covariant_channel(
    space: &SpaceSpec,
    rank: IrrepLabel,
    alpha_count: usize,
    seed: u64,
) -> Result<CovariantChannel> {
    if rank.group() != space.group() {
        return Err(Error::Domain(format!("rank {rank} does not act on {}", space.group())));
    }
    let mut r = rng(seed);
    let mut table = ReducedElementTable::new(rank, alpha_count)?;
    for alpha in 0..alpha_count {
        for &input in space.sectors() {
            for &out in space.sectors() {
                if couples(input.irrep, rank, out.irrep) {
                    table.insert(alpha, out, input, complex_gaussian(&mut r))?;
                }
            }
        }
    }
    if table.is_empty() {
        return Err(Error::UnsatisfiableRank(rank.to_string()));
    }
    let raw = expand_kraus(space, &table)?;
    let (family, kernel) = normalize_on_support(&raw)?;
    let mut channel = CovariantChannel::from_family(family);
    if max_abs(&kernel) > 0.5 {
        channel.components.push(ChannelComponent {
            weight: 1.0,
            family: identity_family_on(space, &kernel)?,
        });
    }
    Ok(channel)
}

/// Rank-zero family whose single Kraus operator is an invariant projector.
fn identity_family_on(space: &SpaceSpec, projector: &CMat) -> Result<CovariantKrausFamily> {
    let trivial = IrrepLabel::trivial(space.group());
    let mut table = ReducedElementTable::new(trivial, 1)?;
    for irrep in space.irreps() {
        let sectors = space.sectors_of(irrep);
        let top = irrep.weights()[0];
        for &a in &sectors {
            for &b in &sectors {
                let (ka, kb) = (space.sectors()[a], space.sectors()[b]);
                let v = projector[(space.index_of(ka, top).unwrap(), space.index_of(kb, top).unwrap())];
                if v.norm() > 1e-12 {
                    table.insert(0, ka, kb, v)?;
                }
            }
        }
    }
    expand_kraus(space, &table)
}

/// Seeded covariant unitary: identity on each irrep factor tensored with a
/// Haar-random unitary on the multiplicity factor.
pub fn random_covariant_unitary(space: &SpaceSpec, seed: u64) -> Result<CovariantChannel> {
    let mut r = rng(seed);
    let mut table = ReducedElementTable::new(IrrepLabel::trivial(space.group()), 1)?;
    for irrep in space.irreps() {
        let sectors = space.sectors_of(irrep);
        let w = haar_unitary(&mut r, sectors.len());
        for (i, &a) in sectors.iter().enumerate() {
            for (k, &b) in sectors.iter().enumerate() {
                table.insert(0, space.sectors()[a], space.sectors()[b], w[(i, k)])?;
            }
        }
    }
    Ok(CovariantChannel::from_family(expand_kraus(space, &table)?))
}

/// The identity channel as a rank-zero family.
pub fn identity_channel(space: &SpaceSpec) -> Result<CovariantChannel> {
    Ok(CovariantChannel::from_family(identity_family_on(
        space,
        &linalg::identity(space.dim()),
    )?))
}
