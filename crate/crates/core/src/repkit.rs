//! Representation theory of SU(2) and U(1).
//!
//! Angular momenta are stored doubled (`twice_j`, `twice_m`) so half-integer
//! spins index exactly. A [`SpaceSpec`] fixes the flat basis `|j,λ;m⟩`:
//! sectors in listed order, weights descending inside each sector.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c64, real, CMat, C64};
use crate::random::uniform_angle;

/// Largest supported `2j` for a single sector.
pub const MAX_TWICE_J: u32 = 16;
/// Largest supported total dimension of a [`SpaceSpec`].
pub const MAX_DIM: usize = 256;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GroupKind {
    #[serde(rename = "SU2")]
    Su2,
    #[serde(rename = "U1")]
    U1,
}

impl fmt::Display for GroupKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupKind::Su2 => f.write_str("SU2"),
            GroupKind::U1 => f.write_str("U1"),
        }
    }
}

/// Irrep label: `2j` for SU(2), the charge `n` for U(1).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IrrepLabel {
    Spin(u32),
    Charge(i32),
}

impl IrrepLabel {
    pub fn group(self) -> GroupKind {
        match self {
            IrrepLabel::Spin(_) => GroupKind::Su2,
            IrrepLabel::Charge(_) => GroupKind::U1,
        }
    }

    pub fn dim(self) -> usize {
        match self {
            IrrepLabel::Spin(tj) => tj as usize + 1,
            IrrepLabel::Charge(_) => 1,
        }
    }

    /// Weights in descending order.
    pub fn weights(self) -> Vec<WeightLabel> {
        match self {
            IrrepLabel::Spin(tj) => {
                let tj = tj as i32;
                (0..=tj).map(|k| WeightLabel(tj - 2 * k)).collect()
            }
            IrrepLabel::Charge(n) => vec![WeightLabel(n)],
        }
    }

    pub fn contains(self, w: WeightLabel) -> bool {
        match self {
            IrrepLabel::Spin(tj) => {
                let tj = tj as i32;
                w.0.abs() <= tj && (tj - w.0) % 2 == 0
            }
            IrrepLabel::Charge(n) => w.0 == n,
        }
    }

    /// Position of `w` in [`IrrepLabel::weights`].
    pub fn weight_position(self, w: WeightLabel) -> Option<usize> {
        if !self.contains(w) {
            return None;
        }
        match self {
            IrrepLabel::Spin(tj) => Some(((tj as i32 - w.0) / 2) as usize),
            IrrepLabel::Charge(_) => Some(0),
        }
    }

    /// The integer stored in serialized form (`2j` or the charge).
    pub fn raw(self) -> i64 {
        match self {
            IrrepLabel::Spin(tj) => tj as i64,
            IrrepLabel::Charge(n) => n as i64,
        }
    }

    pub fn from_raw(group: GroupKind, raw: i64) -> Result<Self> {
        match group {
            GroupKind::Su2 => u32::try_from(raw)
                .map(IrrepLabel::Spin)
                .map_err(|_| Error::Domain(format!("negative 2j = {raw}"))),
            GroupKind::U1 => i32::try_from(raw)
                .map(IrrepLabel::Charge)
                .map_err(|_| Error::Domain(format!("charge {raw} out of range"))),
        }
    }

    /// The trivial irrep of `group`.
    pub fn trivial(group: GroupKind) -> Self {
        match group {
            GroupKind::Su2 => IrrepLabel::Spin(0),
            GroupKind::U1 => IrrepLabel::Charge(0),
        }
    }
}

impl fmt::Display for IrrepLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            IrrepLabel::Spin(tj) if tj % 2 == 0 => write!(f, "j={}", tj / 2),
            IrrepLabel::Spin(tj) => write!(f, "j={tj}/2"),
            IrrepLabel::Charge(n) => write!(f, "n={n}"),
        }
    }
}

/// `2m` for SU(2); the charge for U(1).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct WeightLabel(pub i32);

impl WeightLabel {
    /// Physical eigenvalue of the Cartan generator (`m`, or the charge).
    pub fn value(self, group: GroupKind) -> f64 {
        match group {
            GroupKind::Su2 => self.0 as f64 / 2.0,
            GroupKind::U1 => self.0 as f64,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SectorKey {
    pub irrep: IrrepLabel,
    pub lambda: u32,
}

impl SectorKey {
    pub fn new(irrep: IrrepLabel, lambda: u32) -> Self {
        Self { irrep, lambda }
    }
}

impl fmt::Display for SectorKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, λ={})", self.irrep, self.lambda)
    }
}

/// Serialized form of a [`SectorKey`]: `[2j or charge, lambda]`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct RawSector(pub i64, pub u32);

/// Ordered direct sum of irrep sectors and its flat index map.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SpaceDoc", into = "SpaceDoc")]
pub struct SpaceSpec {
    group: GroupKind,
    sectors: Vec<SectorKey>,
    offsets: Vec<usize>,
    dim: usize,
}

/// Text-document schema of a [`SpaceSpec`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpaceDoc {
    pub group: GroupKind,
    pub sectors: Vec<RawSector>,
}

impl TryFrom<SpaceDoc> for SpaceSpec {
    type Error = Error;

    fn try_from(doc: SpaceDoc) -> Result<Self> {
        let sectors = doc
            .sectors
            .iter()
            .map(|s| Ok(SectorKey::new(IrrepLabel::from_raw(doc.group, s.0)?, s.1)))
            .collect::<Result<Vec<_>>>()?;
        SpaceSpec::new(doc.group, sectors)
    }
}

impl From<SpaceSpec> for SpaceDoc {
    fn from(space: SpaceSpec) -> Self {
        SpaceDoc {
            group: space.group,
            sectors: space
                .sectors
                .iter()
                .map(|s| RawSector(s.irrep.raw(), s.lambda))
                .collect(),
        }
    }
}

impl SpaceSpec {
    pub fn new(group: GroupKind, sectors: Vec<SectorKey>) -> Result<Self> {
        if sectors.is_empty() {
            return Err(Error::InvalidSpace("no sectors".into()));
        }
        for (i, s) in sectors.iter().enumerate() {
            if s.irrep.group() != group {
                return Err(Error::InvalidSpace(format!("{s} is not a {group} irrep")));
            }
            if let IrrepLabel::Spin(tj) = s.irrep {
                if tj > MAX_TWICE_J {
                    return Err(Error::InvalidSpace(format!(
                        "2j = {tj} exceeds the supported bound {MAX_TWICE_J}"
                    )));
                }
            }
            if sectors[..i].contains(s) {
                return Err(Error::InvalidSpace(format!("duplicate sector {s}")));
            }
        }
        let mut offsets = Vec::with_capacity(sectors.len());
        let mut dim = 0;
        for s in &sectors {
            offsets.push(dim);
            dim += s.irrep.dim();
        }
        if dim > MAX_DIM {
            return Err(Error::InvalidSpace(format!(
                "dimension {dim} exceeds the supported bound {MAX_DIM}"
            )));
        }
        Ok(Self {
            group,
            sectors,
            offsets,
            dim,
        })
    }

    /// SU(2) space from a list of `2j`; repeated irreps get consecutive λ.
    pub fn su2(twice_js: &[u32]) -> Result<Self> {
        Self::new(
            GroupKind::Su2,
            auto_lambda(twice_js.iter().map(|&tj| IrrepLabel::Spin(tj))),
        )
    }

    /// U(1) space from a list of charges; repeated charges get consecutive λ.
    pub fn u1(charges: &[i32]) -> Result<Self> {
        Self::new(
            GroupKind::U1,
            auto_lambda(charges.iter().map(|&n| IrrepLabel::Charge(n))),
        )
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("space serializes")
    }

    pub fn group(&self) -> GroupKind {
        self.group
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn sectors(&self) -> &[SectorKey] {
        &self.sectors
    }

    pub fn sector_index(&self, key: SectorKey) -> Option<usize> {
        self.sectors.iter().position(|&s| s == key)
    }

    pub fn sector_offset(&self, sector: usize) -> usize {
        self.offsets[sector]
    }

    /// Flat index of `|key; w⟩`.
    pub fn index_of(&self, key: SectorKey, w: WeightLabel) -> Option<usize> {
        let s = self.sector_index(key)?;
        Some(self.offsets[s] + key.irrep.weight_position(w)?)
    }

    /// Inverse of [`SpaceSpec::index_of`].
    pub fn basis_label(&self, index: usize) -> Option<(SectorKey, WeightLabel)> {
        if index >= self.dim {
            return None;
        }
        let s = self.offsets.partition_point(|&o| o <= index) - 1;
        let key = self.sectors[s];
        Some((key, key.irrep.weights()[index - self.offsets[s]]))
    }

    /// `(sector index, weight)` for every flat index, in order.
    pub fn basis(&self) -> Vec<(usize, WeightLabel)> {
        self.sectors
            .iter()
            .enumerate()
            .flat_map(|(s, key)| key.irrep.weights().into_iter().map(move |w| (s, w)))
            .collect()
    }

    /// Distinct irreps in order of first appearance.
    pub fn irreps(&self) -> Vec<IrrepLabel> {
        let mut out = Vec::new();
        for s in &self.sectors {
            if !out.contains(&s.irrep) {
                out.push(s.irrep);
            }
        }
        out
    }

    /// Indices of the sectors carrying `irrep`, in listed order.
    pub fn sectors_of(&self, irrep: IrrepLabel) -> Vec<usize> {
        (0..self.sectors.len())
            .filter(|&s| self.sectors[s].irrep == irrep)
            .collect()
    }

    /// Distinct weights occurring in the space, ascending.
    pub fn weights(&self) -> Vec<WeightLabel> {
        let mut w: Vec<WeightLabel> = self.basis().into_iter().map(|(_, w)| w).collect();
        w.sort();
        w.dedup();
        w
    }

    pub fn is_multiplicity_free(&self) -> bool {
        self.irreps().len() == self.sectors.len()
    }

    /// Compact human-readable description, e.g. `SU2[1/2,1,0]`.
    pub fn describe(&self) -> String {
        let parts: Vec<String> = self
            .sectors
            .iter()
            .map(|s| {
                let base = match s.irrep {
                    IrrepLabel::Spin(tj) if tj % 2 == 0 => format!("{}", tj / 2),
                    IrrepLabel::Spin(tj) => format!("{tj}/2"),
                    IrrepLabel::Charge(n) => format!("{n}"),
                };
                if s.lambda == 0 {
                    base
                } else {
                    format!("{base}'{}", s.lambda)
                }
            })
            .collect();
        format!("{}[{}]", self.group, parts.join(","))
    }
}

fn auto_lambda(irreps: impl Iterator<Item = IrrepLabel>) -> Vec<SectorKey> {
    let mut out: Vec<SectorKey> = Vec::new();
    for irrep in irreps {
        let lambda = out.iter().filter(|s| s.irrep == irrep).count() as u32;
        out.push(SectorKey::new(irrep, lambda));
    }
    out
}

/// SU(2) element in z-y-z Euler angles, or a U(1) phase.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum GroupElement {
    Su2 { alpha: f64, beta: f64, gamma: f64 },
    U1 { theta: f64 },
}

impl GroupElement {
    pub fn identity(group: GroupKind) -> Self {
        match group {
            GroupKind::Su2 => GroupElement::Su2 {
                alpha: 0.0,
                beta: 0.0,
                gamma: 0.0,
            },
            GroupKind::U1 => GroupElement::U1 { theta: 0.0 },
        }
    }

    pub fn euler(alpha: f64, beta: f64, gamma: f64) -> Self {
        GroupElement::Su2 { alpha, beta, gamma }
    }

    pub fn phase(theta: f64) -> Self {
        GroupElement::U1 { theta }
    }

    /// `R_y(π/2)`, which conjugates `J_z` into `J_x`.
    pub fn ry_half_pi() -> Self {
        Self::euler(0.0, std::f64::consts::FRAC_PI_2, 0.0)
    }

    pub fn group(&self) -> GroupKind {
        match self {
            GroupElement::Su2 { .. } => GroupKind::Su2,
            GroupElement::U1 { .. } => GroupKind::U1,
        }
    }

    pub fn inverse(&self) -> Self {
        match *self {
            GroupElement::Su2 { alpha, beta, gamma } => Self::euler(-gamma, -beta, -alpha),
            GroupElement::U1 { theta } => Self::phase(-theta),
        }
    }

    /// Uniformly random Euler angles (not Haar, which is irrelevant for the
    /// identities checked with them).
    pub fn random<R: Rng + ?Sized>(group: GroupKind, rng: &mut R) -> Self {
        use std::f64::consts::PI;
        match group {
            GroupKind::Su2 => Self::euler(
                uniform_angle(rng, 4.0 * PI),
                uniform_angle(rng, PI),
                uniform_angle(rng, 4.0 * PI),
            ),
            GroupKind::U1 => Self::phase(uniform_angle(rng, 2.0 * PI)),
        }
    }

    /// The 2x2 fundamental matrix `e^{-iαJz} e^{-iβJy} e^{-iγJz}`.
    pub fn su2_matrix(&self) -> Option<[[C64; 2]; 2]> {
        let GroupElement::Su2 { alpha, beta, gamma } = *self else {
            return None;
        };
        let (c, s) = ((beta / 2.0).cos(), (beta / 2.0).sin());
        let e = |phi: f64| C64::from_polar(1.0, phi);
        Some([
            [e(-(alpha + gamma) / 2.0) * c, -e(-(alpha - gamma) / 2.0) * s],
            [e((alpha - gamma) / 2.0) * s, e((alpha + gamma) / 2.0) * c],
        ])
    }

    /// Euler angles reproducing a given SU(2) matrix exactly (sign included).
    pub fn from_su2_matrix(u: [[C64; 2]; 2]) -> Self {
        let a = u[0][0];
        let b = u[1][0];
        let beta = 2.0 * b.norm().atan2(a.norm());
        let arg = |z: C64| if z.norm() > 0.0 { z.arg() } else { 0.0 };
        Self::euler(arg(b) - arg(a), beta, -arg(a) - arg(b))
    }

    /// Group product `self ∘ other`, so that `U(self ∘ other) = U(self) U(other)`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        match (*self, *other) {
            (GroupElement::U1 { theta: a }, GroupElement::U1 { theta: b }) => Ok(Self::phase(a + b)),
            (GroupElement::Su2 { .. }, GroupElement::Su2 { .. }) => {
                let x = self.su2_matrix().unwrap();
                let y = other.su2_matrix().unwrap();
                let mut p = [[C64::zero(); 2]; 2];
                for (i, row) in p.iter_mut().enumerate() {
                    for (k, entry) in row.iter_mut().enumerate() {
                        *entry = x[i][0] * y[0][k] + x[i][1] * y[1][k];
                    }
                }
                Ok(Self::from_su2_matrix(p))
            }
            _ => Err(Error::Domain("cannot compose elements of different groups".into())),
        }
    }
}

fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

fn factorial_f64(n: i32) -> f64 {
    (1..=n).map(f64::from).product()
}

fn triangle(tj1: u32, tj2: u32, tj3: u32) -> bool {
    tj3 + tj1 >= tj2 && tj3 + tj2 >= tj1 && tj3 <= tj1 + tj2 && (tj1 + tj2 + tj3) % 2 == 0
}

/// Whether `j1 ⊗ j2` contains `j3` (charges add for U(1)).
pub fn couples(j1: IrrepLabel, j2: IrrepLabel, j3: IrrepLabel) -> bool {
    match (j1, j2, j3) {
        (IrrepLabel::Spin(a), IrrepLabel::Spin(b), IrrepLabel::Spin(c)) => triangle(a, b, c),
        (IrrepLabel::Charge(a), IrrepLabel::Charge(b), IrrepLabel::Charge(c)) => a + b == c,
        _ => false,
    }
}

/// Condon–Shortley CG coefficient on doubled labels, assuming each weight is
/// valid for its irrep. Exact in rational arithmetic up to the final square root.
pub(crate) fn cg_twice(tj1: u32, tm1: i32, tj2: u32, tm2: i32, tj3: u32, tm3: i32) -> f64 {
    if tm1 + tm2 != tm3 || !triangle(tj1, tj2, tj3) {
        return 0.0;
    }
    let valid = |tj: u32, tm: i32| tm.unsigned_abs() <= tj && (tj as i32 - tm) % 2 == 0;
    if !(valid(tj1, tm1) && valid(tj2, tm2) && valid(tj3, tm3)) {
        return 0.0;
    }
    let (j1, j2, j3) = (tj1 as i32, tj2 as i32, tj3 as i32);
    // All of these are even by the parity constraints.
    let h = |x: i32| -> i32 { x / 2 };
    let f = |x: i32| factorial(x as u32);

    let tri_num = f(h(j3 + j1 - j2)) * f(h(j3 - j1 + j2)) * f(h(j1 + j2 - j3));
    let tri_den = f(h(j1 + j2 + j3) + 1);
    let weights = f(h(j3 + tm3))
        * f(h(j3 - tm3))
        * f(h(j1 - tm1))
        * f(h(j1 + tm1))
        * f(h(j2 - tm2))
        * f(h(j2 + tm2));

    let k_min = 0.max(h(j2 - j3 - tm1)).max(h(j1 - j3 + tm2));
    let k_max = h(j1 + j2 - j3).min(h(j1 - tm1)).min(h(j2 + tm2));
    let mut sum = BigRational::zero();
    for k in k_min..=k_max {
        let den = f(k)
            * f(h(j1 + j2 - j3) - k)
            * f(h(j1 - tm1) - k)
            * f(h(j2 + tm2) - k)
            * f(h(j3 - j2 + tm1) + k)
            * f(h(j3 - j1 - tm2) + k);
        let term = BigRational::new(BigInt::one(), den);
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    if sum.is_zero() {
        return 0.0;
    }
    let square = BigRational::new(BigInt::from(j3 + 1) * tri_num * weights, tri_den)
        * &sum
        * &sum;
    let magnitude = square.to_f64().expect("finite CG").sqrt();
    if sum.is_negative() {
        -magnitude
    } else {
        magnitude
    }
}

/// Clebsch–Gordan coefficient `⟨j1 m1; j2 m2 | j3 m3⟩` (Condon–Shortley).
///
/// Exactly zero when `m1 + m2 != m3` or the triangle rule fails.
pub fn cg_coefficient(
    j1: IrrepLabel,
    m1: WeightLabel,
    j2: IrrepLabel,
    m2: WeightLabel,
    j3: IrrepLabel,
    m3: WeightLabel,
) -> Result<f64> {
    let (IrrepLabel::Spin(a), IrrepLabel::Spin(b), IrrepLabel::Spin(c)) = (j1, j2, j3) else {
        return Err(Error::Domain(
            "CG coefficients are defined for SU(2) labels only".into(),
        ));
    };
    for (j, m) in [(j1, m1), (j2, m2), (j3, m3)] {
        if !j.contains(m) {
            return Err(Error::Domain(format!("2m = {} is not a weight of {j}", m.0)));
        }
    }
    Ok(cg_twice(a, m1.0, b, m2.0, c, m3.0))
}

/// Wigner–Eckart coupling factor for either group: the CG coefficient for
/// SU(2), the charge-conservation delta for U(1).
pub fn coupling(
    j1: IrrepLabel,
    m1: WeightLabel,
    rank: IrrepLabel,
    big_m: WeightLabel,
    j2: IrrepLabel,
    m2: WeightLabel,
) -> f64 {
    match (j1, rank, j2) {
        (IrrepLabel::Spin(a), IrrepLabel::Spin(b), IrrepLabel::Spin(c)) => {
            cg_twice(a, m1.0, b, big_m.0, c, m2.0)
        }
        (IrrepLabel::Charge(a), IrrepLabel::Charge(b), IrrepLabel::Charge(c)) => {
            if a + b == c && m1.0 + big_m.0 == m2.0 {
                1.0
            } else {
                0.0
            }
        }
        _ => 0.0,
    }
}

/// `d^j_{m',m}(β) = ⟨j m'| e^{-iβ J_y} |j m⟩`.
pub fn wigner_small_d(j: IrrepLabel, mp: WeightLabel, m: WeightLabel, beta: f64) -> Result<f64> {
    let IrrepLabel::Spin(tj) = j else {
        return Err(Error::Domain("small-d matrices are SU(2) objects".into()));
    };
    if !j.contains(mp) || !j.contains(m) {
        return Err(Error::Domain(format!(
            "weights 2m'={}, 2m={} invalid for {j}",
            mp.0, m.0
        )));
    }
    let (tj, tmp, tm) = (tj as i32, mp.0, m.0);
    let (jpm, jmm) = ((tj + tm) / 2, (tj - tm) / 2);
    let (jpmp, jmmp) = ((tj + tmp) / 2, (tj - tmp) / 2);
    let pref = (factorial_f64(jpmp) * factorial_f64(jmmp) * factorial_f64(jpm) * factorial_f64(jmm)).sqrt();
    let (c, s) = ((beta / 2.0).cos(), (beta / 2.0).sin());
    let diff = (tmp - tm) / 2;
    let k_min = 0.max(-diff);
    let k_max = jpm.min(jmmp);
    let mut total = 0.0;
    for k in k_min..=k_max {
        let den = factorial_f64(jpm - k)
            * factorial_f64(k)
            * factorial_f64(jmmp - k)
            * factorial_f64(k + diff);
        let sign = if (k + diff) % 2 == 0 { 1.0 } else { -1.0 };
        total += sign * c.powi(tj - 2 * k - diff) * s.powi(2 * k + diff) / den;
    }
    Ok(pref * total)
}

/// The full `(2j+1)x(2j+1)` Wigner `D^j(g)` matrix in descending-weight order.
pub fn wigner_big_d(j: IrrepLabel, g: &GroupElement) -> Result<CMat> {
    match (j, *g) {
        (IrrepLabel::Spin(_), GroupElement::Su2 { alpha, beta, gamma }) => {
            let ws = j.weights();
            let n = ws.len();
            let mut d = CMat::zeros(n, n);
            for (r, &mp) in ws.iter().enumerate() {
                for (c, &m) in ws.iter().enumerate() {
                    let small = wigner_small_d(j, mp, m, beta)?;
                    let phase = -(mp.0 as f64 * alpha + m.0 as f64 * gamma) / 2.0;
                    d[(r, c)] = C64::from_polar(small, phase);
                }
            }
            Ok(d)
        }
        (IrrepLabel::Charge(n), GroupElement::U1 { theta }) => {
            Ok(CMat::from_element(1, 1, C64::from_polar(1.0, n as f64 * theta)))
        }
        _ => Err(Error::Domain(format!("group element does not act on {j}"))),
    }
}

/// Block-diagonal `U(g)` on the flat basis of `space`.
pub fn representation_matrix(space: &SpaceSpec, g: &GroupElement) -> Result<CMat> {
    if g.group() != space.group() {
        return Err(Error::Domain(format!(
            "{} element acting on a {} space",
            g.group(),
            space.group()
        )));
    }
    let mut u = CMat::zeros(space.dim(), space.dim());
    for (s, key) in space.sectors().iter().enumerate() {
        let block = wigner_big_d(key.irrep, g)?;
        let o = space.sector_offset(s);
        u.view_mut((o, o), block.shape()).copy_from(&block);
    }
    Ok(u)
}

/// SU(2) generators on a space; `J_x`, `J_y`, `J_z` are Hermitian.
#[derive(Clone, Debug)]
pub struct Generators {
    pub jz: CMat,
    pub jplus: CMat,
    pub jminus: CMat,
    pub jx: CMat,
    pub jy: CMat,
}

pub fn generators(space: &SpaceSpec) -> Result<Generators> {
    if space.group() != GroupKind::Su2 {
        return Err(Error::UnsupportedGroup { expected: "SU2" });
    }
    let n = space.dim();
    let mut jz = CMat::zeros(n, n);
    let mut jplus = CMat::zeros(n, n);
    for (s, key) in space.sectors().iter().enumerate() {
        let o = space.sector_offset(s);
        let IrrepLabel::Spin(tj) = key.irrep else {
            unreachable!()
        };
        let j = tj as f64 / 2.0;
        for (k, w) in key.irrep.weights().into_iter().enumerate() {
            let m = w.0 as f64 / 2.0;
            jz[(o + k, o + k)] = real(m);
            // Weights descend, so m+1 sits one slot earlier.
            if k > 0 {
                jplus[(o + k - 1, o + k)] = real((j * (j + 1.0) - m * (m + 1.0)).sqrt());
            }
        }
    }
    let jminus = jplus.adjoint();
    let jx = (&jplus + &jminus).scale(0.5);
    let jy = (&jplus - &jminus) * c64(0.0, -0.5);
    Ok(Generators {
        jz,
        jplus,
        jminus,
        jx,
        jy,
    })
}

/// The weight operator: `J_z` for SU(2), the charge for U(1).
pub fn cartan_operator(space: &SpaceSpec) -> CMat {
    let n = space.dim();
    let mut h = CMat::zeros(n, n);
    for (i, (_, w)) in space.basis().into_iter().enumerate() {
        h[(i, i)] = real(w.value(space.group()));
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{commutator, identity, is_unitary, max_abs, max_abs_diff};
    use crate::random::rng;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn s(tj: u32) -> IrrepLabel {
        IrrepLabel::Spin(tj)
    }
    fn w(tm: i32) -> WeightLabel {
        WeightLabel(tm)
    }

    #[test]
    fn cg_examples() {
        assert_eq!(cg_coefficient(s(1), w(1), s(1), w(1), s(2), w(2)).unwrap(), 1.0);
        let singlet = cg_coefficient(s(1), w(1), s(1), w(-1), s(0), w(0)).unwrap();
        assert!((singlet - FRAC_1_SQRT_2).abs() < 1e-15);
        assert_eq!(cg_coefficient(s(1), w(1), s(1), w(1), s(2), w(0)).unwrap(), 0.0);
    }

    #[test]
    fn cg_rejects_bad_weights() {
        assert!(cg_coefficient(s(1), w(0), s(1), w(1), s(2), w(1)).is_err());
        assert!(cg_coefficient(s(2), w(4), s(1), w(1), s(3), w(5)).is_err());
        assert!(matches!(
            cg_coefficient(IrrepLabel::Charge(0), w(0), s(1), w(1), s(1), w(1)),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn cg_triangle_rule_zero() {
        // 1/2 x 1/2 cannot make 2.
        assert_eq!(cg_coefficient(s(1), w(1), s(1), w(1), s(4), w(2)).unwrap(), 0.0);
    }

    #[test]
    fn cg_known_table_values() {
        // <1 1; 1 -1 | 1 0> = 1/sqrt2, <1 0; 1 0 | 2 0> = sqrt(2/3), <1 0;1 0|1 0> = 0
        assert!((cg_twice(2, 2, 2, -2, 2, 0) - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((cg_twice(2, 0, 2, 0, 4, 0) - (2.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert_eq!(cg_twice(2, 0, 2, 0, 2, 0), 0.0);
        // <1/2 -1/2; 1/2 1/2 | 0 0> = -1/sqrt2
        assert!((cg_twice(1, -1, 1, 1, 0, 0) + FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn small_d_examples() {
        for tj in 0..=6 {
            let j = s(tj);
            for &mp in &j.weights() {
                for &m in &j.weights() {
                    let v = wigner_small_d(j, mp, m, 0.0).unwrap();
                    assert_eq!(v, if mp == m { 1.0 } else { 0.0 });
                }
            }
        }
        let beta = 0.83;
        let v = wigner_small_d(s(1), w(1), w(1), beta).unwrap();
        assert!((v - (beta / 2.0).cos()).abs() < 1e-15);
        let v = wigner_small_d(s(1), w(1), w(-1), beta).unwrap();
        assert!((v + (beta / 2.0).sin()).abs() < 1e-15);
        // d^1 rows are unit vectors
        let j = s(2);
        for &mp in &j.weights() {
            let norm: f64 = j
                .weights()
                .iter()
                .map(|&m| wigner_small_d(j, mp, m, 0.7).unwrap().powi(2))
                .sum();
            assert!((norm - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn small_d_matches_exponentiated_jy() {
        let space = SpaceSpec::su2(&[1, 2, 3, 4]).unwrap();
        let gens = generators(&space).unwrap();
        let beta = 1.234;
        let expd = (&gens.jy * c64(0.0, -beta)).exp();
        let u = representation_matrix(&space, &GroupElement::euler(0.0, beta, 0.0)).unwrap();
        assert!(max_abs_diff(&expd, &u) < 1e-12);
    }

    #[test]
    fn representation_identity_and_unitarity() {
        let space = SpaceSpec::su2(&[0, 1, 2, 3, 1]).unwrap();
        let id = representation_matrix(&space, &GroupElement::identity(GroupKind::Su2)).unwrap();
        assert!(max_abs_diff(&id, &identity(space.dim())) < 1e-15);
        let mut r = rng(9);
        for _ in 0..10 {
            let u = representation_matrix(&space, &GroupElement::random(GroupKind::Su2, &mut r)).unwrap();
            assert!(is_unitary(&u, 1e-12));
        }
    }

    #[test]
    fn u1_phase() {
        let space = SpaceSpec::u1(&[-1, 0, 2]).unwrap();
        let u = representation_matrix(&space, &GroupElement::phase(0.3)).unwrap();
        assert!((u[(2, 2)] - C64::from_polar(1.0, 0.6)).norm() < 1e-15);
        assert!((u[(0, 0)] - C64::from_polar(1.0, -0.3)).norm() < 1e-15);
    }

    #[test]
    fn wrong_group_element_rejected() {
        let space = SpaceSpec::u1(&[0]).unwrap();
        assert!(representation_matrix(&space, &GroupElement::ry_half_pi()).is_err());
    }

    #[test]
    fn generator_relations() {
        let space = SpaceSpec::su2(&[1, 2, 4, 2]).unwrap();
        let g = generators(&space).unwrap();
        let lhs = commutator(&g.jx, &g.jy) - &g.jz * c64(0.0, 1.0);
        assert!(max_abs(&lhs) < 1e-12);
        for (i, (_, wl)) in space.basis().into_iter().enumerate() {
            assert_eq!(g.jz[(i, i)].re, wl.0 as f64 / 2.0);
        }
        let rot = (&g.jy * c64(0.0, -PI / 2.0)).exp();
        let conj = &rot * &g.jz * rot.adjoint();
        assert!(max_abs_diff(&conj, &g.jx) < 1e-10);
        assert!(generators(&SpaceSpec::u1(&[1]).unwrap()).is_err());
    }

    #[test]
    fn index_map_is_bijective() {
        let space = SpaceSpec::su2(&[3, 0, 1, 3]).unwrap();
        assert_eq!(space.dim(), 4 + 1 + 2 + 4);
        for i in 0..space.dim() {
            let (key, wl) = space.basis_label(i).unwrap();
            assert_eq!(space.index_of(key, wl), Some(i));
        }
        assert!(space.basis_label(space.dim()).is_none());
        // weights descend within a sector
        assert_eq!(space.basis_label(0).unwrap().1, w(3));
        assert_eq!(space.basis_label(3).unwrap().1, w(-3));
        assert_eq!(space.sectors()[3], SectorKey::new(s(3), 1));
    }

    #[test]
    fn space_validation() {
        assert!(SpaceSpec::su2(&[]).is_err());
        assert!(SpaceSpec::su2(&[18]).is_err());
        let dup = vec![SectorKey::new(s(1), 0), SectorKey::new(s(1), 0)];
        assert!(SpaceSpec::new(GroupKind::Su2, dup).is_err());
        let mixed = vec![SectorKey::new(IrrepLabel::Charge(1), 0)];
        assert!(SpaceSpec::new(GroupKind::Su2, mixed).is_err());
        assert!(SpaceSpec::su2(&[16; 16]).is_err()); // 272 > 256
    }

    #[test]
    fn space_json_schema() {
        let space = SpaceSpec::su2(&[1, 2, 1]).unwrap();
        let text = space.to_json();
        assert_eq!(text, r#"{"group":"SU2","sectors":[[1,0],[2,0],[1,1]]}"#);
        assert_eq!(SpaceSpec::from_json(&text).unwrap(), space);
        let u1 = SpaceSpec::from_json(r#"{"group":"U1","sectors":[[-2,0],[3,1]]}"#).unwrap();
        assert_eq!(u1.sectors()[0].irrep, IrrepLabel::Charge(-2));
        assert!(SpaceSpec::from_json(r#"{"group":"SU2","sectors":[[-1,0]]}"#).is_err());
    }

    #[test]
    fn compose_round_trip_su2_matrix() {
        let mut r = rng(4);
        for _ in 0..20 {
            let g = GroupElement::random(GroupKind::Su2, &mut r);
            let back = GroupElement::from_su2_matrix(g.su2_matrix().unwrap());
            let (a, b) = (g.su2_matrix().unwrap(), back.su2_matrix().unwrap());
            for i in 0..2 {
                for k in 0..2 {
                    assert!((a[i][k] - b[i][k]).norm() < 1e-12);
                }
            }
        }
    }
}
