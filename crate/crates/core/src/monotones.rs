//! Entanglement monotones on bipartite images, the asymmetry monotones built
//! from them, entropic quantities and monotonicity/conservation reports.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::channels::{apply_channel, twirl, CovariantChannel, DensityMatrix};
use crate::embed::{embed_cg, embed_l, finite_set, BipartiteState, WeightRegister};
use crate::error::{Error, Result};
use crate::linalg::{eigvalsh, hermitian_fn, trace, CMat, C64};
use crate::repkit::{GroupElement, SpaceSpec};

/// Slack allowed before a monotone counts as having increased.
pub const MONOTONICITY_TOL: f64 = 1e-9;
/// Largest change a conserved quantity may show.
pub const CONSERVATION_TOL: f64 = 1e-10;
/// Negative eigenvalues down to this size are treated as rounding noise.
pub const CLIP_TOL: f64 = 1e-12;

/// Transpose on the `B` factor.
pub fn partial_transpose(state: &BipartiteState) -> Result<CMat> {
    partial_transpose_matrix(&state.matrix, state.cut)
}

pub fn partial_transpose_matrix(m: &CMat, cut: (usize, usize)) -> Result<CMat> {
    let (da, db) = cut;
    if m.shape() != (da * db, da * db) {
        return Err(Error::InvalidState(format!(
            "cut {cut:?} does not match a {:?} matrix",
            m.shape()
        )));
    }
    Ok(CMat::from_fn(da * db, da * db, |r, c| {
        let (a, b) = (r / db, r % db);
        let (ap, bp) = (c / db, c % db);
        m[(a * db + bp, ap * db + b)]
    }))
}

/// `‖ρ^Γ‖₁`.
pub fn pt_trace_norm(state: &BipartiteState) -> Result<f64> {
    let pt = partial_transpose(state)?;
    Ok(eigvalsh(&pt).iter().map(|x| x.abs()).sum())
}

/// `(‖ρ^Γ‖₁ − 1)/2`, clamped at zero.
pub fn negativity(state: &BipartiteState) -> Result<f64> {
    Ok(((pt_trace_norm(state)? - 1.0) / 2.0).max(0.0))
}

/// `log₂ ‖ρ^Γ‖₁`, clamped at zero.
pub fn log_negativity(state: &BipartiteState) -> Result<f64> {
    Ok(pt_trace_norm(state)?.log2().max(0.0))
}

/// Positive partial transpose up to `tol`.
pub fn is_ppt(state: &BipartiteState, tol: f64) -> Result<bool> {
    let pt = partial_transpose(state)?;
    Ok(eigvalsh(&pt).first().copied().unwrap_or(0.0) >= -tol)
}

/// `((Σ √p)² − 1)/2`, the negativity of a pure image with weights `p`.
pub fn pure_state_negativity(p: &[f64]) -> f64 {
    let s: f64 = p.iter().map(|x| x.sqrt()).sum();
    (s * s - 1.0) / 2.0
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EntanglementMonotone {
    Negativity,
    LogNegativity,
}

impl EntanglementMonotone {
    pub const ALL: [EntanglementMonotone; 2] = [Self::Negativity, Self::LogNegativity];

    pub fn name(self) -> &'static str {
        match self {
            Self::Negativity => "negativity",
            Self::LogNegativity => "log-negativity",
        }
    }

    pub fn evaluate(self, state: &BipartiteState) -> Result<f64> {
        match self {
            Self::Negativity => negativity(state),
            Self::LogNegativity => log_negativity(state),
        }
    }
}

impl fmt::Display for EntanglementMonotone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EntanglementMonotone {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::UnknownMonotone(s.to_string()))
    }
}

/// A monotone evaluated on a bipartite cut.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonotoneValue {
    pub name: String,
    pub value: f64,
    pub cut: (usize, usize),
}

impl MonotoneValue {
    pub fn of(e: EntanglementMonotone, state: &BipartiteState) -> Result<Self> {
        Ok(Self {
            name: e.name().to_string(),
            value: e.evaluate(state)?,
            cut: state.cut,
        })
    }
}

/// `A^g_E(ρ) = E(C_g(ρ))`.
pub fn asymmetry_monotone(e: EntanglementMonotone, g: &GroupElement, rho: &DensityMatrix) -> Result<f64> {
    let register = WeightRegister::for_space(rho.space(), 0);
    e.evaluate(&embed_cg(g, rho, &register)?)
}

/// As [`asymmetry_monotone`], selecting the monotone by name.
pub fn asymmetry_monotone_named(name: &str, g: &GroupElement, rho: &DensityMatrix) -> Result<f64> {
    asymmetry_monotone(name.parse()?, g, rho)
}

/// `max_{s∈S} A^s_E(ρ)`.
pub fn asymmetry_sup(e: EntanglementMonotone, rho: &DensityMatrix) -> Result<f64> {
    finite_set(rho.space().group())
        .iter()
        .map(|s| asymmetry_monotone(e, s, rho))
        .try_fold(0.0f64, |acc, v| Ok(acc.max(v?)))
}

/// `E(L(ρ))`.
pub fn l_monotone(e: EntanglementMonotone, rho: &DensityMatrix) -> Result<f64> {
    e.evaluate(&embed_l(rho)?)
}

/// Eigenvalues with rounding noise clipped; a larger negative aborts with the
/// full spectrum in the message.
fn clipped_spectrum(m: &CMat) -> Result<Vec<f64>> {
    let vals = eigvalsh(m);
    if let Some(&min) = vals.first() {
        if min < -CLIP_TOL {
            return Err(Error::Numerical(format!(
                "eigenvalue {min:e} below -{CLIP_TOL:e}; spectrum {vals:?}"
            )));
        }
    }
    Ok(vals.into_iter().map(|x| x.max(0.0)).collect())
}

/// Von Neumann entropy in bits.
pub fn von_neumann_entropy(m: &CMat) -> Result<f64> {
    Ok(clipped_spectrum(m)?
        .into_iter()
        .filter(|&p| p > 0.0)
        .map(|p| -p * p.ln())
        .sum::<f64>()
        / std::f64::consts::LN_2)
}

/// `A_G(ρ) = S(G(ρ)) − S(ρ)` in bits.
pub fn g_asymmetry(rho: &DensityMatrix) -> Result<f64> {
    Ok(von_neumann_entropy(twirl(rho).matrix())? - von_neumann_entropy(rho.matrix())?)
}

/// A relative entropy, `Infinite` when the support condition fails.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "lowercase")]
pub enum RelativeEntropy {
    Finite(f64),
    Infinite,
}

impl RelativeEntropy {
    pub fn finite(self) -> Option<f64> {
        match self {
            Self::Finite(v) => Some(v),
            Self::Infinite => None,
        }
    }
}

const SUPPORT_TOL: f64 = 1e-12;

/// `S(ρ‖σ) = Tr ρ log ρ − Tr ρ log σ` in bits.
pub fn relative_entropy(rho: &CMat, sigma: &CMat) -> Result<RelativeEntropy> {
    if rho.shape() != sigma.shape() {
        return Err(Error::SpaceMismatch);
    }
    let sig_vals = clipped_spectrum(sigma)?;
    let scale = sig_vals.last().copied().unwrap_or(0.0).max(1.0);
    let cut = SUPPORT_TOL * scale;
    let kernel = hermitian_fn(sigma, |x| if x > cut { 0.0 } else { 1.0 });
    if trace(&(rho * kernel)).re > 1e-10 {
        return Ok(RelativeEntropy::Infinite);
    }
    let log_sigma = hermitian_fn(sigma, |x| if x > cut { x.ln() } else { 0.0 });
    let cross: C64 = trace(&(rho * log_sigma));
    let neg_s = -von_neumann_entropy(rho)? * std::f64::consts::LN_2;
    Ok(RelativeEntropy::Finite(((neg_s - cross.re) / std::f64::consts::LN_2).max(0.0)))
}

/// Reduced state on `A` (`keep_a`) or `B`.
pub fn partial_trace(state: &BipartiteState, keep_a: bool) -> CMat {
    let (da, db) = state.cut;
    let m = &state.matrix;
    if keep_a {
        CMat::from_fn(da, da, |a, ap| (0..db).map(|b| m[(a * db + b, ap * db + b)]).sum())
    } else {
        CMat::from_fn(db, db, |b, bp| (0..da).map(|a| m[(a * db + b, a * db + bp)]).sum())
    }
}

/// Lower estimate of the relative entropy of entanglement (bits):
/// `max(S(A) − S(AB), S(B) − S(AB), 0)`, the hashing bound on distillable
/// entanglement, which the relative entropy of entanglement dominates.
pub fn ree_lower_estimate(state: &BipartiteState) -> Result<f64> {
    let s_ab = von_neumann_entropy(&state.matrix)?;
    let s_a = von_neumann_entropy(&partial_trace(state, true))?;
    let s_b = von_neumann_entropy(&partial_trace(state, false))?;
    Ok((s_a - s_ab).max(s_b - s_ab).max(0.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Self::Pass
        } else {
            Self::Fail
        }
    }

    pub fn passed(self) -> bool {
        self == Self::Pass
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Pass => "pass",
            Self::Fail => "fail",
        })
    }
}

/// One monotone compared before and after a channel.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonotoneEntry {
    pub monotone: String,
    /// `C`, `C_g[...]` or `L`.
    pub isometry: String,
    pub before: f64,
    pub after: f64,
    pub delta: f64,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MonotoneReport {
    pub entries: Vec<MonotoneEntry>,
}

impl MonotoneReport {
    pub fn passed(&self) -> bool {
        self.entries.iter().all(|e| e.verdict.passed())
    }

    pub fn max_delta(&self) -> f64 {
        self.entries.iter().map(|e| e.delta).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn max_abs_delta(&self) -> f64 {
        self.entries.iter().map(|e| e.delta.abs()).fold(0.0, f64::max)
    }
}

fn isometry_name(g: &GroupElement, index: usize) -> String {
    match index {
        0 => "C".to_string(),
        _ => match g {
            GroupElement::Su2 { beta, .. } if (*beta - std::f64::consts::FRAC_PI_2).abs() < 1e-15 => {
                "C_Ry(pi/2)".to_string()
            }
            _ => format!("C_g{index}"),
        },
    }
}

fn compare(
    before: &DensityMatrix,
    after: &DensityMatrix,
    include_l: bool,
    ok: impl Fn(f64) -> bool,
) -> Result<MonotoneReport> {
    let mut entries = Vec::new();
    let space: &SpaceSpec = before.space();
    for e in EntanglementMonotone::ALL {
        for (i, s) in finite_set(space.group()).iter().enumerate() {
            let b = asymmetry_monotone(e, s, before)?;
            let a = asymmetry_monotone(e, s, after)?;
            entries.push(MonotoneEntry {
                monotone: e.name().to_string(),
                isometry: isometry_name(s, i),
                before: b,
                after: a,
                delta: a - b,
                verdict: Verdict::from_bool(ok(a - b)),
            });
        }
        if include_l {
            let b = l_monotone(e, before)?;
            let a = l_monotone(e, after)?;
            entries.push(MonotoneEntry {
                monotone: e.name().to_string(),
                isometry: "L".to_string(),
                before: b,
                after: a,
                delta: a - b,
                verdict: Verdict::from_bool(ok(a - b)),
            });
        }
    }
    Ok(MonotoneReport { entries })
}

/// Every `A^s_E`, `s ∈ S`, before and after `channel`; pass iff it did not grow
/// by more than [`MONOTONICITY_TOL`].
pub fn monotonicity_report(rho: &DensityMatrix, channel: &CovariantChannel) -> Result<MonotoneReport> {
    let after = apply_channel(channel, rho)?;
    compare(rho, &after, false, |d| d <= MONOTONICITY_TOL)
}

/// `A^s_E` and `E(L(·))` under a covariant unitary; pass iff unchanged within
/// [`CONSERVATION_TOL`].
pub fn conservation_check(rho: &DensityMatrix, unitary_channel: &CovariantChannel) -> Result<MonotoneReport> {
    if unitary_channel.as_unitary().is_none() {
        return Err(Error::NotUnitary(format!(
            "{} component(s), {} Kraus operator(s)",
            unitary_channel.components.len(),
            unitary_channel.pooled_kraus().len()
        )));
    }
    let after = apply_channel(unitary_channel, rho)?;
    compare(rho, &after, true, |d| d.abs() < CONSERVATION_TOL)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{identity_channel, random_covariant_channel, random_covariant_unitary};
    use crate::embed::embed_c;
    use crate::linalg::{c64, kron, max_abs_diff, outer, real, CVec};
    use crate::repkit::IrrepLabel;

    fn bell() -> BipartiteState {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let v = CVec::from_vec(vec![real(s), real(0.0), real(0.0), real(s)]);
        BipartiteState::from_matrix(outer(&v), (2, 2)).unwrap()
    }

    #[test]
    fn bell_pair() {
        let pt = partial_transpose(&bell()).unwrap();
        // Oracle: the partial transpose of |Φ+⟩ is SWAP/2 with spectrum {1/2,1/2,1/2,-1/2}.
        let mut swap = CMat::zeros(4, 4);
        for (r, c) in [(0, 0), (1, 2), (2, 1), (3, 3)] {
            swap[(r, c)] = real(0.5);
        }
        assert!(max_abs_diff(&pt, &swap) < 1e-15);
        assert!((eigvalsh(&pt)[0] + 0.5).abs() < 1e-12);
        assert!((negativity(&bell()).unwrap() - 0.5).abs() < 1e-12);
        assert!((log_negativity(&bell()).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pt_is_involution_and_keeps_products_ppt() {
        let a = crate::random::random_density_matrix(&mut crate::random::rng(1), 2, 2);
        let b = crate::random::random_density_matrix(&mut crate::random::rng(2), 3, 3);
        let s = BipartiteState::from_matrix(kron(&a, &b), (2, 3)).unwrap();
        assert!(is_ppt(&s, 1e-12).unwrap());
        assert!(negativity(&s).unwrap() < 1e-10);
        let twice = partial_transpose_matrix(&partial_transpose(&s).unwrap(), s.cut).unwrap();
        assert_eq!(twice, s.matrix);
        assert!(partial_transpose_matrix(&s.matrix, (3, 3)).is_err());
    }

    #[test]
    fn unknown_monotone() {
        let space = SpaceSpec::su2(&[1]).unwrap();
        let rho = DensityMatrix::maximally_mixed(space);
        let e = asymmetry_monotone_named("squashed", &GroupElement::ry_half_pi(), &rho);
        assert!(matches!(e, Err(Error::UnknownMonotone(_))));
        assert_eq!("log-negativity".parse::<EntanglementMonotone>().unwrap(), EntanglementMonotone::LogNegativity);
    }

    #[test]
    fn basis_state_is_detected_only_by_rotation() {
        let space = SpaceSpec::su2(&[2]).unwrap();
        let rho = DensityMatrix::basis_state(space, 0).unwrap();
        let e = EntanglementMonotone::Negativity;
        assert!(asymmetry_monotone(e, &GroupElement::identity(rho.space().group()), &rho).unwrap() < 1e-12);
        assert!(asymmetry_sup(e, &rho).unwrap() > 0.1);
    }

    #[test]
    fn identity_element_reduces_to_c() {
        let space = SpaceSpec::su2(&[1, 2]).unwrap();
        let rho = DensityMatrix::random(space.clone(), 2, 3);
        let reg = WeightRegister::for_space(&space, 0);
        let direct = negativity(&embed_c(&rho, &reg).unwrap()).unwrap();
        let via = asymmetry_monotone(EntanglementMonotone::Negativity, &GroupElement::identity(space.group()), &rho).unwrap();
        assert_eq!(direct, via);
    }

    #[test]
    fn entropy_examples() {
        let mixed = crate::linalg::identity(4).unscale(4.0);
        assert!((von_neumann_entropy(&mixed).unwrap() - 2.0).abs() < 1e-12);
        let mut bad = CMat::zeros(2, 2);
        bad[(0, 0)] = real(1.1);
        bad[(1, 1)] = real(-0.1);
        assert!(matches!(von_neumann_entropy(&bad), Err(Error::Numerical(_))));
        let mut noisy = CMat::zeros(2, 2);
        noisy[(0, 0)] = real(1.0 + 1e-13);
        noisy[(1, 1)] = real(-1e-13);
        assert!(von_neumann_entropy(&noisy).unwrap().abs() < 1e-10);
    }

    #[test]
    fn g_asymmetry_of_two_spin_superposition() {
        // (|1/2;1/2⟩ + |1;0⟩)/√2: twirl gives I_2/4 ⊕ I_3/6, entropy
        // ½log₂4 + ½log₂6 bits; the pure state has zero entropy.
        let space = SpaceSpec::su2(&[1, 2]).unwrap();
        let psi = CVec::from_fn(5, |i, _| if i == 0 || i == 3 { real(1.0) } else { real(0.0) });
        let rho = DensityMatrix::from_pure(space, &psi).unwrap();
        let expect = 0.5 * 4f64.log2() + 0.5 * 6f64.log2();
        assert!((g_asymmetry(&rho).unwrap() - expect).abs() < 1e-12);
        assert!(g_asymmetry(&twirl(&rho)).unwrap().abs() < 1e-10);
    }

    #[test]
    fn relative_entropy_cases() {
        let space = SpaceSpec::su2(&[1, 2]).unwrap();
        let rho = DensityMatrix::random(space.clone(), 5, 1);
        assert!(relative_entropy(rho.matrix(), rho.matrix()).unwrap().finite().unwrap() < 1e-10);
        let pure = DensityMatrix::basis_state(space.clone(), 0).unwrap();
        assert_eq!(relative_entropy(rho.matrix(), pure.matrix()).unwrap(), RelativeEntropy::Infinite);
        // S(ρ‖G(ρ)) equals A_G.
        let r = relative_entropy(rho.matrix(), twirl(&rho).matrix()).unwrap().finite().unwrap();
        assert!((r - g_asymmetry(&rho).unwrap()).abs() < 1e-10);
        let json = serde_json::to_string(&RelativeEntropy::Infinite).unwrap();
        assert_eq!(json, r#"{"kind":"infinite"}"#);
    }

    #[test]
    fn ree_lower_estimate_of_bell_is_one_bit() {
        assert!((ree_lower_estimate(&bell()).unwrap() - 1.0).abs() < 1e-12);
        let prod = BipartiteState::from_matrix(crate::linalg::identity(4).unscale(4.0), (2, 2)).unwrap();
        assert_eq!(ree_lower_estimate(&prod).unwrap(), 0.0);
    }

    #[test]
    fn pure_closed_form_simple() {
        let space = SpaceSpec::su2(&[1, 2]).unwrap();
        let amps = [0.5f64, 0.3, 0.2];
        let idx = [0usize, 2, 3];
        let mut psi = CVec::zeros(5);
        for (a, i) in amps.iter().zip(idx) {
            psi[i] = c64(a.sqrt(), 0.0);
        }
        let rho = DensityMatrix::from_pure(space, &psi).unwrap();
        let n = asymmetry_monotone(EntanglementMonotone::Negativity, &GroupElement::identity(rho.space().group()), &rho).unwrap();
        assert!((n - pure_state_negativity(&amps)).abs() < 1e-10);
    }

    #[test]
    fn monotonicity_and_conservation() {
        let space = SpaceSpec::su2(&[1, 2, 0]).unwrap();
        let rho = DensityMatrix::random(space.clone(), 2, 9);
        let ch = random_covariant_channel(&space, IrrepLabel::Spin(2), 2, 9).unwrap();
        let rep = monotonicity_report(&rho, &ch).unwrap();
        assert_eq!(rep.entries.len(), 4);
        assert!(rep.passed(), "{rep:?}");
        let u = random_covariant_unitary(&space, 10).unwrap();
        let rep = conservation_check(&rho, &u).unwrap();
        assert_eq!(rep.entries.len(), 6);
        assert!(rep.passed(), "{rep:?}");
        let id = identity_channel(&space).unwrap();
        assert_eq!(conservation_check(&rho, &id).unwrap().max_abs_delta(), 0.0);
        assert!(matches!(conservation_check(&rho, &ch), Err(Error::NotUnitary(_))));
    }
}
