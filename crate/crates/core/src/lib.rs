//! Covariant quantum channels simulated by local operations.
//!
//! States of a system with SU(2) or U(1) symmetry are embedded into bipartite
//! states so that covariant dynamics acts as local operations with classical
//! communication on the image. Entanglement monotones of the image then become
//! asymmetry monotones of the original state.
//!
//! Module map:
//! - [`repkit`]: irreps, flat bases, group elements, CG coefficients, Wigner matrices
//! - [`channels`]: density matrices, Wigner–Eckart channel synthesis, twirling
//! - [`embed`]: the `C`, `C_g` and `L` isometries and the simulating Kraus sets
//! - [`monotones`]: negativity, entropies, asymmetry monotones and reports
//! - [`abelian`]: the U(1) specialization

pub mod abelian;
pub mod channels;
pub mod embed;
pub mod error;
pub mod linalg;
pub mod monotones;
pub mod random;
pub mod repkit;

pub use error::{Error, Result};
pub use repkit::{
    cg_coefficient, generators, representation_matrix, wigner_small_d, GroupElement, GroupKind,
    IrrepLabel, SectorKey, SpaceSpec, WeightLabel,
};
pub use channels::{
    apply_channel, covariance_residual, expand_kraus, normalize_family, random_covariant_channel,
    random_covariant_unitary, twirl, CovariantChannel, CovariantKrausFamily, DensityMatrix,
    ReducedElementTable,
};
pub use embed::{
    embed_c, embed_cg, embed_l, BipartiteState, IsometryKind, IsometrySpec, ProjectorSet,
    WeightRegister,
};
pub use monotones::{
    asymmetry_monotone, asymmetry_sup, g_asymmetry, log_negativity, negativity, EntanglementMonotone,
    MonotoneReport,
};
