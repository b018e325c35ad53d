use thiserror::Error;

use crate::repkit::SectorKey;

#[derive(Debug, Error)]
pub enum Error {
    /// A label or weight that does not belong to its irrep, or a group mismatch.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid space: {0}")]
    InvalidSpace(String),

    #[error("operands live on different spaces")]
    SpaceMismatch,

    #[error("sector {0} is not part of the space")]
    SectorNotInSpace(SectorKey),

    #[error("triangle rule violated: {out} cannot be reached from {input} with rank {rank}")]
    TriangleRule {
        out: String,
        input: String,
        rank: String,
    },

    #[error("no sector pair satisfies the triangle rule for rank {0}")]
    UnsatisfiableRank(String),

    #[error("completeness operator is singular on sectors {}", fmt_sectors(.sectors))]
    SingularCompleteness { sectors: Vec<SectorKey> },

    #[error("weight register [{min}, {max}] cannot hold shifted weight {needed} (twice-m units)")]
    RegisterTooSmall { min: i32, max: i32, needed: i32 },

    #[error("charge shift leaves the space (target charge {target}); pass allow_truncation to accept a trace-decreasing family")]
    Truncation { target: i32 },

    #[error("operation requires a {expected} space")]
    UnsupportedGroup { expected: &'static str },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("channel is not a covariant unitary: {0}")]
    NotUnitary(String),

    #[error("unknown monotone `{0}`")]
    UnknownMonotone(String),

    /// Eigenvalues more negative than float noise; carries a diagnostics dump.
    #[error("numerical abort: {0}")]
    Numerical(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn fmt_sectors(sectors: &[SectorKey]) -> String {
    sectors
        .iter()
        .map(|s| s.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

pub type Result<T> = std::result::Result<T, Error>;
