use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("dimension must be at least 1")]
    ZeroDimension,

    #[error("matrix is singular; the map is not dominant")]
    Singular,

    #[error("matrix is not unimodular (det = {0}), an automorphism is required")]
    NotAutomorphism(String),

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("translation has a non-torsion component; torsion points are not preserved")]
    NonTorsionTranslation,

    #[error("operation requires a pure group endomorphism (zero translation)")]
    NonzeroTranslation,

    #[error("translation level {translation} does not divide level {level}")]
    LevelMismatch { translation: u64, level: u64 },

    #[error("torsion level does not fit in 64 bits")]
    LevelOverflow,

    #[error("point budget exceeded: {points} points requested, budget {budget}")]
    BudgetExceeded { points: u128, budget: u64 },

    #[error("no qualifying prime up to {budget} ({detail})")]
    BudgetExhausted { budget: u64, detail: String },

    #[error("character system is inconsistent (empty set)")]
    InconsistentCoset,

    #[error("character rows do not span a saturated lattice; use TorsionCoset::from_equations to split into cosets")]
    NotSaturated,

    #[error("coset is not invariant under the map")]
    NotInvariant,

    #[error("invalid prime shape: {0}")]
    InvalidShape(String),

    #[error("t cannot lie in a prime of the skew Laurent ring (t is a unit)")]
    InvalidShapeForLaurent,

    #[error("internal consistency check failed: {0}")]
    Inconsistent(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
