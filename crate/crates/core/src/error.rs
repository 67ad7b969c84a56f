use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unresolved symbol `{0}` in scalar expression")]
    UnresolvedSymbol(String),

    #[error("zeta index {0} out of range (need k >= 2)")]
    ZetaIndex(u32),

    #[error("ring mismatch: `{left}` vs `{right}`")]
    RingMismatch { left: String, right: String },

    #[error("ring map {map}: relation `{relation}` does not map to zero")]
    RelationViolation { map: String, relation: String },

    #[error("singular matrix: {0}")]
    Singular(String),

    #[error("non-integral Euler pairing {0}")]
    NonIntegral(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("branch inconsistency: |exp(log z) - z| = {0}")]
    Branch(String),

    #[error("QDE residue nonzero at order q^{order}")]
    QdeResidue { order: usize },

    #[error("path passes within {distance} of singular point {point}")]
    PathTooClose { point: String, distance: String },

    #[error("step-size underflow near q = {0}")]
    StepUnderflow(String),

    #[error("ill-conditioned frame (condition number {0})")]
    IllConditioned(String),

    #[error("parse error: {0}")]
    Parse(String),
}
