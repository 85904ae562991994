use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("incompatible truncation depths: {0} vs {1}")]
    DepthMismatch(u32, u32),
    #[error("cannot refine a truncation: requested level {requested} exceeds depth {depth}")]
    CannotRefine { requested: u32, depth: u32 },
    #[error("invalid truncation depth {0} (must be in 1..={max})", max = crate::numbers::MAX_DEPTH)]
    InvalidDepth(u32),
    #[error("non-finite leaf coordinate {0}")]
    NonFinite(f64),
    #[error("character {0} not resolvable at this depth (K = {1})")]
    Unresolvable(String, u32),
    #[error("invalid rational {0:?}")]
    ParseRational(String),
    #[error("invalid displacement: {0}")]
    InvalidDisplacement(String),
    #[error("unknown {kind} {name:?}")]
    UnknownStrategy { kind: &'static str, name: String },
    #[error("Haar invariance not guaranteed; use Birkhoff estimator")]
    HaarNotInvariant,
    #[error("map is not a pure translation")]
    NotTranslation,
    #[error("map is not isotopic to the identity (translation part is nonzero)")]
    NotIsotopicToIdentity,
    #[error("map does not factor through level {0}")]
    DoesNotFactor(u32),
    #[error("negative time: backward cocycles are not supported")]
    NegativeTime,
    #[error("point is not fixed (|phi| = {0:e})")]
    NotFixed(f64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("serialization: {0}")]
    Serde(String),
}

pub type Result<T> = std::result::Result<T, Error>;
