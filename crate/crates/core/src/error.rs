use thiserror::Error;

use crate::diagram::MatrixUnit;

pub type Result<T, E = TafError> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TafError {
    /// A reference points outside the presentation (bad level, summand or position).
    #[error("structural error: {0}")]
    Structural(String),
    #[error("level {level} is out of range 1..={depth}")]
    LevelOutOfRange { level: usize, depth: usize },
    #[error("invalid matrix unit {0}")]
    InvalidUnit(MatrixUnit),
    #[error("units at mixed levels passed to a single-level operation")]
    MixedLevels,
    #[error("generator at level {level} exceeds depth {depth}")]
    GeneratorAboveDepth { level: usize, depth: usize },
    #[error("ideal tables belong to different presentations")]
    MismatchedPresentation,
    #[error("presentation carries no stationary template")]
    MissingTemplate,
    #[error("invalid template: {0}")]
    InvalidTemplate(String),
    #[error("horizon must be at least 1 (got {0})")]
    InvalidHorizon(usize),
    #[error("table is not a valid ideal table: {0}")]
    InvalidTable(String),
    #[error("oracle instance too large: {0}")]
    OracleTooLarge(String),
    #[error("envelope is not primitive: {0}")]
    NotPrimitive(String),
    #[error("no envelope arm connects the path nodes at level {0} and the next")]
    NoConnectingArm(usize),
    #[error("characteristic chain violates the mi-chain conditions: {0}")]
    ChainConsistency(String),
    #[error("envelope node at level {0} on the path is not kept")]
    NodeNotKept(usize),
    #[error("requested path length {requested} exceeds available levels {available}")]
    PathTooLong { requested: usize, available: usize },
}
