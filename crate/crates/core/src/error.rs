use thiserror::Error;

use crate::terrain::GeneralPositionReport;

#[derive(Debug, Error)]
pub enum Error {
    #[error("terrain is not x-monotone: vertex {index} has x <= previous vertex")]
    NotMonotone { index: usize },
    #[error("terrain needs at least two vertices, got {0}")]
    TooFewVertices(usize),
    #[error("viewpoint index {0} is out of range")]
    ViewpointOutOfRange(usize),
    #[error("viewpoint set is empty")]
    NoViewpoints,
    #[error("duplicate viewpoint index {0}")]
    DuplicateViewpoint(usize),
    #[error("sight radius must be positive")]
    NonPositiveRadius,
    #[error("viewpoints coincide; bisector undefined")]
    DegenerateBisector,
    #[error("abscissa {0} lies outside the terrain")]
    OutOfRange(String),
    #[error("instance violates general position:\n{0}")]
    GeneralPosition(GeneralPositionReport),
    #[error("maps are defined over different domains")]
    DomainMismatch,
    #[error("operation requires unlimited sight")]
    LimitedSightUnsupported,
    #[error("invalid generator parameters: {0}")]
    InvalidParameters(String),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
