//! Error type shared by every module of the crate.

use thiserror::Error;

/// Errors produced by validation, estimation, and reconstruction.
#[derive(Debug, Error)]
pub enum MdfError {
    /// A caller-supplied argument violates a precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A matrix is not square or has inconsistent row lengths.
    #[error("shape error: {0}")]
    Shape(String),

    /// A matrix entry violates the distance-matrix invariants.
    #[error("validation error: {0}")]
    Validation(String),

    /// A required model parameter (e.g. the manifold volume) is absent.
    #[error("missing parameter: {0}")]
    MissingParameter(String),

    /// A curvature scaling factor has a non-positive denominator at the
    /// given radius; the radius is too large for the supplied curvature.
    #[error("singular scaling at r = {radius}: {detail}")]
    SingularScaling { radius: f64, detail: String },

    /// A search was given no admissible candidates.
    #[error("no admissible candidate: {0}")]
    NoCandidate(String),

    /// The neighbor graph is disconnected; one witness vertex is listed
    /// per connected component.
    #[error("graph is disconnected; component representatives: {0:?}")]
    Disconnected(Vec<usize>),

    /// A point required to lie inside the eroded domain does not.
    #[error("point {index} lies outside the eroded domain")]
    Boundary { index: usize },

    /// The erosion radius leaves an empty domain.
    #[error("erosion by {radius} empties the domain")]
    EmptyErosion { radius: f64 },

    /// Two density functions were combined despite different radius grids.
    #[error("radius grid mismatch: {0}")]
    GridMismatch(String),

    /// Filesystem failure while reading or writing CSV data.
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    /// A CSV cell could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, MdfError>;
