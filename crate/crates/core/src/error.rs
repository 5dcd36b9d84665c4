use thiserror::Error;

/// Errors raised by geometry, catalog, and invariant computations.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("tangent frame is not orthonormal (max deviation {deviation:e})")]
    InvalidFrame { deviation: f64 },

    #[error("degenerate chart derivative at (u, v) = ({u}, {v})")]
    DegenerateChart { u: f64, v: f64 },

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unknown surface `{0}`")]
    UnknownSurface(String),

    #[error("integration path passes within {clearance:e} of the puncture at {puncture}")]
    PathSingularity { puncture: String, clearance: f64 },

    #[error("nonzero real period {period:e} on loop {loop_index}")]
    NonzeroPeriod { loop_index: usize, period: f64 },

    #[error("sample ({u}, {v}) is too close to the domain boundary for the stencil")]
    StencilOutOfDomain { u: f64, v: f64 },

    #[error("boundary edge ({0}, {1}) is not owned by exactly one triangle")]
    UnorientedBoundary(usize, usize),

    #[error("identity not applicable: {0}")]
    NotApplicable(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("formula inconsistency: {0}")]
    FormulaInconsistency(String),

    #[error("unsupported surface: {0}")]
    UnsupportedSurface(String),
}

pub type Result<T> = std::result::Result<T, Error>;
