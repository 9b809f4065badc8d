use thiserror::Error;

/// Errors raised by the geometry kernel, the data model and the solver.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("mask has no foreground pixel")]
    EmptyMask,
    #[error("boundary tangent is degenerate at index {0}")]
    DegenerateTangent(usize),
    #[error("points are degenerate: {0}")]
    DegeneratePoints(&'static str),
    #[error("segment rasterizes to no on-canvas pixel")]
    OffCanvas,
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("invalid detections: {0}")]
    InvalidDetections(String),
    #[error("ground-truth graph does not fit the canvas")]
    GraphOffCanvas,
    #[error("program has {0} binary variables, above the enumeration cap of {1}")]
    TooLarge(usize, usize),
    #[error("assignment is missing variable {0}")]
    MissingVariable(String),
    #[error("unsupported program structure: {0}")]
    Unsupported(String),
    #[error("prediction and ground-truth lists differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("malformed input: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
