use thiserror::Error;

/// Failures from geometric primitives.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeometryError {
    #[error("rectangle has a zero-length side")]
    Degenerate,
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("axis {axis} out of range for dimension {dim}")]
    AxisOutOfRange { axis: usize, dim: usize },
    #[error("split position {0} is not strictly inside the side")]
    SplitOutOfRange(String),
    #[error("interval [{0}, {1}) has lo > hi")]
    InvertedInterval(String, String),
    #[error("rectangle needs at least one side")]
    Empty,
}

/// Failures while building or querying a density.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DensityError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("rectangle {0} is not inside the domain")]
    OutsideDomain(String),
    #[error("axis {axis}: expected {expected} cells, got {got}")]
    CellCount { axis: usize, expected: usize, got: usize },
    #[error("expected {expected} values, got {got}")]
    ValueCount { expected: usize, got: usize },
    #[error("axis {0}: cell edges must run strictly increasing from domain lo to domain hi")]
    BadEdges(usize),
    #[error("weight values must be nonnegative")]
    NegativeWeight,
    #[error("every axis needs at least one cell")]
    NoCells,
}

/// Failures of the decomposition engines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecomposeError {
    #[error(transparent)]
    Density(#[from] DensityError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("level below domain mean: mean(I_0) = {mean} > A = {level}")]
    LevelBelowMean { mean: String, level: String },
    #[error("total measure of the domain is zero")]
    ZeroTotalMeasure,
    #[error("stopping policy needs min_side > 0 or a finite max_depth")]
    UnboundedPolicy,
    #[error("stopping policy field is invalid: {0}")]
    InvalidPolicy(&'static str),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("expected a one-dimensional density, got dimension {0}")]
    NotOneDimensional(usize),
    #[error("domain is not a cube")]
    NotCube,
    #[error("density has negative values; the cube decomposition requires f >= 0")]
    NegativeDensity,
    #[error("the cube decomposition requires Lebesgue measure (w = 1 everywhere)")]
    NonLebesgue,
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

/// Failures while reading the text formats.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("not a number: {0:?}")]
    BadNumber(String),
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("missing {0}")]
    Missing(&'static str),
    #[error(transparent)]
    Density(#[from] DensityError),
}

impl ParseError {
    pub(crate) fn at(line: usize, message: impl Into<String>) -> Self {
        ParseError::Syntax { line, message: message.into() }
    }
}
