use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("malformed linear program: {0}")]
    MalformedProgram(String),
    #[error("empty input: {0}")]
    EmptyInput(String),
    #[error("unit ball is not symmetric: {0}")]
    NotSymmetric(String),
    #[error("unit ball is not full-dimensional (seminorm): {0}")]
    NotFullDimensional(String),
    #[error("polytope is unbounded")]
    UnboundedPolytope,
    #[error("degenerate system: {0}")]
    DegenerateSystem(String),
    #[error("dimension {dim} exceeds the geometry cap {cap}")]
    DimensionCapExceeded { dim: usize, cap: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("map norm {norm} exceeds 1")]
    NormTooLarge { norm: String },
    #[error("square is not eps-commutative: distance {distance} > {eps}")]
    NotEpsCommutative { distance: String, eps: String },
    #[error("stage {stage} out of range for a chain with {len} spaces")]
    StageOutOfRange { stage: usize, len: usize },
    #[error("map is not an isometry: {0}")]
    NotAnIsometry(String),
    #[error("square does not commute")]
    SquareNotCommuting,
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("syntax error at {line}:{column}: {message}")]
    SyntaxError {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unknown variable `{name}` at {line}:{column}")]
    ScopeError {
        name: String,
        line: usize,
        column: usize,
    },
    #[error("assignment vector is not in the subspace")]
    AssignmentNotInSubspace,
    #[error("embedding is an ideal; no distinguishing formula exists")]
    IsActuallyIdeal,
}

impl Error {
    /// Stable variant name, printed by the CLI on standard error.
    pub fn name(&self) -> &'static str {
        match self {
            Error::Parse(_) => "ParseError",
            Error::MalformedProgram(_) => "MalformedProgram",
            Error::EmptyInput(_) => "EmptyInput",
            Error::NotSymmetric(_) => "NotSymmetric",
            Error::NotFullDimensional(_) => "NotFullDimensional",
            Error::UnboundedPolytope => "UnboundedPolytope",
            Error::DegenerateSystem(_) => "DegenerateSystem",
            Error::DimensionCapExceeded { .. } => "DimensionCapExceeded",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::NormTooLarge { .. } => "NormTooLarge",
            Error::NotEpsCommutative { .. } => "NotEpsCommutative",
            Error::StageOutOfRange { .. } => "StageOutOfRange",
            Error::NotAnIsometry(_) => "NotAnIsometry",
            Error::SquareNotCommuting => "SquareNotCommuting",
            Error::PreconditionViolated(_) => "PreconditionViolated",
            Error::SyntaxError { .. } => "SyntaxError",
            Error::ScopeError { .. } => "ScopeError",
            Error::AssignmentNotInSubspace => "AssignmentNotInSubspace",
            Error::IsActuallyIdeal => "IsActuallyIdeal",
        }
    }

    /// Parse failures are input errors; everything else is a domain error.
    pub fn is_parse(&self) -> bool {
        matches!(
            self,
            Error::Parse(_) | Error::SyntaxError { .. } | Error::ScopeError { .. }
        )
    }

    pub(crate) fn mismatch(expected: usize, found: usize) -> Self {
        Error::DimensionMismatch { expected, found }
    }
}
