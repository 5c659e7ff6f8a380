use thiserror::Error;

/// Errors raised by the solver, the energy evaluation and the optimizer.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("grid spacing must be positive, got {0}")]
    NonPositiveSpacing(f64),
    #[error("grid spacing {h} is coarser than half the shortest box side {min_extent}")]
    SpacingTooCoarse { h: f64, min_extent: f64 },
    #[error("unsupported dimension {0} (expected 1, 2 or 3)")]
    InvalidDimension(usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("cell index out of range")]
    CellOutOfRange,
    #[error("polygon is degenerate or self-intersecting")]
    SelfIntersectingPolygon,
    #[error("polygon is not convex")]
    NotConvex,
    #[error("probe ball contains no cells")]
    EmptyBall,
    #[error("support is empty")]
    EmptySupport,
    #[error("Robin parameter must be positive, got {0}")]
    NonPositiveBeta(f64),
    #[error("function is identically zero")]
    ZeroFunction,
    #[error("support has {components} connected components")]
    NotConnected { components: usize },
    #[error("eigensolver did not converge within {0} iterations")]
    NoConvergence(usize),
    #[error("eigenvector has a negative entry {value} beyond the clamping threshold")]
    SignPatternViolation { value: f64 },
    #[error("phase field has negative or non-finite value {0}")]
    InvalidFieldValue(f64),
    #[error("phase field has zero mass")]
    ZeroMass,
    #[error("phase {phase} has zero mass")]
    ZeroMassPhase { phase: usize },
    #[error("phases {first} and {second} overlap at cell {cell}")]
    DisjointnessViolation {
        cell: usize,
        first: usize,
        second: usize,
    },
    #[error("cannot fit {k} phases of at least {min_cells} cells into {available} cells")]
    TooManyPhases {
        k: usize,
        min_cells: usize,
        available: usize,
    },
    #[error("phase {phase} has a disconnected support")]
    DisconnectedPhase { phase: usize },
    #[error("ball of radius {radius} does not fit in the box")]
    Containment { radius: f64 },
    #[error("probe point set is empty")]
    EmptyProbeSet,
    #[error("grid mismatch between operands")]
    GridMismatch,
    #[error("i/o error: {0}")]
    Io(String),
    #[error("malformed input: {0}")]
    Format(String),
}

impl Error {
    /// True for errors caused by invalid input, configuration or files, as
    /// opposed to numerical failures.
    pub fn is_config_error(&self) -> bool {
        !matches!(
            self,
            Error::NoConvergence(_) | Error::SignPatternViolation { .. } | Error::DisconnectedPhase { .. }
        )
    }

    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NonPositiveSpacing(_) => "NonPositiveSpacing",
            Error::SpacingTooCoarse { .. } => "SpacingTooCoarse",
            Error::InvalidDimension(_) => "InvalidDimension",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::InvalidParameter { .. } => "InvalidParameter",
            Error::CellOutOfRange => "CellOutOfRange",
            Error::SelfIntersectingPolygon => "SelfIntersectingPolygon",
            Error::NotConvex => "NotConvex",
            Error::EmptyBall => "EmptyBall",
            Error::EmptySupport => "EmptySupport",
            Error::NonPositiveBeta(_) => "NonPositiveBeta",
            Error::ZeroFunction => "ZeroFunction",
            Error::NotConnected { .. } => "NotConnected",
            Error::NoConvergence(_) => "NoConvergence",
            Error::SignPatternViolation { .. } => "SignPatternViolation",
            Error::InvalidFieldValue(_) => "InvalidFieldValue",
            Error::ZeroMass => "ZeroMass",
            Error::ZeroMassPhase { .. } => "ZeroMassPhase",
            Error::DisjointnessViolation { .. } => "DisjointnessViolation",
            Error::TooManyPhases { .. } => "TooManyPhases",
            Error::DisconnectedPhase { .. } => "DisconnectedPhase",
            Error::Containment { .. } => "Containment",
            Error::EmptyProbeSet => "EmptyProbeSet",
            Error::GridMismatch => "GridMismatch",
            Error::Io(_) => "Io",
            Error::Format(_) => "Format",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
