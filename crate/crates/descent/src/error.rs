use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DescentError {
    #[error("degenerate curve: {0}")]
    DegenerateCurve(String),
    #[error("no ordinary presentation at 2: {0}")]
    NotOrdinaryPresentation(String),
    #[error("inadmissible shift {beta}: {reason}")]
    BadShift { beta: i64, reason: String },
    #[error("precision exhausted at {bits} bits: {context}")]
    PrecisionExhausted { bits: u32, context: String },
    #[error("Hensel lifting failed: {0}")]
    HenselFailure(String),
    #[error("element is not a square")]
    NotASquare,
    #[error("Frobenius sign resolution failed for index {0}")]
    InconsistentSigns(usize),
    #[error("schema error: {0}")]
    Schema(String),
    #[error("certificate does not match the curve: {0}")]
    CurveMismatch(String),
    #[error("basis element {element} vanishes on a component: {detail}")]
    ComponentVanishes { element: usize, detail: String },
    #[error("certificate metadata lacks a rank bound")]
    MissingRank,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("subspace basis is linearly dependent")]
    DependentSubspace,
    #[error("polynomial is reducible over F2")]
    ReducibleModulus,
    #[error("I/O error: {0}")]
    Io(String),
}

/// Coarse classes used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    Schema,
    MathPrecondition,
    PrecisionExhausted,
}

impl ErrorCategory {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorCategory::Schema => 2,
            ErrorCategory::MathPrecondition => 3,
            ErrorCategory::PrecisionExhausted => 4,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ErrorCategory::Schema => "schema",
            ErrorCategory::MathPrecondition => "math-precondition",
            ErrorCategory::PrecisionExhausted => "precision-exhausted",
        }
    }
}

impl DescentError {
    pub fn category(&self) -> ErrorCategory {
        use DescentError::*;
        match self {
            Schema(_) | CurveMismatch(_) | MissingRank | Io(_) => ErrorCategory::Schema,
            PrecisionExhausted { .. } | InconsistentSigns(_) => ErrorCategory::PrecisionExhausted,
            _ => ErrorCategory::MathPrecondition,
        }
    }

    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        use DescentError::*;
        match self {
            DegenerateCurve(_) => "DegenerateCurve",
            NotOrdinaryPresentation(_) => "NotOrdinaryPresentation",
            BadShift { .. } => "BadShift",
            PrecisionExhausted { .. } => "PrecisionExhausted",
            HenselFailure(_) => "HenselFailure",
            NotASquare => "NotASquare",
            InconsistentSigns(_) => "InconsistentSigns",
            Schema(_) => "SchemaError",
            CurveMismatch(_) => "CurveMismatch",
            ComponentVanishes { .. } => "ComponentVanishes",
            MissingRank => "MissingRank",
            DimensionMismatch { .. } => "DimensionMismatch",
            DependentSubspace => "DependentSubspace",
            ReducibleModulus => "ReducibleModulus",
            Io(_) => "IoError",
        }
    }

    /// Whether a rerun at higher precision can help.
    pub fn is_precision_related(&self) -> bool {
        self.category() == ErrorCategory::PrecisionExhausted
    }

    pub(crate) fn precision(bits: u32, context: impl Into<String>) -> Self {
        DescentError::PrecisionExhausted { bits, context: context.into() }
    }
}

pub type Result<T> = std::result::Result<T, DescentError>;
