use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors raised across the engine.
///
/// Variants are grouped by the stable CLI exit-code contract:
/// [`Error::is_validation`] distinguishes bad input from numeric failure.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("calibration error: mean difficulty {0} outside (0, 1]")]
    Calibration(f64),

    #[error("ROI undefined: direct plus future costs are zero")]
    UndefinedRoi,

    #[error("design error: {0}")]
    Design(String),

    #[error("constraint error: {0}")]
    Constraint(String),

    #[error("search space of {size} programs exceeds the ceiling of {ceiling}")]
    SearchSpaceTooLarge { size: u128, ceiling: u128 },

    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("unresolved reference: {kind} {id} is not defined")]
    UnresolvedReference { kind: &'static str, id: String },

    #[error("invariant violation [{rule}]: {detail}")]
    Invariant { rule: &'static str, detail: String },

    #[error("unsupported schema version {0:?} (supported major version: 1)")]
    SchemaVersion(String),

    #[error("numeric failure: {0}")]
    Numeric(String),
}

impl Error {
    pub(crate) fn invariant(rule: &'static str, detail: impl Into<String>) -> Self {
        Error::Invariant {
            rule,
            detail: detail.into(),
        }
    }

    pub(crate) fn unresolved(kind: &'static str, id: impl ToString) -> Self {
        Error::UnresolvedReference {
            kind,
            id: id.to_string(),
        }
    }

    /// True for errors caused by invalid input (files, flags, designs,
    /// constraints) rather than by a failure during computation.
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::UndefinedRoi | Error::Numeric(_))
    }
}
