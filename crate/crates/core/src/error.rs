use std::fmt;

use crate::core_types::Violation;

/// Everything that can go wrong in the library and the CLI.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("degenerate denominator: {0}")]
    Degenerate(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("transfer matrix carries no information: every coefficient is zero")]
    NoInformation,

    #[error("under-determined calibration for support row(s): {}", .rows.join(", "))]
    Underdetermined { rows: Vec<String> },

    #[error("{quantity} = {value} outside tabulated range [{low}, {high}]")]
    OutOfRange {
        quantity: String,
        value: f64,
        low: f64,
        high: f64,
    },

    #[error("{0}")]
    NoConvergence(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("scenario validation failed:\n{}", ViolationList(.0))]
    Validation(Vec<Violation>),

    #[error("dangling {kind} reference(s): {}", .ids.join(", "))]
    DanglingReference { kind: &'static str, ids: Vec<String> },

    #[error("usage: {0}")]
    Usage(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("csv output error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Process exit status for the CLI.
    ///
    /// `1` usage, `2` scenario (parse, reference, validation, input range),
    /// `3` numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) => 1,
            Error::Parse { .. }
            | Error::Validation(_)
            | Error::DanglingReference { .. }
            | Error::InvalidInput(_)
            | Error::DimensionMismatch(_)
            | Error::OutOfRange { .. }
            | Error::Io { .. } => 2,
            Error::Degenerate(_)
            | Error::NoInformation
            | Error::Underdetermined { .. }
            | Error::NoConvergence(_)
            | Error::Csv(_) => 3,
        }
    }
}

struct ViolationList<'a>(&'a [Violation]);

impl fmt::Display for ViolationList<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "  - {v}")?;
        }
        Ok(())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
