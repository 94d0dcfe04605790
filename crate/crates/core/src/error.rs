use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed textual input; the message names the offending token.
    #[error("parse error: {0}")]
    Parse(String),

    /// Well-formed input that violates an algebraic invariant.
    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("graded Hopf formula requires homogeneous relators")]
    Inhomogeneous,

    #[error("omega is not closed: d(omega) = {0}")]
    NotClosed(String),

    #[error("relator monomial {monomial} has degree {degree}, exceeding the bound {max}")]
    DegreeExceeded {
        monomial: String,
        degree: usize,
        max: usize,
    },

    #[error("connection is not flat: {0}")]
    NotFlat(String),

    /// A check that must hold by construction failed.
    #[error("consistency check failed: {0}")]
    Consistency(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn is_parse(&self) -> bool {
        matches!(self, Error::Parse(_) | Error::Json(_))
    }
}
