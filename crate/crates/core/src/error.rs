use thiserror::Error;

use crate::array_model::ValidationReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("array specification is invalid: {0}")]
    Validation(ValidationReport),

    #[error(
        "ill-conditioned spectrum: eigenvalues {a} and {b} are {gap:.3e} apart, \
         within [tol_eig, 2 tol_eig) = [{tol:.3e}, {tol2:.3e}); retry with a different eig tolerance",
        tol2 = 2.0 * tol
    )]
    IllConditionedSpectrum { a: String, b: String, gap: f64, tol: f64 },

    #[error("inconsistent spectrum at mu = {mu}: {detail}")]
    InconsistentSpectrum { mu: String, detail: String },

    #[error("invariant subspace residual {residual:.3e} exceeds {tol:.3e} at mu = {mu}")]
    InvarianceViolation { mu: String, residual: f64, tol: f64 },

    #[error("feasibility solver exceeded {0} iterations")]
    SolverFailure(usize),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("internal consistency check failed: {0}")]
    InternalConsistency(String),

    #[error("cannot render as scalar-edge graph: {0}")]
    UnsupportedRender(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Errors that signal numerical breakdown rather than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::IllConditionedSpectrum { .. }
                | Error::InconsistentSpectrum { .. }
                | Error::InvarianceViolation { .. }
                | Error::SolverFailure(_)
                | Error::InternalConsistency(_)
        )
    }
}
