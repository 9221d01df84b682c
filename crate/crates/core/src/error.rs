use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// A field or integrand produced NaN or an infinity.
    #[error("non-finite value in {context} at parameter {at}")]
    NonFinite { context: String, at: f64 },

    /// An adaptive routine exhausted its budget before reaching the requested tolerance.
    #[error("{context}: tolerance {requested:e} not reached (estimate {estimate}, error {error:e})")]
    Convergence {
        context: String,
        estimate: f64,
        error: f64,
        requested: f64,
    },

    #[error("finite-difference stencil failed at ({x}, {y}): {reason}")]
    Stencil { x: f64, y: f64, reason: String },

    #[error("point at distance {distance:e} from the current sheet (minimum {minimum:e})")]
    NearSingular { distance: f64, minimum: f64 },

    #[error("ill-conditioned geometry: {0}")]
    IllConditioned(String),

    #[error("field is not axially symmetric: A_phi varies by {spread:e} over the circle (tolerance {tol:e})")]
    NonAxisymmetric { spread: f64, tol: f64 },

    #[error("field has no declared compact support: {0}")]
    NonCompact(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("integrator failed at t = {t}: {reason}")]
    Integrator { t: f64, reason: String },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    /// Prefix the context of evaluation and convergence errors.
    pub(crate) fn within(self, outer: &str) -> Self {
        match self {
            Error::NonFinite { context, at } => Error::NonFinite {
                context: format!("{outer}: {context}"),
                at,
            },
            Error::Convergence {
                context,
                estimate,
                error,
                requested,
            } => Error::Convergence {
                context: format!("{outer}: {context}"),
                estimate,
                error,
                requested,
            },
            other => other,
        }
    }
}
