use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input violated a documented invariant; the message names it.
    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("field point coincides with the source charge at ({x}, {y}, {z})")]
    CoincidentPoints { x: f64, y: f64, z: f64 },

    #[error(
        "{what} did not converge: best value {best_value:e}, achieved error {achieved_error:e} \
         (target {target:e}): {reason}"
    )]
    NotConverged { what: String, best_value: f64, achieved_error: f64, target: f64, reason: String },
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub fn is_convergence_failure(&self) -> bool {
        matches!(self, Error::NotConverged { .. })
    }
}
