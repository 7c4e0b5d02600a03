use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("point is not in the open half-space: {0}")]
    OutsideHalfSpace(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    /// The weighted energy does not settle under dyadic refinement.
    #[error("non-integrable configuration: {0}")]
    NonIntegrable(String),

    /// A Gagliardo double integral grew past the configured factor under refinement.
    #[error("divergence under refinement: {0}")]
    Divergence(String),

    /// A certification record has positive difference but zero modulus or zero energy.
    #[error("structural violation: {0}")]
    StructuralViolation(String),
}

impl Error {
    /// Short machine-readable tag, used by the CLI error line.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidParams(_) => "invalid_params",
            Error::OutsideHalfSpace(_) => "outside_half_space",
            Error::InvalidGrid(_) => "invalid_grid",
            Error::Precondition(_) => "precondition",
            Error::NonIntegrable(_) => "non_integrable",
            Error::Divergence(_) => "divergence",
            Error::StructuralViolation(_) => "structural_violation",
        }
    }
}
