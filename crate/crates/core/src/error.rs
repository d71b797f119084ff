use thiserror::Error;

/// Errors raised by the numerical routines in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain where the operation is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// A derivative-field index outside `0..=N`.
    #[error("index {index} out of range 0..={max}")]
    Index { index: usize, max: usize },

    /// Two points coincide where the kernel is singular.
    #[error("singular configuration: {0}")]
    Singularity(String),

    /// A quadrature rule failed to reach the requested accuracy.
    #[error("quadrature failed to converge: {0}")]
    Quadrature(String),

    /// A discrete operator could not be built on the given grid.
    #[error("assembly error: {0}")]
    Assembly(String),

    /// A field does not satisfy the boundary data required by an operator.
    #[error("boundary condition violated: {0}")]
    BoundaryCondition(String),

    /// A dense or banded linear solve hit a singular matrix.
    #[error("linear solve failed: {0}")]
    LinearSolve(String),

    /// Least-squares concentration fit could not be carried out.
    #[error("fit failed: {0}")]
    Fit(String),

    /// A field that must be non-negative has negative entries.
    #[error("negative input: {0}")]
    NegativeInput(String),

    /// A sequence argument violates an ordering or length requirement.
    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
