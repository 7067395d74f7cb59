use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    /// Round-trip operator has an eigenvalue at or beyond 1, or the
    /// factorization of `I - N` broke down.
    #[error("geometry too close or discretization insufficient: {0}")]
    Proximity(String),

    #[error("assembly produced a complex log-determinant (imaginary part {imag:e})")]
    Assembly { imag: f64 },

    /// The zero Matsubara term is not trace class for Dirichlet-type fields.
    #[error("non-trace-class zero mode for {field}: use the force route")]
    NonTraceClass { field: String },

    #[error("quadrature did not reach tolerance {tol:e} (estimated error {estimate:e})")]
    Quadrature { tol: f64, estimate: f64 },

    #[error("no convergence after {steps} refinement steps: {diagnostics}")]
    Convergence { steps: u32, diagnostics: String },

    #[error("multiple-scattering series does not decrease at order {order}")]
    Divergence { order: usize },
}

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
