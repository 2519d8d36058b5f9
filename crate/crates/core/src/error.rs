use num_complex::Complex64;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("degenerate curve: |z'(t)| = {speed:e} at t = {t}")]
    DegenerateCurve { t: f64, speed: f64 },

    #[error("point {0} is within the boundary-ambiguous band")]
    BoundaryAmbiguous(Complex64),

    #[error("point {0} is not an interior point of the domain")]
    NotInterior(Complex64),

    #[error("integrand {0} is not square-integrable on the domain")]
    NotIntegrable(String),

    #[error("{what} failed with {nodes} boundary nodes: {detail}")]
    SolverFailure {
        what: &'static str,
        nodes: usize,
        detail: String,
    },

    #[error("evaluation point {z} is within {distance:e} of the pole {w}")]
    PoleProximity {
        z: Complex64,
        w: Complex64,
        distance: f64,
    },

    #[error("rank-deficient least-squares system (singular value ratio {ratio:e})")]
    RankDeficient { ratio: f64 },

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("operation not supported for this domain: {0}")]
    Unsupported(String),
}
