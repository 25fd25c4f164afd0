use num_complex::Complex64;
use thiserror::Error;

/// Errors raised anywhere in the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("integrator failed at z = {z}: {reason}")]
    Integrator { z: Complex64, reason: String },

    #[error("potential has not decayed at the grid ends (|U| = {0:.3e})")]
    UndecayedPotential(f64),

    #[error("near spectral singularity at z = {z}: |abar| = {modulus:.3e}")]
    SpectralSingularity { z: f64, modulus: f64 },

    #[error("argument principle counts {winding} zeros but {found} roots converged")]
    RootCount { winding: i64, found: usize },

    #[error("non-generic scattering data: {0}")]
    NonGeneric(String),

    #[error("ill-conditioned norming constant at z = {z}: column-ratio spread {spread:.3e}")]
    NormingSpread { z: Complex64, spread: f64 },

    #[error("singular reconstruction system at x = {x}, t = {t}")]
    SingularSystem { x: f64, t: f64 },

    #[error("iteration did not converge: residual {residual:.3e} after {iters} iterations")]
    NoConvergence { residual: f64, iters: usize },

    #[error("dual reconstructions disagree by {0:.3e}")]
    DualMismatch(f64),

    #[error("CFL condition violated: dt/h = {0:.4}")]
    Cfl(f64),

    #[error("non-finite value after step {0}")]
    NotFinite(usize),

    #[error("frame mismatch: {0}")]
    Frame(String),

    #[error("integrand not decayed at the grid ends: {0:.3e}")]
    Truncation(f64),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("decay fit needs positive samples, got {0}")]
    NonPositive(f64),

    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
