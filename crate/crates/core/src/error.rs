use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("cannot parse spectral function `{0}`: {1}")]
    Parse(String, String),

    #[error("circulant of size {size} cannot hold a degree-{degree} symbol (need size > {})", 2 * .degree)]
    SizeTooSmall { size: usize, degree: usize },

    #[error("symbol is critical (min = {min:e}); light-cone quantities are undefined")]
    CriticalSymbol { min: f64 },

    #[error("symbol `{name}` is not positive: min = {min:e}")]
    NonPositiveSymbol { name: &'static str, min: f64 },

    #[error("Riccati integration diverged at t = {t} (|a| = {magnitude:e}); reduce the step size below {dt}")]
    Divergence { t: f64, dt: f64, magnitude: f64 },

    #[error("invalid cut n = {n} for a chain of {size} sites")]
    InvalidCut { n: usize, size: usize },

    #[error("matrix is ill-conditioned (condition estimate {0:e})")]
    IllConditioned(f64),

    #[error("{0} is not positive definite")]
    NotPositiveDefinite(&'static str),

    #[error("unphysical covariance: symplectic eigenvalue {0} < 1/2")]
    Unphysical(f64),

    #[error("global state is not pure: symplectic eigenvalue {0} deviates from 1/2")]
    NotPure(f64),

    #[error("internal consistency check `{check}` failed: deviation {deviation:e} > {tolerance:e}")]
    Inconsistent {
        check: &'static str,
        deviation: f64,
        tolerance: f64,
    },

    #[error("Fourier quadrature did not converge (last change {change:e} at {points} points)")]
    QuadratureNotConverged { points: usize, change: f64 },

    #[error("Szego tail criterion unmet at k_max = {k_max} (tail {tail:e}); try k_max = {suggested}")]
    TailNotConverged {
        k_max: usize,
        tail: f64,
        suggested: usize,
    },

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),
}

pub type Result<T> = std::result::Result<T, Error>;
