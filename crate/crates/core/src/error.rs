use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("gap closed: min |h(k)| = {0:e}")]
    GapClosed(f64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("no in-gap state found")]
    NoInGapState,
    #[error("no dressed state: largest emitter weight {0:.3e} below threshold")]
    NoDressedState(f64),
    #[error("system too large for exhaustive search: N = {0}")]
    TooLarge(usize),
    #[error("divergent lattice sum: {0}")]
    Divergent(String),
    #[error("not converged after {iters} iterations (residual {residual:e})")]
    NotConverged { iters: usize, residual: f64 },
    #[error("unsupported kernel: {0}")]
    UnsupportedKernel(String),
    #[error("too few points for fit: {0}")]
    TooFewPoints(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
