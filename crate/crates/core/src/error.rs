use thiserror::Error;

/// Errors raised by the analytics, simulators and solvers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("domain error: {0}")]
    Domain(String),

    /// Price outside the open no-arbitrage interval (or unreachable within the
    /// volatility search range). Usually a noisy Monte Carlo estimate in the wings.
    #[error("price {price} outside attainable range ({lower}, {upper})")]
    OutOfBounds { price: f64, lower: f64, upper: f64 },

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("path batch holds per-path summaries only; simulate with full paths")]
    MissingPaths,

    #[error("no sign change of the zero-vanna residual in [{lo}, {hi}]")]
    BracketFailure { lo: f64, hi: f64 },

    #[error("grid index {index} out of range for {len} grid points")]
    IndexError { index: usize, len: usize },

    #[error("at rho = {rho}: {source}")]
    AtRho {
        rho: f64,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors caused by bad user input rather than numerical failure.
    pub fn is_config(&self) -> bool {
        match self {
            Error::InvalidConfig(_) => true,
            Error::AtRho { source, .. } => source.is_config(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
