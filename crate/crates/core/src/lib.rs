//! Lognormal SABR analytics and Monte Carlo machinery for comparing the
//! zero-vanna implied volatility (ZVIV) and the at-the-money implied
//! volatility (ATMI) against the volatility swap strike.
//!
//! * [`gauss_bs`]: normal distribution, Black-Scholes call, vega, implied vol.
//! * [`sabr`]: model parameters, moments, reproducible volatility paths.
//! * [`mc`]: volatility swap, mixing and Euler call prices, Malliavin functionals.
//! * [`asymptotics`]: closed-form short-maturity functionals and bounds.
//! * [`smile`]: ATMI and zero-vanna strike solvers.
//! * [`experiments`]: correlation sweeps, TSV output and the verification report.

// `!(x > 0.0)` also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod error;
pub mod experiments;
pub mod gauss_bs;
pub mod mc;
pub mod quadrature;
pub mod roots;
pub mod sabr;
pub mod smile;
mod stats;

pub use error::{Error, Result};
pub use gauss_bs::{implied_vol, normal_cdf, normal_pdf, BsQuote};
pub use mc::{
    euler_oracle_price, malliavin_functionals, mixing_call_price, volswap_strike, ConditionalSmile, Estimate,
    MalliavinEstimates,
};
pub use sabr::{simulate_full_paths, simulate_paths, PathBatch, SabrParams};
pub use smile::{atmi, zero_vanna, SmileSolution};
pub use stats::CHUNK;
