//! At-the-money and zero-vanna implied volatilities from Monte Carlo prices.

use log::warn;

use crate::error::{Error, Result};
use crate::gauss_bs::{implied_vol, BsQuote};
use crate::mc::{ConditionalSmile, Estimate};
use crate::roots::brent;
use crate::sabr::PathBatch;

/// Largest accepted `|d₂(k̂, I(k̂))|`.
pub const RESIDUAL_TOL: f64 = 1e-10;
/// Bracket search half-width, in units of `σ₀√T`.
const BRACKET_WIDTH: f64 = 6.0;
const MAX_ITER: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmileSolution {
    /// At-the-money log strike (the log spot).
    pub k_star: f64,
    pub atmi: Estimate,
    /// Zero-vanna log strike.
    pub k_hat: f64,
    pub zviv: Estimate,
    pub iterations: usize,
    pub residual: f64,
}

/// Implied volatility of a price estimate, with delta-method standard error.
fn implied_estimate(price: Estimate, x: f64, k: f64, horizon: f64) -> Result<Estimate> {
    let sigma = implied_vol(price.value, x, k, horizon)?;
    let vega = BsQuote::new(x, k, horizon, sigma).vega();
    Ok(Estimate { value: sigma, std_error: price.std_error / vega, n: price.n })
}

fn atmi_on(smile: &ConditionalSmile) -> Result<Estimate> {
    let k = smile.x0();
    implied_estimate(smile.call_price(k), smile.x0(), k, smile.horizon())
}

/// `d₂(k, I(k))` on the conditional smile.
fn zero_vanna_residual(smile: &ConditionalSmile, k: f64) -> Result<f64> {
    let t = smile.horizon();
    let iv = implied_vol(smile.call_price(k).value, smile.x0(), k, t)?;
    let s = iv * t.sqrt();
    Ok((smile.x0() - k) / s - 0.5 * s)
}

/// ATM implied volatility of the mixing price at `k = x0`.
pub fn atmi(batch: &PathBatch, rho: f64) -> Result<Estimate> {
    atmi_on(&ConditionalSmile::new(batch, rho)?)
}

/// Solves `d₂(k, I(k)) = 0` on the batch with Brent's method; every trial
/// strike reprices the same paths.
pub fn zero_vanna(batch: &PathBatch, rho: f64) -> Result<SmileSolution> {
    let smile = ConditionalSmile::new(batch, rho)?;
    zero_vanna_on(&smile, batch.sigma0())
}

fn zero_vanna_on(smile: &ConditionalSmile, sigma0: f64) -> Result<SmileSolution> {
    let x0 = smile.x0();
    let t = smile.horizon();
    let atm = atmi_on(smile)?;
    let guess = x0 - 0.5 * atm.value * atm.value * t;

    let reach = BRACKET_WIDTH * sigma0 * t.sqrt();
    let (min_k, max_k) = (x0 - reach, x0 + reach);
    let g = |k: f64| zero_vanna_residual(smile, k);

    let mut step = 0.05 * sigma0 * t.sqrt();
    let mut lo = (guess - step).max(min_k);
    let mut hi = (guess + step).min(max_k);
    let mut g_lo = g(lo)?;
    let mut g_hi = g(hi)?;
    while g_lo.signum() == g_hi.signum() && g_lo != 0.0 && g_hi != 0.0 {
        if lo <= min_k && hi >= max_k {
            return Err(Error::BracketFailure { lo, hi });
        }
        step *= 2.0;
        // the residual decreases in k on realistic smiles
        if g_lo > 0.0 && hi < max_k {
            hi = (guess + step).min(max_k);
            g_hi = g(hi)?;
        } else if g_lo < 0.0 && lo > min_k {
            lo = (guess - step).max(min_k);
            g_lo = g(lo)?;
        } else {
            lo = (guess - step).max(min_k);
            hi = (guess + step).min(max_k);
            g_lo = g(lo)?;
            g_hi = g(hi)?;
        }
    }
    if g_lo < 0.0 && g_hi > 0.0 {
        warn!(
            "zero-vanna residual increases across [{lo}, {hi}] at rho = {}; smile may admit several roots",
            smile.rho()
        );
    }

    let root = brent(g, lo, hi, 1e-12, MAX_ITER)?;
    let residual = root.fx.abs();
    if residual > RESIDUAL_TOL {
        return Err(Error::NoConvergence { iterations: root.iterations, residual });
    }
    let zviv = implied_estimate(smile.call_price(root.x), x0, root.x, t)?;
    Ok(SmileSolution { k_star: x0, atmi: atm, k_hat: root.x, zviv, iterations: root.iterations, residual })
}
