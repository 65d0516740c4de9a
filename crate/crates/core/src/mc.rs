//! Monte Carlo estimators on a simulated volatility batch.
//!
//! Option prices use the conditional (mixing) representation: given the
//! volatility path, the log spot is Gaussian with mean
//! `x0 + ρ∫σdW - ρ²Y/2` and variance `(1-ρ²)Y`, so each path contributes a
//! Black-Scholes price instead of a payoff.

use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::gauss_bs::call_with_total_vol;
use crate::sabr::{path_rng, spot_rng, PathBatch, SabrParams, VolStepper};
use crate::stats::{chunked_estimate, chunked_estimates};

pub use crate::stats::Estimate;

/// Volatility swap fair strike `E[√(Y/T)]`.
pub fn volswap_strike(batch: &PathBatch) -> Estimate {
    let ys = batch.integrated_variance();
    let inv_t = 1.0 / batch.horizon();
    chunked_estimate(ys.len(), |i| (ys[i] * inv_t).sqrt())
}

/// Conditional Black-Scholes inputs of one batch at a fixed correlation.
///
/// Repricing at many strikes reuses the per-path log spots and total
/// volatilities, which is what the smile solvers do.
#[derive(Debug, Clone)]
pub struct ConditionalSmile {
    rho: f64,
    x0: f64,
    horizon: f64,
    log_spot: Vec<f64>,
    spot: Vec<f64>,
    total_vol: Vec<f64>,
}

impl ConditionalSmile {
    pub fn new(batch: &PathBatch, rho: f64) -> Result<Self> {
        if !(-1.0..=1.0).contains(&rho) {
            return Err(Error::InvalidConfig(format!("rho must lie in [-1, 1], got {rho}")));
        }
        let ys = batch.integrated_variance();
        let iw = batch.stochastic_integral();
        let x0 = batch.x0();
        let residual = (1.0 - rho * rho).max(0.0);
        let log_spot: Vec<f64> = ys.iter().zip(iw).map(|(y, w)| x0 + rho * w - 0.5 * rho * rho * y).collect();
        let spot = log_spot.iter().map(|x| x.exp()).collect();
        let total_vol = ys.iter().map(|y| (residual * y).sqrt()).collect();
        Ok(Self { rho, x0, horizon: batch.horizon(), log_spot, spot, total_vol })
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn len(&self) -> usize {
        self.log_spot.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log_spot.is_empty()
    }

    /// Call price at log strike `k`.
    pub fn call_price(&self, k: f64) -> Estimate {
        let ek = k.exp();
        chunked_estimate(self.len(), |i| call_with_total_vol(self.log_spot[i], self.spot[i], k, ek, self.total_vol[i]))
    }
}

/// Call price at log strike `k` by the mixing formula. `|ρ| = 1` reduces each
/// conditional price to its intrinsic value.
pub fn mixing_call_price(batch: &PathBatch, rho: f64, k: f64) -> Result<Estimate> {
    Ok(ConditionalSmile::new(batch, rho)?.call_price(k))
}

/// Brute-force call price from a log-Euler scheme for the spot with exact
/// volatility updates.
///
/// The volatility shocks of path `i` are the ones [`crate::simulate_paths`]
/// uses for the same seed, so this shares random numbers with a mixing
/// estimate on that batch.
pub fn euler_oracle_price(
    params: &SabrParams,
    horizon: f64,
    k: f64,
    steps: usize,
    n: usize,
    seed: u64,
) -> Result<Estimate> {
    params.validate()?;
    if !(horizon > 0.0) || steps == 0 || n == 0 {
        return Err(Error::InvalidConfig(format!(
            "euler oracle needs horizon > 0, steps >= 1, n >= 1 (got {horizon}, {steps}, {n})"
        )));
    }
    let dt = horizon / steps as f64;
    let sqrt_dt = dt.sqrt();
    let stepper = VolStepper::new(params.sigma0, params.alpha, dt);
    let rho = params.rho;
    let rho_bar = (1.0 - rho * rho).max(0.0).sqrt();
    let ek = k.exp();
    Ok(chunked_estimate(n, |i| {
        let mut vol_rng = path_rng(seed, i as u64);
        let mut spot_rng = spot_rng(seed, i);
        let mut sigma = params.sigma0;
        let mut x = params.x0;
        for _ in 0..steps {
            let zw: f64 = StandardNormal.sample(&mut vol_rng);
            let zb: f64 = StandardNormal.sample(&mut spot_rng);
            x += -0.5 * sigma * sigma * dt + sigma * sqrt_dt * (rho * zw + rho_bar * zb);
            sigma *= stepper.factor(zw);
        }
        (x.exp() - ek).max(0.0)
    }))
}

/// Monte Carlo estimates of the four Malliavin functionals at `t = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MalliavinEstimates {
    /// `E[(∫₀ᵀ∫ₛᵀ D_sσ_r² dr ds)²]`
    pub t1: Estimate,
    /// `E[∫∫ D_sσ_r ∫ᵣᵀ D_rσ_u² du dr ds]`
    pub t2: Estimate,
    /// `E[∫∫∫ D_sD_rσ_u² du dr ds]`
    pub t3: Estimate,
    /// `E[∫₀ᵀ∫ₛᵀ D_sσ_r² dr ds]`
    pub t4: Estimate,
}

/// Pathwise Malliavin functionals by quadrature on the stored grid.
///
/// With `D_sσ_r² = 2ασ_r²`, `D_sσ_r = ασ_r` and `D_sD_rσ_u² = 4α²σ_u²` on the
/// simplex `s < r < u`, the inner integrals collapse to
/// `T4 = 2α∫σ_r² r dr`, `T1 = T4²`, `T2 = 2α²∫ r σ_r ∫ᵣᵀσ_u² du dr` and
/// `T3 = 2α²∫σ_u² u² du`, each evaluated with the trapezoidal rule.
pub fn malliavin_functionals(batch: &PathBatch) -> Result<MalliavinEstimates> {
    if !batch.has_paths() {
        return Err(Error::MissingPaths);
    }
    let alpha = batch.alpha();
    let dt = batch.dt();
    let steps = batch.steps();
    let [t1, t2, t3, t4] = chunked_estimates(batch.len(), |i| {
        let path = batch.path(i).expect("index within batch");
        path_functionals(path, alpha, dt, steps)
    });
    Ok(MalliavinEstimates { t1, t2, t3, t4 })
}

fn path_functionals(path: &[f64], alpha: f64, dt: f64, steps: usize) -> [f64; 4] {
    let weight = |i: usize| if i == 0 || i == steps { 0.5 } else { 1.0 };
    // ∫ᵣᵀ σ² du at grid point r, accumulated backwards
    let mut tail = 0.0;
    let mut first = 0.0;
    let mut second = 0.0;
    let mut nested = 0.0;
    for i in (0..=steps).rev() {
        if i < steps {
            tail += 0.5 * dt * (path[i] * path[i] + path[i + 1] * path[i + 1]);
        }
        let r = i as f64 * dt;
        let v = path[i] * path[i];
        let w = weight(i);
        first += w * v * r;
        second += w * v * r * r;
        nested += w * r * path[i] * tail;
    }
    let t4 = 2.0 * alpha * first * dt;
    let t2 = 2.0 * alpha * alpha * nested * dt;
    let t3 = 2.0 * alpha * alpha * second * dt;
    [t4 * t4, t2, t3, t4]
}
