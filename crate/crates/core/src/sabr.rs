//! Lognormal SABR: `dX = -σ²/2 dt + σ (ρ dW + √(1-ρ²) dB)`, `dσ = ασ dW`.
//!
//! Volatility paths are simulated with exact lognormal increments on a
//! uniform grid. Each path draws from its own ChaCha stream keyed by the
//! master seed and the path index, so a batch does not depend on how the
//! paths are split across workers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::stats::CHUNK;

/// Stream tag for the spot noise `B`; volatility noise uses the bare path index.
const SPOT_STREAM: u64 = 1 << 63;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SabrParams {
    pub sigma0: f64,
    pub alpha: f64,
    pub rho: f64,
    pub x0: f64,
}

impl SabrParams {
    pub fn new(sigma0: f64, alpha: f64, rho: f64, x0: f64) -> Result<Self> {
        let p = Self { sigma0, alpha, rho, x0 };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma0 > 0.0 && self.sigma0.is_finite()) {
            return Err(Error::InvalidConfig(format!("sigma0 must be positive, got {}", self.sigma0)));
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(Error::InvalidConfig(format!("alpha must be positive, got {}", self.alpha)));
        }
        if !(-1.0..=1.0).contains(&self.rho) {
            return Err(Error::InvalidConfig(format!("rho must lie in [-1, 1], got {}", self.rho)));
        }
        if !self.x0.is_finite() {
            return Err(Error::InvalidConfig(format!("x0 must be finite, got {}", self.x0)));
        }
        Ok(())
    }

    /// `E[σ_t^n] = σ₀ⁿ exp(n(n-1)α²t/2)`.
    pub fn moment_sigma(&self, t: f64, order: u32) -> f64 {
        let n = order as f64;
        self.sigma0.powi(order as i32) * (0.5 * n * (n - 1.0) * self.alpha * self.alpha * t).exp()
    }

    /// `E[∫₀ᵀ σ_s² ds] = σ₀² (e^{α²T} - 1) / α²`.
    pub fn expected_integrated_variance(&self, horizon: f64) -> f64 {
        let z = self.alpha * self.alpha * horizon;
        let s2 = self.sigma0 * self.sigma0;
        if z == 0.0 {
            s2 * horizon
        } else {
            s2 * horizon * (z.exp_m1() / z)
        }
    }
}

pub(crate) fn path_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub(crate) fn spot_rng(seed: u64, path: usize) -> ChaCha8Rng {
    path_rng(seed, SPOT_STREAM | path as u64)
}

/// Exact lognormal volatility stepper on a uniform grid.
#[derive(Debug, Clone, Copy)]
pub(crate) struct VolStepper {
    sigma0: f64,
    shock: f64,
    drift: f64,
}

impl VolStepper {
    pub(crate) fn new(sigma0: f64, alpha: f64, dt: f64) -> Self {
        Self { sigma0, shock: alpha * dt.sqrt(), drift: -0.5 * alpha * alpha * dt }
    }

    /// Multiplicative factor for a standard normal draw `z`.
    #[inline]
    pub(crate) fn factor(&self, z: f64) -> f64 {
        (self.shock * z + self.drift).exp()
    }

    /// Walks path `index`, calling `visit(i, σ_i)` for grid points `0..=steps`.
    #[inline]
    pub(crate) fn walk(&self, seed: u64, index: usize, steps: usize, mut visit: impl FnMut(usize, f64)) {
        let mut rng = path_rng(seed, index as u64);
        let mut sigma = self.sigma0;
        visit(0, sigma);
        for i in 1..=steps {
            let z: f64 = StandardNormal.sample(&mut rng);
            sigma *= self.factor(z);
            visit(i, sigma);
        }
    }
}

/// Per-path summaries of a simulated volatility batch.
///
/// Integrated variance is the trapezoidal sum of σ² over the grid; the
/// stochastic integral `∫σ dW` is stored from the exact identity
/// `(σ_T - σ₀)/α`. Full paths are kept only when requested.
#[derive(Debug, Clone)]
pub struct PathBatch {
    sigma0: f64,
    alpha: f64,
    x0: f64,
    horizon: f64,
    steps: usize,
    seed: u64,
    integrated_variance: Vec<f64>,
    sigma_end: Vec<f64>,
    stochastic_integral: Vec<f64>,
    paths: Option<Vec<f64>>,
}

/// Integration rule used for integrated variance.
pub const SCHEME: &str = "exact-lognormal/trapezoid";

impl PathBatch {
    /// Assembles a batch from externally computed summaries. `∫σ dW` is
    /// derived from `sigma_end`.
    pub fn from_summaries(
        params: &SabrParams,
        horizon: f64,
        steps: usize,
        seed: u64,
        integrated_variance: Vec<f64>,
        sigma_end: Vec<f64>,
    ) -> Result<Self> {
        params.validate()?;
        check_sizes(horizon, steps, integrated_variance.len())?;
        if integrated_variance.len() != sigma_end.len() {
            return Err(Error::InvalidConfig("summary vectors differ in length".into()));
        }
        if let Some(y) = integrated_variance.iter().find(|y| !(**y > 0.0)) {
            return Err(Error::InvalidConfig(format!("integrated variance must be positive, got {y}")));
        }
        let stochastic_integral = sigma_end.iter().map(|s| (s - params.sigma0) / params.alpha).collect();
        Ok(Self {
            sigma0: params.sigma0,
            alpha: params.alpha,
            x0: params.x0,
            horizon,
            steps,
            seed,
            integrated_variance,
            sigma_end,
            stochastic_integral,
            paths: None,
        })
    }

    pub fn len(&self) -> usize {
        self.integrated_variance.len()
    }

    pub fn is_empty(&self) -> bool {
        self.integrated_variance.is_empty()
    }

    pub fn sigma0(&self) -> f64 {
        self.sigma0
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn dt(&self) -> f64 {
        self.horizon / self.steps as f64
    }

    pub fn scheme(&self) -> &'static str {
        SCHEME
    }

    /// `Y = ∫₀ᵀ σ² ds` per path.
    pub fn integrated_variance(&self) -> &[f64] {
        &self.integrated_variance
    }

    pub fn sigma_end(&self) -> &[f64] {
        &self.sigma_end
    }

    /// `∫₀ᵀ σ dW` per path.
    pub fn stochastic_integral(&self) -> &[f64] {
        &self.stochastic_integral
    }

    pub fn has_paths(&self) -> bool {
        self.paths.is_some()
    }

    /// Volatility grid `σ_0..=σ_steps` of path `i`.
    pub fn path(&self, i: usize) -> Result<&[f64]> {
        let paths = self.paths.as_ref().ok_or(Error::MissingPaths)?;
        let width = self.steps + 1;
        if i >= self.len() {
            return Err(Error::IndexError { index: i, len: self.len() });
        }
        Ok(&paths[i * width..(i + 1) * width])
    }
}

fn check_sizes(horizon: f64, steps: usize, n: usize) -> Result<()> {
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::InvalidConfig(format!("horizon must be positive, got {horizon}")));
    }
    if steps == 0 {
        return Err(Error::InvalidConfig("steps must be at least 1".into()));
    }
    if n == 0 {
        return Err(Error::InvalidConfig("path count must be at least 1".into()));
    }
    Ok(())
}

/// Simulates `n` volatility paths and keeps per-path summaries.
pub fn simulate_paths(params: &SabrParams, horizon: f64, steps: usize, n: usize, seed: u64) -> Result<PathBatch> {
    simulate(params, horizon, steps, n, seed, false)
}

/// As [`simulate_paths`], additionally retaining every volatility path.
/// Memory is `n * (steps + 1)` floats; meant for diagnostics on small batches.
pub fn simulate_full_paths(params: &SabrParams, horizon: f64, steps: usize, n: usize, seed: u64) -> Result<PathBatch> {
    simulate(params, horizon, steps, n, seed, true)
}

fn simulate(params: &SabrParams, horizon: f64, steps: usize, n: usize, seed: u64, keep: bool) -> Result<PathBatch> {
    params.validate()?;
    check_sizes(horizon, steps, n)?;
    let dt = horizon / steps as f64;
    let stepper = VolStepper::new(params.sigma0, params.alpha, dt);

    let mut ys = vec![0.0; n];
    let mut ends = vec![0.0; n];
    let width = steps + 1;
    let mut paths = if keep { Some(vec![0.0; n * width]) } else { None };

    let run_chunk = |c: usize, ys: &mut [f64], ends: &mut [f64], mut grid: Option<&mut [f64]>| {
        for (j, (y, end)) in ys.iter_mut().zip(ends.iter_mut()).enumerate() {
            let index = c * CHUNK + j;
            let mut sum = 0.0;
            let mut last = 0.0;
            let row = grid.as_deref_mut().map(|g| &mut g[j * width..(j + 1) * width]);
            let mut row = row;
            stepper.walk(seed, index, steps, |i, s| {
                let v = s * s;
                sum += if i == 0 || i == steps { 0.5 * v } else { v };
                last = s;
                if let Some(r) = row.as_deref_mut() {
                    r[i] = s;
                }
            });
            *y = sum * dt;
            *end = last;
        }
    };

    match paths.as_mut() {
        Some(p) => ys
            .par_chunks_mut(CHUNK)
            .zip(ends.par_chunks_mut(CHUNK))
            .zip(p.par_chunks_mut(CHUNK * width))
            .enumerate()
            .for_each(|(c, ((y, e), g))| run_chunk(c, y, e, Some(g))),
        None => ys
            .par_chunks_mut(CHUNK)
            .zip(ends.par_chunks_mut(CHUNK))
            .enumerate()
            .for_each(|(c, (y, e))| run_chunk(c, y, e, None)),
    }

    let stochastic_integral = ends.iter().map(|s| (s - params.sigma0) / params.alpha).collect();
    Ok(PathBatch {
        sigma0: params.sigma0,
        alpha: params.alpha,
        x0: params.x0,
        horizon,
        steps,
        seed,
        integrated_variance: ys,
        sigma_end: ends,
        stochastic_integral,
        paths,
    })
}

/// Left-point Riemann sum of `∫σ dW` along path `index`, regenerated from the
/// batch seed. Converges to `(σ_T - σ₀)/α` as the grid is refined.
pub fn riemann_stochastic_integral(params: &SabrParams, horizon: f64, steps: usize, seed: u64, index: usize) -> f64 {
    let dt = horizon / steps as f64;
    let stepper = VolStepper::new(params.sigma0, params.alpha, dt);
    let mut rng = path_rng(seed, index as u64);
    let mut sigma = params.sigma0;
    let mut integral = 0.0;
    for _ in 0..steps {
        let z: f64 = StandardNormal.sample(&mut rng);
        integral += sigma * z * dt.sqrt();
        sigma *= stepper.factor(z);
    }
    integral
}
