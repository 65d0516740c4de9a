//! Standard normal distribution and zero-rate Black-Scholes call analytics in
//! log coordinates: spot `e^x`, strike `e^k`, time to maturity `tau`.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::error::{Error, Result};

/// Upper end of the implied volatility search range.
pub const SIGMA_MAX: f64 = 5.0;
/// Lower end of the implied volatility search range.
pub const SIGMA_MIN: f64 = 1e-9;
/// Absolute price tolerance of [`implied_vol`].
pub const PRICE_TOL: f64 = 1e-12;

const MAX_ITER: usize = 100;
const VEGA_FLOOR: f64 = 1e-14;

/// Standard normal cumulative distribution function.
#[inline]
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z * FRAC_1_SQRT_2)
}

/// Standard normal density.
#[inline]
pub fn normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * PI).sqrt()
}

/// A European call quote under Black-Scholes with zero rates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BsQuote {
    /// Log spot.
    pub x: f64,
    /// Log strike.
    pub k: f64,
    /// Time to maturity in years.
    pub tau: f64,
    /// Annualized volatility.
    pub sigma: f64,
}

impl BsQuote {
    pub fn new(x: f64, k: f64, tau: f64, sigma: f64) -> Self {
        Self { x, k, tau, sigma }
    }

    /// Total standard deviation `sigma * sqrt(tau)`.
    #[inline]
    pub fn total_vol(&self) -> f64 {
        self.sigma * self.tau.sqrt()
    }

    pub fn d1d2(&self) -> Result<(f64, f64)> {
        let s = self.total_vol();
        if !(s > 0.0) || !s.is_finite() {
            return Err(Error::Domain(format!("d1/d2 need sigma*sqrt(tau) > 0, got {s}")));
        }
        let d1 = (self.x - self.k) / s + 0.5 * s;
        Ok((d1, d1 - s))
    }

    /// Call price. A zero total volatility returns the intrinsic value.
    pub fn call(&self) -> f64 {
        call_with_total_vol(self.x, self.x.exp(), self.k, self.k.exp(), self.total_vol())
    }

    /// Vega, `e^x φ(d1) sqrt(tau)`.
    pub fn vega(&self) -> f64 {
        let s = self.total_vol();
        if !(s > 0.0) {
            return 0.0;
        }
        let d1 = (self.x - self.k) / s + 0.5 * s;
        self.x.exp() * normal_pdf(d1) * self.tau.sqrt()
    }
}

/// Call price given total volatility `s = sigma * sqrt(tau)` and the
/// precomputed exponentials `ex = e^x`, `ek = e^k`.
///
/// In-the-money calls are priced through put-call parity so the time value
/// keeps its relative accuracy.
#[inline]
pub(crate) fn call_with_total_vol(x: f64, ex: f64, k: f64, ek: f64, s: f64) -> f64 {
    if !(s > 0.0) {
        return (ex - ek).max(0.0);
    }
    if s.is_infinite() {
        return ex;
    }
    let d1 = (x - k) / s + 0.5 * s;
    let d2 = d1 - s;
    if x > k {
        let put = ek * normal_cdf(-d2) - ex * normal_cdf(-d1);
        (ex - ek) + put.max(0.0)
    } else {
        (ex * normal_cdf(d1) - ek * normal_cdf(d2)).max(0.0)
    }
}

/// Inverts the call price in volatility (`BS^{-1}`).
///
/// Newton steps on vega, kept inside a shrinking bisection bracket on
/// `[SIGMA_MIN, SIGMA_MAX]`; bisection takes over when vega is negligible.
/// After the price residual falls under [`PRICE_TOL`] a few more Newton steps
/// polish the volatility to near machine precision.
pub fn implied_vol(price: f64, x: f64, k: f64, tau: f64) -> Result<f64> {
    if !(tau > 0.0) {
        return Err(Error::Domain(format!("tau must be positive, got {tau}")));
    }
    let ex = x.exp();
    let ek = k.exp();
    let lower = (ex - ek).max(0.0);
    if !(price > lower && price < ex) {
        return Err(Error::OutOfBounds { price, lower, upper: ex });
    }

    let sqrt_tau = tau.sqrt();
    let price_at = |sigma: f64| call_with_total_vol(x, ex, k, ek, sigma * sqrt_tau);

    let mut lo = SIGMA_MIN;
    let mut hi = SIGMA_MAX;
    if price <= price_at(lo) || price >= price_at(hi) {
        return Err(Error::OutOfBounds { price, lower: price_at(lo), upper: price_at(hi) });
    }

    // Newton from the inflection point of the price in sigma converges
    // monotonically for Black-Scholes.
    let mut sigma = (2.0 * (x - k).abs() / tau).sqrt().clamp(0.1, 1.0);
    let mut residual = f64::INFINITY;
    let mut polish = 0;
    for _ in 0..MAX_ITER {
        let f = price_at(sigma) - price;
        residual = f.abs();
        if f > 0.0 {
            hi = sigma;
        } else if f < 0.0 {
            lo = sigma;
        } else {
            return Ok(sigma);
        }
        if residual <= PRICE_TOL {
            polish += 1;
            if polish > 3 {
                return Ok(sigma);
            }
        }

        let d1 = (x - k) / (sigma * sqrt_tau) + 0.5 * sigma * sqrt_tau;
        let vega = ex * normal_pdf(d1) * sqrt_tau;
        let next = if vega > VEGA_FLOOR {
            let candidate = sigma - f / vega;
            if candidate > lo && candidate < hi {
                candidate
            } else {
                0.5 * (lo + hi)
            }
        } else {
            0.5 * (lo + hi)
        };
        if (next - sigma).abs() <= 1e-15 * sigma {
            if residual <= PRICE_TOL {
                return Ok(next);
            }
            if hi - lo <= 4.0 * f64::EPSILON * sigma {
                break;
            }
        }
        sigma = next;
    }
    if residual <= PRICE_TOL {
        return Ok(sigma);
    }
    Err(Error::NoConvergence { iterations: MAX_ITER, residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn cdf_symmetry() {
        assert_eq!(normal_cdf(0.0), 0.5);
        assert_abs_diff_eq!(normal_cdf(1.7) + normal_cdf(-1.7), 1.0, epsilon = 1e-16);
        assert_abs_diff_eq!(normal_cdf(0.1), 0.539827837277029, epsilon = 1e-15);
    }

    #[test]
    fn d1d2_cases() {
        let (d1, d2) = BsQuote::new(0.0, 0.0, 1.0, 0.3).d1d2().unwrap();
        assert_abs_diff_eq!(d2, -0.15, epsilon = 1e-16);
        assert_abs_diff_eq!(d1 - d2, 0.3, epsilon = 1e-16);

        let (_, d2) = BsQuote::new(0.0, -0.045, 1.0, 0.3).d1d2().unwrap();
        assert_abs_diff_eq!(d2, 0.0, epsilon = 1e-15);

        let (d1, d2) = BsQuote::new(0.0, 0.1, 0.25, 0.2).d1d2().unwrap();
        assert_abs_diff_eq!(d1, d2 + 0.1, epsilon = 1e-15);

        assert!(BsQuote::new(0.0, 0.0, 1.0, 0.0).d1d2().is_err());
    }

    #[test]
    fn call_limits() {
        assert_abs_diff_eq!(BsQuote::new(0.0, -0.1, 1.0, 0.0).call(), 1.0 - (-0.1f64).exp(), epsilon = 1e-16);
        assert_eq!(BsQuote::new(0.0, 0.1, 1.0, 0.0).call(), 0.0);
        assert_abs_diff_eq!(BsQuote::new(0.0, -50.0, 1.0, 0.2).call(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(BsQuote::new(0.0, 50.0, 1.0, 0.2).call(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn vega_decays() {
        assert!(BsQuote::new(0.0, 0.0, 1.0, 1e4).vega() < 1e-100);
        assert!(BsQuote::new(0.0, 0.3, 0.5, 0.2).vega() > 0.0);
        assert!(BsQuote::new(0.0, -0.3, 2.0, 3.0).vega() > 0.0);
    }

    #[test]
    fn implied_vol_errors() {
        assert!(matches!(implied_vol(1.0, 0.0, 0.0, 1.0), Err(Error::OutOfBounds { .. })));
        assert!(matches!(implied_vol(0.05, 0.0, -0.1, 1.0), Err(Error::OutOfBounds { .. })));
        assert!(matches!(implied_vol(-1.0, 0.0, 0.0, 1.0), Err(Error::OutOfBounds { .. })));
        assert!(implied_vol(0.1, 0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn implied_vol_round_trip() {
        let q = BsQuote::new(0.0, 0.05, 0.5, 0.3);
        let iv = implied_vol(q.call(), q.x, q.k, q.tau).unwrap();
        assert_abs_diff_eq!(iv, 0.3, epsilon = 1e-10);
    }
}
