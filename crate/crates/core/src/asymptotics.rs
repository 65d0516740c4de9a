//! Short-maturity asymptotics of the lognormal SABR model at `t = 0`.
//!
//! The four functionals
//!
//! ```text
//! T1 = E[(∫₀ᵀ∫ₛᵀ D_sσ_r² dr ds)²]            (upper bound via Cauchy-Schwarz)
//! T2 = E[∫₀ᵀ∫ₛᵀ D_sσ_r ∫ᵣᵀ D_rσ_u² du dr ds]
//! T3 = E[∫₀ᵀ∫ₛᵀ∫ᵣᵀ D_sD_rσ_u² du dr ds]
//! T4 = E[∫₀ᵀ∫ₛᵀ D_sσ_r² dr ds]
//! ```
//!
//! drive the first-order behaviour of `ATMI - E[v]` and `ZVIV - E[v]`.
//! Each closed form is `prefactor · Tᵖ · h(z)/zᵖ` for an entire function `h`
//! of `z = c·T`; small `z` is evaluated from the power series of `h` to avoid
//! the cancellation in the exponential expressions.

use crate::error::{Error, Result};

/// Below this vol-of-vol the closed forms return their leading terms.
const ALPHA_FLOOR: f64 = 1e-8;
/// Series/direct switch for the scaled exponent `z`.
const SERIES_BELOW: f64 = 0.5;
const SERIES_TERMS: u32 = 30;

/// Sums `Σ_{j≥p} coeff(j) z^{j-p} / j!`.
fn series(z: f64, p: u32, coeff: impl Fn(f64) -> f64) -> f64 {
    let mut fact: f64 = (1..=p).map(f64::from).product();
    let mut power = 1.0;
    let mut sum = 0.0;
    for j in p..p + SERIES_TERMS {
        if j > p {
            fact *= f64::from(j);
            power *= z;
        }
        sum += coeff(f64::from(j)) * power / fact;
    }
    sum
}

/// Closed-form upper bound on `T1`:
/// `(T)∫₀ᵀ(T-s)∫ₛᵀ 4α²σ₀⁴e^{6α²r} dr ds`.
pub fn t1_bound(alpha: f64, sigma0: f64, horizon: f64) -> f64 {
    if alpha < ALPHA_FLOOR {
        return t1_leading(alpha, sigma0, horizon);
    }
    let c = 6.0 * alpha * alpha;
    let z = c * horizon;
    let scale = 4.0 * alpha * alpha * sigma0.powi(4);
    if z < SERIES_BELOW {
        let h = series(z, 3, |j| 0.5 * (j - 2.0) * (j + 1.0));
        return scale * horizon.powi(4) * h;
    }
    let t = horizon;
    scale
        * (z.exp() * t.powi(3) / (12.0 * alpha * alpha) + t * t / (36.0 * alpha.powi(4))
            - z.exp_m1() * t / (216.0 * alpha.powi(6)))
}

pub fn t1_leading(alpha: f64, sigma0: f64, horizon: f64) -> f64 {
    4.0 * alpha * alpha * sigma0.powi(4) / 3.0 * horizon.powi(4)
}

/// `T2 = 2α²σ₀³ ∫∫∫_{0<s<r<u<T} e^{α²u + 2α²r} du dr ds`.
pub fn t2_exact(alpha: f64, sigma0: f64, horizon: f64) -> f64 {
    if alpha < ALPHA_FLOOR {
        return t2_leading(alpha, sigma0, horizon);
    }
    let a2 = alpha * alpha;
    let w = a2 * horizon;
    let scale = 2.0 * a2 * sigma0.powi(3);
    if w < SERIES_BELOW {
        let h = series(w, 3, |j| {
            let three_j = 3f64.powf(j);
            j * three_j / 18.0 - (three_j - 1.0) / 4.0 + three_j / 9.0
        });
        return scale * horizon.powi(3) * h;
    }
    let t = horizon;
    let e3 = (3.0 * w).exp();
    scale
        * (e3 * t / (2.0 * a2 * a2) - (e3 - w.exp()) / (4.0 * a2.powi(3)) - e3 * t / (3.0 * a2 * a2)
            + (3.0 * w).exp_m1() / (9.0 * a2.powi(3)))
}

pub fn t2_leading(alpha: f64, sigma0: f64, horizon: f64) -> f64 {
    alpha * alpha * sigma0.powi(3) / 3.0 * horizon.powi(3)
}

/// `T3 = 4α²σ₀² ∫∫∫_{0<s<r<u<T} e^{α²u} du dr ds`.
pub fn t3_exact(alpha: f64, sigma0: f64, horizon: f64) -> f64 {
    if alpha < ALPHA_FLOOR {
        return t3_leading(alpha, sigma0, horizon);
    }
    let a2 = alpha * alpha;
    let z = a2 * horizon;
    let scale = 4.0 * a2 * sigma0 * sigma0;
    if z < SERIES_BELOW {
        let h = series(z, 3, |j| 0.5 * (j - 1.0) * (j - 2.0));
        return scale * horizon.powi(3) * h;
    }
    let t = horizon;
    let e = z.exp();
    scale * (e * t * t / (2.0 * a2) - e * t / (a2 * a2) + z.exp_m1() / a2.powi(3))
}

pub fn t3_leading(alpha: f64, sigma0: f64, horizon: f64) -> f64 {
    2.0 * alpha * alpha * sigma0 * sigma0 / 3.0 * horizon.powi(3)
}

/// `T4 = 2ασ₀² ∫∫_{0<s<r<T} e^{α²r} dr ds`.
pub fn t4_exact(alpha: f64, sigma0: f64, horizon: f64) -> f64 {
    if alpha < ALPHA_FLOOR {
        return t4_leading(alpha, sigma0, horizon);
    }
    let a2 = alpha * alpha;
    let z = a2 * horizon;
    let scale = 2.0 * alpha * sigma0 * sigma0;
    if z < SERIES_BELOW {
        let h = series(z, 2, |j| j - 1.0);
        return scale * horizon * horizon * h;
    }
    let t = horizon;
    scale * (z.exp() * t / a2 - z.exp_m1() / (a2 * a2))
}

/// Leading term `ασ₀²T²` of [`t4_exact`] (the integrand tends to `2ασ₀²`
/// on a triangle of area `T²/2`).
pub fn t4_leading(alpha: f64, sigma0: f64, horizon: f64) -> f64 {
    alpha * sigma0 * sigma0 * horizon * horizon
}

/// Upper bound for `lim_{T→0} (ATMI - E[v]) / T`.
///
/// With `T1` replaced by its bound the `ρ²` contributions cancel exactly
/// and the slope bound is `(ρ/4)·lim T4/T² = ρασ₀²/4`.
pub fn atmi_slope_bound(rho: f64, alpha: f64, sigma0: f64) -> f64 {
    0.25 * rho * alpha * sigma0 * sigma0
}

/// The slope bound as usually quoted, `ρασ₀²/8`. It rests on the leading term
/// `ασ₀²T²/2` for `T4`, which is half the true value; see [`t4_leading`].
pub fn atmi_slope_bound_quoted(rho: f64, alpha: f64, sigma0: f64) -> f64 {
    0.125 * rho * alpha * sigma0 * sigma0
}

/// Upper bound for `lim_{T→0} (ZVIV - E[v]) / T`, valid for every correlation.
pub fn zviv_slope_limit() -> f64 {
    0.0
}

/// `lim_{T→0} (ATMI - E[v]) / T²` at zero correlation: `-α²σ₀³/24`.
///
/// Obtained from `-(1/(32σ₀)) lim T⁻³ ∫₀ᵀ E[(E_r∫ᵣᵀ D_rσ_s² ds)²] dr` with
/// `E_r∫ᵣᵀ D_rσ_s² ds = 2ασ_r² (e^{α²(T-r)} - 1)/α²`, whose scaled limit is
/// `4α²σ₀⁴/3`.
pub fn atmi_curvature_rho0(alpha: f64, sigma0: f64) -> f64 {
    -alpha * alpha * sigma0.powi(3) / 24.0
}

/// The leading-order coefficients multiplying each functional in the
/// short-maturity ATMI expansion, evaluated on the leading terms. Returns the
/// `ρ²` part and the `ρ` part of the slope separately.
pub fn slope_assembly(rho: f64, alpha: f64, sigma0: f64) -> (f64, f64) {
    let quadratic = 3.0 / (8.0 * sigma0.powi(3)) * t1_leading(alpha, sigma0, 1.0)
        - t2_leading(alpha, sigma0, 1.0) / (2.0 * sigma0 * sigma0)
        - t3_leading(alpha, sigma0, 1.0) / (2.0 * sigma0);
    let linear = 0.25 * t4_leading(alpha, sigma0, 1.0);
    (rho * rho * quadratic, rho * linear)
}

/// Closed forms and leading terms at one `(α, σ₀, T, ρ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticReport {
    pub t1_bound: f64,
    pub t2: f64,
    pub t3: f64,
    pub t4: f64,
    pub t1_leading: f64,
    pub t2_leading: f64,
    pub t3_leading: f64,
    pub t4_leading: f64,
    pub atmi_slope_bound: f64,
    pub zviv_slope_bound: f64,
    pub atmi_curvature_rho0: f64,
}

impl AsymptoticReport {
    pub fn new(alpha: f64, sigma0: f64, horizon: f64, rho: f64) -> Self {
        Self {
            t1_bound: t1_bound(alpha, sigma0, horizon),
            t2: t2_exact(alpha, sigma0, horizon),
            t3: t3_exact(alpha, sigma0, horizon),
            t4: t4_exact(alpha, sigma0, horizon),
            t1_leading: t1_leading(alpha, sigma0, horizon),
            t2_leading: t2_leading(alpha, sigma0, horizon),
            t3_leading: t3_leading(alpha, sigma0, horizon),
            t4_leading: t4_leading(alpha, sigma0, horizon),
            atmi_slope_bound: atmi_slope_bound(rho, alpha, sigma0),
            zviv_slope_bound: zviv_slope_limit(),
            atmi_curvature_rho0: atmi_curvature_rho0(alpha, sigma0),
        }
    }
}

/// A volatility path on a uniform grid, for pathwise checks.
#[derive(Debug, Clone, Copy)]
pub struct GridPath<'a> {
    pub sigma: &'a [f64],
    pub dt: f64,
    pub alpha: f64,
}

impl GridPath<'_> {
    /// Trapezoidal `∫ σ² du` from grid index `from` to the end.
    fn tail_variance(&self, from: usize) -> f64 {
        let s = &self.sigma[from..];
        s.windows(2).map(|w| 0.5 * (w[0] * w[0] + w[1] * w[1])).sum::<f64>() * self.dt
    }
}

/// Pathwise form of the zero-vanna positivity condition:
///
/// ```text
/// -(∫ₛᵀ 2ασ² du)(∫ᵣᵀ 2ασ² du) / (2∫_{t0}ᵀ σ² du) + ∫_{r∨s}ᵀ 4α²σ² du
/// ```
///
/// Non-negative whenever `t0 ≤ r, s`.
pub fn vanna_positivity(path: &GridPath<'_>, r: usize, s: usize, t0: usize) -> Result<f64> {
    let len = path.sigma.len();
    for index in [r, s, t0] {
        if index + 1 >= len {
            return Err(Error::IndexError { index, len });
        }
    }
    if t0 > r || t0 > s {
        return Err(Error::Domain(format!("start index {t0} must not exceed r = {r}, s = {s}")));
    }
    let a = path.alpha;
    let total = path.tail_variance(t0);
    let from_s = 2.0 * a * path.tail_variance(s);
    let from_r = 2.0 * a * path.tail_variance(r);
    let from_max = 4.0 * a * a * path.tail_variance(r.max(s));
    Ok(-from_s * from_r / (2.0 * total) + from_max)
}
