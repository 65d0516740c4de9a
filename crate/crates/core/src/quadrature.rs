//! Adaptive Gauss-Kronrod (7/15 point) integration.
//!
//! Used as an independent check of the closed-form functionals; the nested
//! helpers integrate over `a < s < r < u < b` style simplices by composing
//! one-dimensional rules.

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] =
    [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

const MAX_DEPTH: u32 = 40;

fn kronrod(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

fn adapt(f: &impl Fn(f64) -> f64, a: f64, b: f64, whole: f64, err: f64, tol: f64, depth: u32) -> f64 {
    if err <= tol || depth >= MAX_DEPTH {
        return whole;
    }
    let m = 0.5 * (a + b);
    let (left, el) = kronrod(f, a, m);
    let (right, er) = kronrod(f, m, b);
    adapt(f, a, m, left, el, 0.5 * tol, depth + 1) + adapt(f, m, b, right, er, 0.5 * tol, depth + 1)
}

/// `∫ₐᵇ f`, refined until the Kronrod/Gauss discrepancy is below
/// `rel_tol · |estimate|` (plus a tiny absolute floor).
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, rel_tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let (whole, err) = kronrod(&f, a, b);
    let tol = (rel_tol * whole.abs()).max(1e-300);
    adapt(&f, a, b, whole, err, tol, 0)
}

/// `∫ₐᵇ ∫ₛᵇ f(s, r) dr ds`
pub fn integrate_upper_triangle(f: impl Fn(f64, f64) -> f64, a: f64, b: f64, rel_tol: f64) -> f64 {
    integrate(|s| integrate(|r| f(s, r), s, b, rel_tol), a, b, rel_tol)
}

/// `∫ₐᵇ ∫ₛᵇ ∫ᵣᵇ f(s, r, u) du dr ds`
pub fn integrate_upper_simplex(f: impl Fn(f64, f64, f64) -> f64, a: f64, b: f64, rel_tol: f64) -> f64 {
    integrate(|s| integrate(|r| integrate(|u| f(s, r, u), r, b, rel_tol), s, b, rel_tol), a, b, rel_tol)
}
