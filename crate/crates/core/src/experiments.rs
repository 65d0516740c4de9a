//! Correlation sweeps, TSV output and the inequality verification report.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use log::info;

use crate::asymptotics::{
    atmi_curvature_rho0, atmi_slope_bound, t1_bound, t1_leading, t2_exact, t2_leading, t3_exact, t3_leading, t4_exact,
    t4_leading, zviv_slope_limit,
};
use crate::error::{Error, Result};
use crate::mc::{malliavin_functionals, volswap_strike, ConditionalSmile, Estimate};
use crate::quadrature::{integrate, integrate_upper_simplex, integrate_upper_triangle};
use crate::sabr::{simulate_full_paths, simulate_paths, PathBatch, SabrParams};
use crate::smile::{atmi, zero_vanna};

/// Everything needed to reproduce one sweep over correlation.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub sigma0: f64,
    pub alpha: f64,
    /// Maturity in years (`T` in config files and flags).
    pub horizon: f64,
    pub rho_start: f64,
    pub rho_end: f64,
    pub rho_step: f64,
    pub paths: usize,
    pub steps: usize,
    pub seed: u64,
    pub x0: f64,
    pub out: PathBuf,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            sigma0: 0.3,
            alpha: 0.5,
            horizon: 0.5,
            rho_start: -1.0,
            rho_end: 1.0,
            rho_step: 0.1,
            paths: 10_000_000,
            steps: 512,
            seed: 42,
            x0: 0.0,
            out: PathBuf::from("sweep.txt"),
        }
    }
}

/// `(σ₀, α, T)` of the four figure presets.
pub const FIGURES: [(f64, f64, f64); 4] = [(0.3, 0.5, 0.5), (0.3, 0.5, 1.0), (0.3, 1.0, 0.5), (0.3, 1.0, 1.0)];

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value.parse().map_err(|_| Error::InvalidConfig(format!("cannot parse {key} = {value:?}")))
}

impl SweepConfig {
    /// Preset for figure `id` in `1..=4`, writing to `fig<id>.txt`.
    pub fn figure(id: u8) -> Result<Self> {
        let (sigma0, alpha, horizon) = *FIGURES
            .get(usize::from(id).wrapping_sub(1))
            .ok_or_else(|| Error::InvalidConfig(format!("figure id must be 1..=4, got {id}")))?;
        Ok(Self { sigma0, alpha, horizon, out: PathBuf::from(format!("fig{id}.txt")), ..Self::default() })
    }

    /// Sets one field by its config-file name.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key.trim() {
            "sigma0" => self.sigma0 = parse(key, value)?,
            "alpha" => self.alpha = parse(key, value)?,
            "T" => self.horizon = parse(key, value)?,
            "rho_start" => self.rho_start = parse(key, value)?,
            "rho_end" => self.rho_end = parse(key, value)?,
            "rho_step" => self.rho_step = parse(key, value)?,
            "paths" => self.paths = parse(key, value)?,
            "steps" => self.steps = parse(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            "x0" => self.x0 = parse(key, value)?,
            "out" => self.out = PathBuf::from(value),
            other => return Err(Error::InvalidConfig(format!("unknown config key {other:?}"))),
        }
        Ok(())
    }

    /// Applies a flat `key = value` file. Blank lines and `#` comments are skipped.
    pub fn apply_config_text(&mut self, text: &str) -> Result<()> {
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::InvalidConfig(format!("line {}: expected `key = value`, got {line:?}", lineno + 1))
            })?;
            self.set(key, value)?;
        }
        Ok(())
    }

    pub fn params(&self, rho: f64) -> Result<SabrParams> {
        SabrParams::new(self.sigma0, self.alpha, rho, self.x0)
    }

    pub fn validate(&self) -> Result<()> {
        self.params(0.0)?;
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(Error::InvalidConfig(format!("T must be positive, got {}", self.horizon)));
        }
        if !(self.rho_step > 0.0) {
            return Err(Error::InvalidConfig(format!("rho_step must be positive, got {}", self.rho_step)));
        }
        for (name, r) in [("rho_start", self.rho_start), ("rho_end", self.rho_end)] {
            if !(-1.0..=1.0).contains(&r) {
                return Err(Error::InvalidConfig(format!("{name} must lie in [-1, 1], got {r}")));
            }
        }
        if self.rho_end < self.rho_start {
            return Err(Error::InvalidConfig("rho_end must not be below rho_start".into()));
        }
        if self.paths == 0 || self.steps == 0 {
            return Err(Error::InvalidConfig("paths and steps must be at least 1".into()));
        }
        Ok(())
    }

    /// Inclusive grid `rho_start, rho_start + rho_step, …, rho_end`, snapped to
    /// 1e-12 so that decimal steps land on their decimal values.
    pub fn rho_grid(&self) -> Vec<f64> {
        let count = ((self.rho_end - self.rho_start) / self.rho_step + 1e-9).floor() as usize + 1;
        (0..count)
            .map(|i| {
                let r = self.rho_start + i as f64 * self.rho_step;
                ((r * 1e12).round() / 1e12).clamp(-1.0, 1.0)
            })
            .collect()
    }
}

/// One point of a sweep: volatility swap strike, ZVIV and ATMI.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub rho: f64,
    pub volswap: Estimate,
    pub zviv: Estimate,
    pub atmi: Estimate,
}

fn solve_row(batch: &PathBatch, volswap: Estimate, rho: f64) -> Result<SweepRow> {
    let sol = zero_vanna(batch, rho)?;
    Ok(SweepRow { rho, volswap, zviv: sol.zviv, atmi: sol.atmi })
}

/// Simulates one batch and solves every correlation on it.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<SweepRow>> {
    cfg.validate()?;
    let started = Instant::now();
    let batch = simulate_paths(&cfg.params(0.0)?, cfg.horizon, cfg.steps, cfg.paths, cfg.seed)?;
    info!("simulated {} paths in {:.1?}", batch.len(), started.elapsed());
    let volswap = volswap_strike(&batch);
    cfg.rho_grid()
        .into_iter()
        .map(|rho| solve_row(&batch, volswap, rho).map_err(|e| Error::AtRho { rho, source: Box::new(e) }))
        .collect()
}

/// Formats `v` in fixed notation with `digits` significant digits.
pub fn format_significant(v: f64, digits: usize) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{:.*}", digits - 1, v);
    }
    let magnitude = v.abs().log10().floor() as i64;
    let decimals = (digits as i64 - 1 - magnitude).max(0) as usize;
    let s = format!("{v:.decimals$}");
    // rounding can carry into a new leading digit (9.99… -> 10.0…)
    let rounded: f64 = s.parse().unwrap_or(v);
    if rounded != 0.0 && rounded.abs().log10().floor() as i64 > magnitude && decimals > 0 {
        format!("{:.*}", decimals - 1, v)
    } else {
        s
    }
}

/// `dir/name.txt` -> `dir/name.se.txt`
pub fn se_path(path: &Path) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}.se.txt"))
}

/// Writes the `x y1 y2 y3` table (ρ, volswap, ZVIV, ATMI) and its
/// standard-error sibling.
pub fn write_tsv(rows: &[SweepRow], path: &Path) -> Result<()> {
    if rows.is_empty() {
        return Err(Error::InvalidConfig("no rows to write".into()));
    }
    let sig = |v: f64| format_significant(v, 10);
    let mut main = BufWriter::new(File::create(path)?);
    writeln!(main, "x\ty1\ty2\ty3")?;
    for r in rows {
        writeln!(main, "{}\t{}\t{}\t{}", sig(r.rho), sig(r.volswap.value), sig(r.zviv.value), sig(r.atmi.value))?;
    }
    main.flush()?;

    let mut se = BufWriter::new(File::create(se_path(path))?);
    writeln!(se, "x\ty1_se\ty2_se\ty3_se")?;
    for r in rows {
        writeln!(
            se,
            "{}\t{}\t{}\t{}",
            sig(r.rho),
            sig(r.volswap.std_error),
            sig(r.zviv.std_error),
            sig(r.atmi.std_error)
        )?;
    }
    se.flush()?;
    Ok(())
}

/// One line of the verification report.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportEntry {
    pub check: String,
    pub case: String,
    pub value: f64,
    pub bound: f64,
    pub std_error: f64,
    pub pass: bool,
}

impl ReportEntry {
    fn new(check: &str, case: String, value: f64, bound: f64, std_error: f64, pass: bool) -> Self {
        Self { check: check.to_string(), case, value, bound, std_error, pass }
    }

    /// `value ≤ bound + 3·std_error`
    pub fn upper(check: &str, case: String, value: f64, bound: f64, std_error: f64) -> Self {
        let pass = value <= bound + 3.0 * std_error;
        Self::new(check, case, value, bound, std_error, pass)
    }

    fn failed(check: &str, case: String, err: &Error) -> Self {
        Self::new(check, format!("{case} error: {err}"), f64::NAN, f64::NAN, f64::NAN, false)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub entries: Vec<ReportEntry>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.entries.iter().all(|e| e.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ReportEntry> {
        self.entries.iter().filter(|e| !e.pass)
    }

    /// Tab-separated rendering with a header line.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("check\tcase\tvalue\tbound\tstd_error\tstatus\n");
        for e in &self.entries {
            let _ = writeln!(
                out,
                "{}\t{}\t{:.6e}\t{:.6e}\t{:.6e}\t{}",
                e.check,
                e.case,
                e.value,
                e.bound,
                e.std_error,
                if e.pass { "PASS" } else { "FAIL" }
            );
        }
        out
    }
}

/// Applies the bound rules to a sweep: ZVIV ≤ volswap at every ρ, ATMI ≤
/// volswap for ρ ≤ 0, each up to three combined standard errors.
pub fn judge_sweep(label: &str, rows: &[SweepRow]) -> Vec<ReportEntry> {
    let mut out = Vec::new();
    for r in rows {
        out.push(ReportEntry::upper(
            "zviv_le_volswap",
            format!("{label} rho={:+.2}", r.rho),
            r.zviv.value - r.volswap.value,
            0.0,
            r.zviv.combined_se(&r.volswap),
        ));
        if r.rho <= 1e-12 {
            out.push(ReportEntry::upper(
                "atmi_le_volswap",
                format!("{label} rho={:+.2}", r.rho),
                r.atmi.value - r.volswap.value,
                0.0,
                r.atmi.combined_se(&r.volswap),
            ));
        }
    }
    out
}

/// `|ZVIV - volswap| < |ATMI - volswap|` at the given correlations.
pub fn judge_ordering(label: &str, rows: &[SweepRow], rhos: &[f64]) -> Vec<ReportEntry> {
    rows.iter()
        .filter(|r| rhos.iter().any(|x| (x - r.rho).abs() < 1e-9))
        .map(|r| {
            let zviv_gap = (r.zviv.value - r.volswap.value).abs();
            let atmi_gap = (r.atmi.value - r.volswap.value).abs();
            ReportEntry::new(
                "zviv_closer_than_atmi",
                format!("{label} rho={:+.2}", r.rho),
                zviv_gap - atmi_gap,
                0.0,
                r.zviv.combined_se(&r.volswap) + r.atmi.combined_se(&r.volswap),
                zviv_gap < atmi_gap,
            )
        })
        .collect()
}

/// Richardson-extrapolated short-maturity slopes `lim (IV - E[v])/T`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeEstimate {
    pub rho: f64,
    pub atmi: Estimate,
    pub zviv: Estimate,
}

/// Correlations of the figure 4 ordering check.
pub const ORDERING_RHOS: [f64; 14] = [-0.9, -0.8, -0.7, -0.6, -0.5, -0.4, -0.3, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];

/// Maturities used for slope extrapolation.
pub const SLOPE_MATURITIES: (f64, f64) = (0.05, 0.025);

/// Estimates both slopes at each correlation from two batches (one per
/// maturity, shared across correlations). The standard error is the
/// conservative sum over the Richardson combination `2f(T/2) - f(T)`.
pub fn slope_estimates(
    sigma0: f64,
    alpha: f64,
    rhos: &[f64],
    paths: usize,
    steps: usize,
    seed: u64,
) -> Result<Vec<SlopeEstimate>> {
    let params = SabrParams::new(sigma0, alpha, 0.0, 0.0)?;
    let (long, short) = SLOPE_MATURITIES;
    let long_batch = simulate_paths(&params, long, steps, paths, seed)?;
    let short_batch = simulate_paths(&params, short, steps, paths, seed)?;
    let vs_long = volswap_strike(&long_batch);
    let vs_short = volswap_strike(&short_batch);

    let scaled = |iv: Estimate, vs: Estimate, t: f64| Estimate {
        value: (iv.value - vs.value) / t,
        std_error: iv.combined_se(&vs) / t,
        n: iv.n,
    };
    let richardson = |f_long: Estimate, f_short: Estimate| Estimate {
        value: 2.0 * f_short.value - f_long.value,
        std_error: 2.0 * f_short.std_error + f_long.std_error,
        n: f_short.n,
    };

    rhos.iter()
        .map(|&rho| {
            let at = |batch: &PathBatch| -> Result<(Estimate, Estimate)> {
                let sol = zero_vanna(batch, rho)?;
                Ok((sol.atmi, sol.zviv))
            };
            let wrap = |e| Error::AtRho { rho, source: Box::new(e) };
            let (atmi_long, zviv_long) = at(&long_batch).map_err(wrap)?;
            let (atmi_short, zviv_short) = at(&short_batch).map_err(wrap)?;
            Ok(SlopeEstimate {
                rho,
                atmi: richardson(scaled(atmi_long, vs_long, long), scaled(atmi_short, vs_short, short)),
                zviv: richardson(scaled(zviv_long, vs_long, long), scaled(zviv_short, vs_short, short)),
            })
        })
        .collect()
}

/// `ATMI - volswap` at one batch and correlation.
pub fn atmi_gap(batch: &PathBatch, rho: f64) -> Result<Estimate> {
    let vs = volswap_strike(batch);
    let a = atmi(batch, rho)?;
    Ok(Estimate { value: a.value - vs.value, std_error: a.combined_se(&vs), n: a.n })
}

/// Quadrature evaluations of the defining integrals behind the closed forms,
/// in the order `(T1 bound, T2, T3, T4)`.
pub fn quadrature_functionals(alpha: f64, sigma0: f64, horizon: f64, rel_tol: f64) -> [f64; 4] {
    let a2 = alpha * alpha;
    let t = horizon;
    let t1 = t * integrate(
        |s| (t - s) * integrate(|r| 4.0 * a2 * sigma0.powi(4) * (6.0 * a2 * r).exp(), s, t, rel_tol),
        0.0,
        t,
        rel_tol,
    );
    let t2 =
        integrate_upper_simplex(|_, r, u| 2.0 * a2 * sigma0.powi(3) * (a2 * u + 2.0 * a2 * r).exp(), 0.0, t, rel_tol);
    let t3 = integrate_upper_simplex(|_, _, u| 4.0 * a2 * sigma0 * sigma0 * (a2 * u).exp(), 0.0, t, rel_tol);
    let t4 = integrate_upper_triangle(|_, r| 2.0 * alpha * sigma0 * sigma0 * (a2 * r).exp(), 0.0, t, rel_tol);
    [t1, t2, t3, t4]
}

/// Settings of [`verify_report`].
#[derive(Debug, Clone, PartialEq)]
pub struct VerifyConfig {
    /// Paths per figure sweep and per slope batch.
    pub paths: usize,
    pub steps: usize,
    pub seed: u64,
    /// Full paths for the Malliavin functional comparison.
    pub malliavin_paths: usize,
    /// Paths and steps for the zero-correlation curvature check.
    pub curvature_paths: usize,
    pub curvature_steps: usize,
    /// Steps for the short-maturity slope batches.
    pub slope_steps: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            paths: 1_000_000,
            steps: 512,
            seed: 42,
            malliavin_paths: 100_000,
            curvature_paths: 10_000_000,
            curvature_steps: 128,
            slope_steps: 64,
        }
    }
}

fn case(alpha: f64, sigma0: f64, horizon: f64) -> String {
    format!("alpha={alpha} sigma0={sigma0} T={horizon}")
}

/// Relative closed-form vs quadrature errors and small-maturity Taylor
/// ratios on the `α ∈ {0.25, 0.5, 1}`, `σ₀ ∈ {0.1, 0.3}`, `T ∈ {0.1, 0.5, 1}` grid.
pub fn closed_form_checks() -> Vec<ReportEntry> {
    let mut out = Vec::new();
    for alpha in [0.25, 0.5, 1.0] {
        for sigma0 in [0.1, 0.3] {
            for horizon in [0.1, 0.5, 1.0] {
                let quad = quadrature_functionals(alpha, sigma0, horizon, 1e-12);
                let closed = [
                    t1_bound(alpha, sigma0, horizon),
                    t2_exact(alpha, sigma0, horizon),
                    t3_exact(alpha, sigma0, horizon),
                    t4_exact(alpha, sigma0, horizon),
                ];
                for (name, (c, q)) in ["t1_bound", "t2", "t3", "t4"].iter().zip(closed.iter().zip(quad)) {
                    let rel = ((c - q) / q).abs();
                    out.push(ReportEntry::new(
                        "closed_form_vs_quadrature",
                        format!("{name} {}", case(alpha, sigma0, horizon)),
                        rel,
                        1e-10,
                        0.0,
                        rel <= 1e-10,
                    ));
                }
            }
        }
        let t = 1e-3;
        let sigma0 = 0.3;
        let ratios = [
            ("t1_bound", t1_bound(alpha, sigma0, t) / t1_leading(alpha, sigma0, t)),
            ("t2", t2_exact(alpha, sigma0, t) / t2_leading(alpha, sigma0, t)),
            ("t3", t3_exact(alpha, sigma0, t) / t3_leading(alpha, sigma0, t)),
            ("t4", t4_exact(alpha, sigma0, t) / t4_leading(alpha, sigma0, t)),
        ];
        for (name, ratio) in ratios {
            out.push(ReportEntry::new(
                "taylor_ratio",
                format!("{name} {}", case(alpha, sigma0, t)),
                ratio,
                1.0,
                0.0,
                (ratio - 1.0).abs() <= 0.01,
            ));
        }
    }
    out
}

/// Monte Carlo Malliavin functionals against their closed forms.
pub fn malliavin_checks(
    sigma0: f64,
    alpha: f64,
    horizon: f64,
    paths: usize,
    steps: usize,
    seed: u64,
) -> Vec<ReportEntry> {
    let label = case(alpha, sigma0, horizon);
    let mc = SabrParams::new(sigma0, alpha, 0.0, 0.0)
        .and_then(|p| simulate_full_paths(&p, horizon, steps, paths, seed))
        .and_then(|b| malliavin_functionals(&b));
    let mc = match mc {
        Ok(m) => m,
        Err(e) => return vec![ReportEntry::failed("malliavin_mc", label, &e)],
    };
    let two_sided = |name: &str, e: Estimate, exact: f64| {
        let dev = e.value - exact;
        ReportEntry::new(
            "malliavin_mc_vs_closed_form",
            format!("{name} {label}"),
            e.value,
            exact,
            e.std_error,
            dev.abs() <= 3.0 * e.std_error,
        )
    };
    vec![
        ReportEntry::upper(
            "malliavin_mc_le_bound",
            format!("t1 {label}"),
            mc.t1.value,
            t1_bound(alpha, sigma0, horizon),
            mc.t1.std_error,
        ),
        two_sided("t2", mc.t2, t2_exact(alpha, sigma0, horizon)),
        two_sided("t3", mc.t3, t3_exact(alpha, sigma0, horizon)),
        two_sided("t4", mc.t4, t4_exact(alpha, sigma0, horizon)),
    ]
}

/// Curvature of `ATMI - volswap` at zero correlation: negative by three
/// combined standard errors, and within a factor two of `-α²σ₀³T²/24`.
pub fn curvature_checks(
    sigma0: f64,
    alpha: f64,
    horizon: f64,
    paths: usize,
    steps: usize,
    seed: u64,
) -> Vec<ReportEntry> {
    let label = case(alpha, sigma0, horizon);
    let gap = SabrParams::new(sigma0, alpha, 0.0, 0.0)
        .and_then(|p| simulate_paths(&p, horizon, steps, paths, seed))
        .and_then(|b| atmi_gap(&b, 0.0));
    let gap = match gap {
        Ok(g) => g,
        Err(e) => return vec![ReportEntry::failed("atmi_curvature_rho0", label, &e)],
    };
    let predicted = atmi_curvature_rho0(alpha, sigma0) * horizon * horizon;
    let ratio = gap.value / predicted;
    vec![
        ReportEntry::new(
            "atmi_gap_negative_rho0",
            label.clone(),
            gap.value,
            0.0,
            gap.std_error,
            gap.value + 3.0 * gap.std_error <= 0.0,
        ),
        ReportEntry::new(
            "atmi_curvature_ratio_rho0",
            label,
            ratio,
            1.0,
            gap.std_error / predicted.abs(),
            (0.5..=2.0).contains(&ratio),
        ),
    ]
}

/// Short-maturity slope checks against [`atmi_slope_bound`] and
/// [`zviv_slope_limit`].
pub fn slope_checks(sigma0: f64, alpha: f64, rhos: &[f64], paths: usize, steps: usize, seed: u64) -> Vec<ReportEntry> {
    match slope_estimates(sigma0, alpha, rhos, paths, steps, seed) {
        Ok(slopes) => slopes
            .iter()
            .flat_map(|s| {
                let label = format!("alpha={alpha} sigma0={sigma0} rho={:+.2}", s.rho);
                [
                    ReportEntry::upper(
                        "atmi_slope_le_bound",
                        label.clone(),
                        s.atmi.value,
                        atmi_slope_bound(s.rho, alpha, sigma0),
                        s.atmi.std_error,
                    ),
                    ReportEntry::upper(
                        "zviv_slope_le_limit",
                        label,
                        s.zviv.value,
                        zviv_slope_limit(),
                        s.zviv.std_error,
                    ),
                ]
            })
            .collect(),
        Err(e) => vec![ReportEntry::failed("slopes", format!("alpha={alpha} sigma0={sigma0}"), &e)],
    }
}

/// Assembles the full verification report: the four figure sweeps, the
/// short-maturity slopes, the zero-correlation curvature, closed forms
/// against quadrature, and Monte Carlo Malliavin functionals.
pub fn verify_report(cfg: &VerifyConfig) -> Report {
    let mut report = Report::default();
    for (idx, &(sigma0, alpha, horizon)) in FIGURES.iter().enumerate() {
        let label = format!("fig{}", idx + 1);
        let started = Instant::now();
        let sweep = SweepConfig {
            sigma0,
            alpha,
            horizon,
            paths: cfg.paths,
            steps: cfg.steps,
            seed: cfg.seed,
            ..SweepConfig::default()
        };
        let batch = match sweep.params(0.0).and_then(|p| simulate_paths(&p, horizon, cfg.steps, cfg.paths, cfg.seed)) {
            Ok(b) => b,
            Err(e) => {
                report.entries.push(ReportEntry::failed("sweep", label, &e));
                continue;
            }
        };
        let volswap = volswap_strike(&batch);
        let mut rows = Vec::new();
        for rho in sweep.rho_grid() {
            match solve_row(&batch, volswap, rho) {
                Ok(row) => rows.push(row),
                Err(e) => report.entries.push(ReportEntry::failed("sweep", format!("{label} rho={rho:+.2}"), &e)),
            }
        }
        report.entries.extend(judge_sweep(&label, &rows));
        if idx == 3 {
            report.entries.extend(judge_ordering(&label, &rows, &ORDERING_RHOS));
        }
        info!("{label} sweep done in {:.1?}", started.elapsed());
    }

    report.entries.extend(slope_checks(0.3, 0.5, &[-0.5, 0.0, 0.5], cfg.paths, cfg.slope_steps, cfg.seed));
    report.entries.extend(curvature_checks(0.3, 1.0, 0.5, cfg.curvature_paths, cfg.curvature_steps, cfg.seed));
    report.entries.extend(closed_form_checks());
    for &(sigma0, alpha, horizon) in &FIGURES {
        report.entries.extend(malliavin_checks(sigma0, alpha, horizon, cfg.malliavin_paths, cfg.steps, cfg.seed));
    }
    report
}

/// Prices a call on a fresh batch by the mixing formula.
pub fn price_call(cfg: &SweepConfig, rho: f64, k: f64) -> Result<Estimate> {
    cfg.validate()?;
    let batch = simulate_paths(&cfg.params(rho)?, cfg.horizon, cfg.steps, cfg.paths, cfg.seed)?;
    Ok(ConditionalSmile::new(&batch, rho)?.call_price(k))
}
