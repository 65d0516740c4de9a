//! `volbound`: correlation sweeps, figure presets, one-shot estimators and the
//! verification report.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use log::info;
use volbound_core::experiments::{price_call, run_sweep, verify_report, write_tsv, SweepConfig, VerifyConfig};
use volbound_core::{simulate_paths, volswap_strike, zero_vanna, Error};

const THREADS_VAR: &str = "VOLBOUND_THREADS";

#[derive(Parser, Debug)]
#[command(name = "volbound", version, about = "Volatility swap bounds under lognormal SABR")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sweep correlation and write the volswap/ZVIV/ATMI table.
    Sweep(SweepArgs),
    /// Sweep one of the four preset figure configurations.
    Figure {
        #[arg(long)]
        id: u8,
        #[command(flatten)]
        sweep: SweepArgs,
    },
    /// Run the inequality and asymptotics checks and print a PASS/FAIL report.
    Verify(VerifyArgs),
    /// Mixing call price at one correlation and log strike.
    Price {
        #[command(flatten)]
        sweep: SweepArgs,
        #[arg(long, allow_negative_numbers = true)]
        rho: f64,
        #[arg(long, allow_negative_numbers = true)]
        k: f64,
    },
    /// Volatility swap fair strike.
    Volswap(SweepArgs),
    /// Zero-vanna strike, ZVIV and ATMI at one correlation.
    Zviv {
        #[command(flatten)]
        sweep: SweepArgs,
        #[arg(long, allow_negative_numbers = true)]
        rho: f64,
    },
}

/// Flags mirroring the config file keys. Flags win over the file.
#[derive(Args, Debug, Default)]
struct SweepArgs {
    /// Flat `key = value` config file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, allow_negative_numbers = true)]
    sigma0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    alpha: Option<f64>,
    /// Maturity in years.
    #[arg(long = "T", allow_negative_numbers = true)]
    horizon: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    x0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    rho_start: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    rho_end: Option<f64>,
    #[arg(long)]
    rho_step: Option<f64>,
    #[arg(long)]
    paths: Option<usize>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl SweepArgs {
    fn resolve(&self, mut cfg: SweepConfig) -> anyhow::Result<SweepConfig> {
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::InvalidConfig(format!("cannot read {}: {e}", path.display())))?;
            cfg.apply_config_text(&text)?;
        }
        macro_rules! apply {
            ($($field:ident => $target:ident),*) => {
                $(if let Some(v) = &self.$field { cfg.$target = v.clone(); })*
            };
        }
        apply!(sigma0 => sigma0, alpha => alpha, horizon => horizon, x0 => x0, rho_start => rho_start,
            rho_end => rho_end, rho_step => rho_step, paths => paths, steps => steps, seed => seed, out => out);
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Paths per figure sweep and per slope batch.
    #[arg(long, default_value_t = VerifyConfig::default().paths)]
    paths: usize,
    #[arg(long, default_value_t = VerifyConfig::default().steps)]
    steps: usize,
    #[arg(long, default_value_t = VerifyConfig::default().seed)]
    seed: u64,
    #[arg(long, default_value_t = VerifyConfig::default().malliavin_paths)]
    malliavin_paths: usize,
    #[arg(long, default_value_t = VerifyConfig::default().curvature_paths)]
    curvature_paths: usize,
    #[arg(long, default_value_t = VerifyConfig::default().curvature_steps)]
    curvature_steps: usize,
    #[arg(long, default_value_t = VerifyConfig::default().slope_steps)]
    slope_steps: usize,
    /// Also write the report to this file.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn init_threads() -> anyhow::Result<()> {
    let Ok(value) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::InvalidConfig(format!("{THREADS_VAR} must be a positive integer, got {value:?}")))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("configuring worker threads")?;
    Ok(())
}

fn sweep(cfg: &SweepConfig) -> anyhow::Result<()> {
    let rows = run_sweep(cfg)?;
    write_tsv(&rows, &cfg.out).with_context(|| format!("writing {}", cfg.out.display()))?;
    info!("wrote {} rows to {}", rows.len(), cfg.out.display());
    Ok(())
}

/// Returns whether every check passed.
fn run(cli: Cli) -> anyhow::Result<bool> {
    match cli.command {
        Command::Sweep(args) => sweep(&args.resolve(SweepConfig::default())?)?,
        Command::Figure { id, sweep: args } => sweep(&args.resolve(SweepConfig::figure(id)?)?)?,
        Command::Verify(args) => {
            let cfg = VerifyConfig {
                paths: args.paths,
                steps: args.steps,
                seed: args.seed,
                malliavin_paths: args.malliavin_paths,
                curvature_paths: args.curvature_paths,
                curvature_steps: args.curvature_steps,
                slope_steps: args.slope_steps,
            };
            if [cfg.paths, cfg.steps, cfg.malliavin_paths, cfg.curvature_paths, cfg.curvature_steps, cfg.slope_steps]
                .contains(&0)
            {
                return Err(Error::InvalidConfig("verify sizes must be at least 1".into()).into());
            }
            let report = verify_report(&cfg);
            let text = report.to_tsv();
            print!("{text}");
            if let Some(path) = args.out {
                std::fs::write(&path, &text).with_context(|| format!("writing {}", path.display()))?;
            }
            let failed = report.failures().count();
            eprintln!("{} checks, {failed} failed", report.entries.len());
            return Ok(failed == 0);
        }
        Command::Price { sweep: args, rho, k } => {
            let cfg = args.resolve(SweepConfig::default())?;
            let e = price_call(&cfg, rho, k)?;
            println!("price\tstd_error\tn\n{}\t{}\t{}", e.value, e.std_error, e.n);
        }
        Command::Volswap(args) => {
            let cfg = args.resolve(SweepConfig::default())?;
            let batch = simulate_paths(&cfg.params(0.0)?, cfg.horizon, cfg.steps, cfg.paths, cfg.seed)?;
            let e = volswap_strike(&batch);
            println!("volswap\tstd_error\tn\n{}\t{}\t{}", e.value, e.std_error, e.n);
        }
        Command::Zviv { sweep: args, rho } => {
            let cfg = args.resolve(SweepConfig::default())?;
            let batch = simulate_paths(&cfg.params(rho)?, cfg.horizon, cfg.steps, cfg.paths, cfg.seed)?;
            let s = zero_vanna(&batch, rho)?;
            println!("k_hat\tzviv\tzviv_se\tk_star\tatmi\tatmi_se\titerations\tresidual");
            println!(
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{:e}",
                s.k_hat,
                s.zviv.value,
                s.zviv.std_error,
                s.k_star,
                s.atmi.value,
                s.atmi.std_error,
                s.iterations,
                s.residual
            );
        }
    }
    Ok(true)
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(e) if e.is_config() => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = init_threads().and_then(|()| run(cli));
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
