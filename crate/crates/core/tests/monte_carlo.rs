use volbound_core::asymptotics::{vanna_positivity, GridPath};
use volbound_core::sabr::riemann_stochastic_integral;
use volbound_core::{
    atmi, euler_oracle_price, malliavin_functionals, mixing_call_price, simulate_full_paths, simulate_paths,
    volswap_strike, zero_vanna, BsQuote, Estimate, SabrParams,
};

fn mean_se(xs: impl Iterator<Item = f64>) -> Estimate {
    let v: Vec<f64> = xs.collect();
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0);
    Estimate { value: m, std_error: (var / n).sqrt(), n: v.len() }
}

#[test]
fn integrated_variance_mean() {
    let p = SabrParams::new(0.3, 0.5, 0.0, 0.0).unwrap();
    let b = simulate_paths(&p, 0.5, 64, 1_000_000, 11).unwrap();
    let y = mean_se(b.integrated_variance().iter().copied());
    let exact = 0.36 * (0.125f64.exp() - 1.0);
    assert!((exact - 0.0479335).abs() < 1e-7);
    assert!(y.z_score(exact).abs() <= 3.0, "{y:?} vs {exact}");
    assert!(b.integrated_variance().iter().all(|&y| y > 0.0));

    let s2 = mean_se(b.sigma_end().iter().map(|s| s * s));
    assert!(s2.z_score(p.moment_sigma(0.5, 2)).abs() <= 3.0);

    let vs = volswap_strike(&b);
    let mean_y = b.integrated_variance().iter().sum::<f64>() / b.len() as f64;
    assert!(vs.value <= (mean_y / 0.5).sqrt());
    assert!(vs.value <= (p.expected_integrated_variance(0.5) / 0.5).sqrt() + 3.0 * vs.std_error);
}

#[test]
fn moment_reference_values() {
    let p = SabrParams::new(0.3, 1.0, 0.0, 0.0).unwrap();
    assert!((p.moment_sigma(1.0, 2) - 0.09 * 1f64.exp()).abs() < 1e-15);
    assert!((p.moment_sigma(0.5, 4) - 0.0081 * 3f64.exp()).abs() < 1e-15);
    assert!((p.expected_integrated_variance(1.0) - 0.09 * (1f64.exp() - 1.0)).abs() < 1e-15);
}

#[test]
fn riemann_integral_converges_to_identity() {
    let p = SabrParams::new(0.3, 1.0, 0.0, 0.0).unwrap();
    let horizon = 1.0;
    let paths = 200;
    let mut points = Vec::new();
    for steps in [64usize, 128, 256, 512, 1024, 2048, 4096] {
        let b = simulate_paths(&p, horizon, steps, paths, 5).unwrap();
        let err: f64 = (0..paths)
            .map(|i| {
                let r = riemann_stochastic_integral(&p, horizon, steps, 5, i);
                (r - b.stochastic_integral()[i]).powi(2)
            })
            .sum::<f64>()
            / paths as f64;
        points.push(((steps as f64).ln(), err.sqrt().ln()));
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let slope = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
        / points.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    assert!(slope <= -0.4, "log-log slope {slope}");
}

#[test]
fn mixing_agrees_with_euler() {
    for rho in [-0.7, 0.0] {
        let p = SabrParams::new(0.3, 0.5, rho, 0.0).unwrap();
        let b = simulate_paths(&p, 0.5, 256, 200_000, 21).unwrap();
        let mix = mixing_call_price(&b, rho, 0.0).unwrap();
        let euler = euler_oracle_price(&p, 0.5, 0.0, 256, 200_000, 21).unwrap();
        assert!((mix.value - euler.value).abs() <= 3.0 * mix.combined_se(&euler), "rho {rho}: {mix:?} vs {euler:?}");
    }
}

#[test]
fn euler_flat_is_black_scholes() {
    let p = SabrParams::new(0.2, 1e-12, -0.3, 0.0).unwrap();
    let e = euler_oracle_price(&p, 1.0, 0.0, 16, 200_000, 3).unwrap();
    assert!(e.z_score(0.0796557).abs() <= 3.0, "{e:?}");
    let far = euler_oracle_price(&p, 1.0, 10.0, 16, 10_000, 3).unwrap();
    assert!(far.value < 1e-12);
}

#[test]
fn prices_respect_arbitrage_bounds() {
    let p = SabrParams::new(0.3, 1.0, 0.0, 0.0).unwrap();
    let b = simulate_paths(&p, 1.0, 64, 50_000, 2).unwrap();
    for rho in [-1.0, -0.5, 0.0, 0.5, 1.0] {
        // sample forward: the call at a vanishing strike
        let forward = mixing_call_price(&b, rho, -60.0).unwrap();
        // the spot is a strict local martingale for positive correlation
        if rho <= 0.0 {
            assert!(forward.z_score(1.0).abs() <= 4.0, "rho {rho}: {forward:?}");
        }
        let mut last = f64::INFINITY;
        for i in 0..=40 {
            let k = -1.0 + i as f64 * 0.05;
            let c = mixing_call_price(&b, rho, k).unwrap();
            assert!(c.value >= (forward.value - k.exp()).max(0.0) - 1e-12);
            assert!(c.value < forward.value);
            assert!(c.value <= last);
            last = c.value;
        }
    }
}

#[test]
fn zero_correlation_mixing_is_average_bs() {
    let p = SabrParams::new(0.3, 0.8, 0.0, 0.1).unwrap();
    let b = simulate_paths(&p, 0.5, 32, 5_000, 4).unwrap();
    let direct =
        b.integrated_variance().iter().map(|y| BsQuote::new(0.1, 0.05, 0.5, (y / 0.5).sqrt()).call()).sum::<f64>()
            / b.len() as f64;
    let mix = mixing_call_price(&b, 0.0, 0.05).unwrap();
    assert!((mix.value - direct).abs() < 1e-13);
}

#[test]
fn malliavin_t4_and_t1() {
    let p = SabrParams::new(0.3, 0.5, 0.0, 0.0).unwrap();
    let b = simulate_full_paths(&p, 1.0, 256, 20_000, 9).unwrap();
    let m = malliavin_functionals(&b).unwrap();
    assert!(m.t4.z_score(0.0532526).abs() <= 3.0, "{:?}", m.t4);
    assert!(m.t1.value <= volbound_core::asymptotics::t1_bound(0.5, 0.3, 1.0) + 3.0 * m.t1.std_error);
    let summary = simulate_paths(&p, 1.0, 256, 10, 9).unwrap();
    assert!(malliavin_functionals(&summary).is_err());
}

#[test]
fn positivity_holds_on_simulated_paths() {
    use rand::{Rng, SeedableRng};
    let p = SabrParams::new(0.3, 1.0, 0.0, 0.0).unwrap();
    let steps = 128;
    let b = simulate_full_paths(&p, 1.0, steps, 2_000, 13).unwrap();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
    for i in 0..b.len() {
        let path = GridPath { sigma: b.path(i).unwrap(), dt: b.dt(), alpha: 1.0 };
        for _ in 0..10 {
            let r = rng.random_range(0..steps);
            let s = rng.random_range(0..steps);
            let t0 = rng.random_range(0..=r.min(s));
            assert!(vanna_positivity(&path, r, s, t0).unwrap() >= -1e-12);
        }
    }
}

#[test]
fn zviv_nearly_symmetric_in_rho() {
    let p = SabrParams::new(0.3, 1.0, 0.0, 0.0).unwrap();
    let b = simulate_paths(&p, 1.0, 128, 200_000, 17).unwrap();
    let vs = volswap_strike(&b);
    for rho in [0.1, 0.2, 0.3, 0.4, 0.5] {
        let up = zero_vanna(&b, rho).unwrap().zviv;
        let down = zero_vanna(&b, -rho).unwrap().zviv;
        let tol = (5.0 * up.combined_se(&down)).max(0.1 * (up.value - vs.value).abs());
        assert!((up.value - down.value).abs() <= tol, "rho {rho}: {up:?} vs {down:?}");
    }
}

#[test]
fn atmi_below_volswap_at_zero_correlation() {
    let p = SabrParams::new(0.3, 1.0, 0.0, 0.0).unwrap();
    let b = simulate_paths(&p, 0.5, 64, 300_000, 23).unwrap();
    let a = atmi(&b, 0.0).unwrap();
    let vs = volswap_strike(&b);
    assert!(a.value < vs.value);
}

#[test]
fn volswap_in_figure_window() {
    let p = SabrParams::new(0.3, 1.0, 0.0, 0.0).unwrap();
    let b = simulate_paths(&p, 1.0, 128, 200_000, 1).unwrap();
    let vs = volswap_strike(&b);
    assert!(vs.value > 0.25 && vs.value < 0.35, "{vs:?}");
    let a = atmi(&b, 0.9).unwrap();
    assert!(a.value > 0.25 && a.value < 0.35, "{a:?}");
}
