//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.
//!
//! Outage depends on the SNRs only through t = γ_th/γ̄, so the analytic and
//! simulated checks below fix γ̄ = 1 and pass t as the threshold.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use anyhow::{ensure, Result};
use fas_thz_cli::{execute, load_config, Command};
use fas_thz_core::calibration::{fold_factor, solve_ratio, TwoPointFit};
use fas_thz_core::channel::{conditional_port_cdf, MixingVariable};
use fas_thz_core::montecarlo::{diversity_counts, OutageEstimate};
use fas_thz_core::quadrature::integrate_gamma;
use fas_thz_core::specfun::reg_gamma_lower;
use fas_thz_core::{
    mc_op_fas, mc_op_mgc, mc_op_sc, op_fas, op_sc_fas, AlphaMuParams, DiversityConfig, MCSettings,
    PortLayout, QuadratureSpec, Result as CoreResult,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Criterion = fn() -> Result<Verdict>;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Result<Verdict> {
    Ok(Verdict {
        pass,
        detail: detail.into(),
    })
}

fn quad() -> QuadratureSpec {
    QuadratureSpec::default()
}

fn mc(trials: u64, seed: u64) -> MCSettings {
    MCSettings {
        trials,
        seed,
        confidence: 0.99,
    }
}

fn fas(alpha: f64, mu: u32, ports: usize, w: f64, t: f64) -> CoreResult<f64> {
    let params = AlphaMuParams::new(alpha, mu)?;
    op_fas(&params, &PortLayout::new(ports, w)?, 1.0, t, &quad())
}

fn sc(alpha: f64, mu: u32, ports: usize, w: f64, order: usize, t: f64) -> CoreResult<f64> {
    let params = AlphaMuParams::new(alpha, mu)?;
    let layout = PortLayout::new(ports, w)?;
    op_sc_fas(
        &params,
        &layout,
        &DiversityConfig::sc(order),
        1.0,
        t,
        &quad(),
    )
}

fn within(analytic: f64, est: &OutageEstimate) -> bool {
    (analytic - est.value).abs() <= 3.0 * est.half_width
}

/// Closed-form degeneracy at L = 1.
fn a1() -> Result<Verdict> {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for mu in [1, 2, 3, 4, 8] {
        for t in [0.01, 0.1, 0.5, 1.0, 3.0] {
            let exact = reg_gamma_lower(mu as f64, t)?;
            worst = worst.max((fas(2.0, mu, 1, 1.0, t)? - exact).abs() / exact);
            // a single port with r < 1 goes through the quadrature path
            let params = AlphaMuParams::new(2.0, mu)?;
            for r in [0.3, 0.9] {
                let layout = PortLayout::with_correlation(1, 1.0, r)?;
                let q = op_fas(&params, &layout, 1.0, t, &quad())?;
                worst = worst.max((q - exact).abs() / exact);
            }
        }
    }
    let elapsed = start.elapsed();
    verdict(
        worst <= 1e-10 && elapsed < Duration::from_secs(1),
        format!("max rel err {worst:.2e} (tol 1e-10), {elapsed:.2?} (limit 1 s)"),
    )
}

/// Analytic against Monte Carlo, FAS and SC.
fn a2() -> Result<Verdict> {
    let start = Instant::now();
    let t = 1.0;
    let settings = mc(1_000_000, 2024);
    let mut checked = 0;
    let mut failures = Vec::new();
    for mu in [1, 2, 4] {
        let params = AlphaMuParams::new(2.0, mu)?;
        for w in [0.5, 1.0, 2.0] {
            for ports in [5, 20, 50] {
                let layout = PortLayout::new(ports, w)?;
                let exact = op_fas(&params, &layout, 1.0, t, &quad())?;
                let est = mc_op_fas(&params, &layout, 1.0, t, &settings)?;
                checked += 1;
                if !within(exact, &est) {
                    failures.push(format!(
                        "fas mu={mu} W={w} L={ports}: {exact:.4e} vs {:.4e}",
                        est.value
                    ));
                }
                for order in [2, 4] {
                    if ports % order != 0 {
                        continue;
                    }
                    let div = DiversityConfig::sc(order);
                    let exact = op_sc_fas(&params, &layout, &div, 1.0, t, &quad())?;
                    let est = mc_op_sc(&params, &layout, &div, 1.0, t, &settings)?;
                    checked += 1;
                    if !within(exact, &est) {
                        failures.push(format!(
                            "sc M={order} mu={mu} W={w} L={ports}: {exact:.4e} vs {:.4e}",
                            est.value
                        ));
                    }
                }
            }
        }
    }
    let elapsed = start.elapsed();
    verdict(
        failures.is_empty() && elapsed < Duration::from_secs(300),
        format!(
            "{}/{checked} points within 3 half-widths at 1e6 trials, t = 1, {elapsed:.2?} (limit 300 s){}",
            checked - failures.len(),
            if failures.is_empty() { String::new() } else { format!("; {}", failures.join("; ")) }
        ),
    )
}

/// u-average of the conditional CDF against the marginal CDF.
fn a3() -> Result<Verdict> {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let mu: u32 = rng.gen_range(1..=8);
        let r: f64 = rng.gen_range(0.0..0.95);
        let t: f64 = rng.gen_range(0.05..5.0);
        let params = AlphaMuParams::new(2.0, mu)?;
        let layout = PortLayout::with_correlation(2, 1.0, r)?;
        let avg = integrate_gamma(mu as f64, &quad(), |u| {
            conditional_port_cdf(&params, &layout, MixingVariable(u), t)
        })?;
        let exact = reg_gamma_lower(mu as f64, t)?;
        worst = worst.max((avg - exact).abs() / exact);
    }
    let elapsed = start.elapsed();
    verdict(
        worst <= 1e-8 && elapsed < Duration::from_secs(1),
        format!("max rel err {worst:.2e} over 10 triples (tol 1e-8), {elapsed:.2?} (limit 1 s)"),
    )
}

/// MGC outage is contained in SC outage at matched draws.
fn a4() -> Result<Verdict> {
    let configs: [(u32, f64, usize, usize, f64); 10] = [
        (1, 0.5, 8, 2, 1.0),
        (1, 1.0, 20, 4, 2.0),
        (2, 0.5, 10, 2, 0.5),
        (2, 2.0, 32, 4, 3.0),
        (2, 1.0, 50, 2, 1.5),
        (3, 1.5, 12, 3, 2.0),
        (4, 0.5, 40, 4, 4.0),
        (4, 2.0, 16, 2, 2.5),
        (8, 1.0, 24, 4, 6.0),
        (1, 2.0, 100, 4, 0.8),
    ];
    let mut violations = 0u64;
    for (i, (mu, w, ports, order, t)) in configs.into_iter().enumerate() {
        let params = AlphaMuParams::new(2.0, mu)?;
        let layout = PortLayout::new(ports, w)?;
        let settings = mc(100_000, 40 + i as u64);
        let tube = layout.split(order)?;
        let counts = diversity_counts(&params, &tube, order, 1.0, t, &settings)?;
        let sc_est = mc_op_sc(
            &params,
            &layout,
            &DiversityConfig::sc(order),
            1.0,
            t,
            &settings,
        )?;
        let mgc_est = mc_op_mgc(
            &params,
            &layout,
            &DiversityConfig::mgc(order),
            1.0,
            t,
            &settings,
        )?;
        violations += counts.mgc_without_sc;
        if mgc_est.value > sc_est.value || counts.mgc_outages > counts.sc_outages {
            violations += 1;
        }
    }
    verdict(
        violations == 0,
        format!(
            "{violations} trials with MGC outage but no SC outage over 10 configs x 1e5 trials"
        ),
    )
}

/// Two-point calibration on the α sweep at μ = 1, W = 1, L = 50.
fn a5() -> Result<Verdict> {
    let op = |alpha: f64, t: f64| fas(alpha, 1, 50, 1.0, t);
    let fit = TwoPointFit::fit((1.0, 0.237), (2.0, 0.035), op)?;
    let mut pass = true;
    let mut parts = vec![format!(
        "gamma_bar {:.4}, x {:.4}",
        fit.gamma_bar, fit.envelope_threshold
    )];
    for (alpha, reference) in [(3.0, 9.085e-4), (4.0, 2.115e-6)] {
        let predicted = fas(alpha, 1, 50, 1.0, fit.ratio(alpha))?;
        let factor = fold_factor(predicted, reference)?;
        pass &= factor <= 3.0;
        parts.push(format!(
            "OP(alpha={alpha}) {predicted:.4e} vs {reference:.4e} (x{factor:.2}, limit x3)"
        ));
    }
    verdict(pass, parts.join("; "))
}

/// μ ordering and port-count trend at α = 1, W = 0.5.
fn a6() -> Result<Verdict> {
    let t = solve_ratio(0.42, |t| fas(1.0, 1, 10, 0.5, t))?;
    let reference = [(1, 0.42), (2, 0.047), (4, 1.5e-5)];
    let mut values = Vec::new();
    for (mu, _) in reference {
        values.push(fas(1.0, mu, 10, 0.5, t)?);
    }
    let ordered = values[0] > values[1] && values[1] > values[2];
    let mut worst_fold = 1.0f64;
    for (v, (_, published)) in values.iter().zip(reference) {
        worst_fold = worst_fold.max(fold_factor(*v, published)?);
    }
    for i in 0..2 {
        let model = values[i] / values[i + 1];
        let published = reference[i].1 / reference[i + 1].1;
        worst_fold = worst_fold.max(fold_factor(model, published)?);
    }

    let sweep: Vec<f64> = (1..=10)
        .map(|k| fas(1.0, 2, 10 * k, 0.5, t))
        .collect::<CoreResult<_>>()?;
    let monotone = sweep.windows(2).all(|p| p[1] <= p[0]);
    let gain = sweep[0] / sweep[9];
    let gain_fold = fold_factor(gain, 130.0)?;

    verdict(
        ordered && worst_fold <= 10.0 && monotone && gain_fold <= 5.0,
        format!(
            "t {t:.4}; OP(mu=1,2,4) {:.3e} > {:.3e} > {:.3e}: {ordered}, worst fold x{worst_fold:.2} (limit x10); \
             L=10..100 nonincreasing: {monotone}, gain {gain:.1} vs 130 (x{gain_fold:.2}, limit x5)",
            values[0], values[1], values[2]
        ),
    )
}

/// Diversity ordering at L = 32, W = 2, μ = 2, α = 2.
fn a7() -> Result<Verdict> {
    let (alpha, mu, ports, w) = (2.0, 2, 32, 2.0);
    let t = solve_ratio(0.072667, |t| sc(alpha, mu, ports, w, 4, t))?;
    let params = AlphaMuParams::new(alpha, mu)?;
    let layout = PortLayout::new(ports, w)?;
    let settings = mc(1_000_000, 7);
    let fas_est = mc_op_fas(&params, &layout, 1.0, t, &settings)?;
    let sc2 = mc_op_sc(&params, &layout, &DiversityConfig::sc(2), 1.0, t, &settings)?;
    let mgc2 = mc_op_mgc(
        &params,
        &layout,
        &DiversityConfig::mgc(2),
        1.0,
        t,
        &settings,
    )?;
    let mgc4 = mc_op_mgc(
        &params,
        &layout,
        &DiversityConfig::mgc(4),
        1.0,
        t,
        &settings,
    )?;
    let beats = |a: &OutageEstimate, b: &OutageEstimate| a.upper() < b.lower();
    let checks = [
        ("MGC2 < FAS", beats(&mgc2, &fas_est)),
        ("MGC4 < FAS", beats(&mgc4, &fas_est)),
        ("FAS < SC2", beats(&fas_est, &sc2)),
    ];
    let pass = checks.iter().all(|c| c.1);
    let show = |e: &OutageEstimate| format!("{:.4e}±{:.1e}", e.value, e.half_width);
    verdict(
        pass,
        format!(
            "t {t:.4}; FAS {}, SC2 {}, MGC2 {}, MGC4 {}; {}",
            show(&fas_est),
            show(&sc2),
            show(&mgc2),
            show(&mgc4),
            checks
                .iter()
                .map(|(name, ok)| format!("{name}: {ok}"))
                .collect::<Vec<_>>()
                .join(", ")
        ),
    )
}

/// Byte-identical CSV for one and several workers.
fn a8() -> Result<Verdict> {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("configs/default.json");
    let cfg = load_config(&path)?;
    let mut identical = true;
    let mut agree = true;
    for cmd in [Command::McValidate, Command::OpCurve, Command::Corr] {
        let one = execute(cmd, &cfg, 1)?.unwrap_or_default();
        let many = execute(cmd, &cfg, 4)?.unwrap_or_default();
        let again = execute(cmd, &cfg, 4)?.unwrap_or_default();
        ensure!(!one.is_empty(), "empty output for {}", cmd.name());
        identical &= one == many && many == again;
        if cmd == Command::McValidate {
            agree &= one
                .lines()
                .filter(|l| !l.starts_with('#'))
                .skip(1)
                .all(|l| l.ends_with(",true"));
        }
    }
    verdict(
        identical && agree,
        format!(
            "1 vs 4 workers byte-identical: {identical}; default mc-validate all agree: {agree}"
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, Criterion); 8] = [
        ("A1 closed-form degeneracy", a1),
        ("A2 analytic/MC cross-validation", a2),
        ("A3 mixture identity", a3),
        ("A4 event nesting", a4),
        ("A5 calibrated alpha sweep", a5),
        ("A6 mu ordering and port trend", a6),
        ("A7 diversity ordering", a7),
        ("A8 determinism", a8),
    ];
    // `cargo test --test acceptance -- A1 A3` runs a subset
    let only: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let mut failed = 0;
    for (name, check) in criteria {
        if !only.is_empty() && !only.iter().any(|o| name.starts_with(o.as_str())) {
            continue;
        }
        let (pass, detail) = match check() {
            Ok(v) => (v.pass, v.detail),
            Err(e) => (false, format!("error: {e:#}")),
        };
        failed += !pass as usize;
        println!("{} {name}: {detail}", if pass { "PASS" } else { "FAIL" });
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} acceptance criteria failed");
        ExitCode::FAILURE
    }
}
