//! Plasma echo run and the kernel-sum scaling study.

use serde_json::json;
use vpfp_core::constants::StabilityConstants;
use vpfp_core::echo::{echo_experiment, kernel_sum_scaling, EchoConfig, EchoReport, KernelSumOptions};
use vpfp_core::gevrey::GevreyWeight;
use vpfp_core::io::LinePlot;

use super::Setup;
use crate::report::{CliError, Context, Summary};

fn echo_summary(r: &EchoReport) -> serde_json::Value {
    json!({
        "epsilon": r.config.epsilon,
        "primary_max": r.primary_max,
        "noise_floor": r.noise_floor,
        "late_max": r.late_max,
        "late_argmax": r.late_argmax,
        "t_peak": r.t_peak,
        "predicted_t": r.predicted_t,
    })
}

pub fn echo(s: Setup) -> Result<Summary, CliError> {
    let p = &s.params;
    let d = EchoConfig::default();
    let cfg = EchoConfig {
        nu: p.get("echo.nu", d.nu)?,
        epsilon: p.get("echo.epsilon", d.epsilon)?,
        eta0: p.get("echo.eta0", d.eta0)?,
        bump_mode: p.get("echo.bump_mode", d.bump_mode)?,
        bump_width: p.get("echo.bump_width", d.bump_width)?,
        seed_amplitude: p.get("echo.seed_amplitude", d.seed_amplitude)?,
        kmax: p.get("echo.kmax", d.kmax)?,
        eta_max: p.get("echo.eta_max", d.eta_max)?,
        d_eta: p.get("echo.d_eta", d.d_eta)?,
        dt: p.get("echo.dt", d.dt)?,
        t_end_factor: p.get("echo.t_end_factor", d.t_end_factor)?,
        nonlinear: p.get("echo.nonlinear", d.nonlinear)?,
    };
    let compare = p.get("echo.compare_half_epsilon", true)?;
    let mut art = s.start()?;
    let (full, half) = if compare {
        let half_cfg = EchoConfig {
            epsilon: cfg.epsilon / 2.0,
            ..cfg
        };
        let (a, b) = rayon::join(|| echo_experiment(&cfg), || echo_experiment(&half_cfg));
        (a.ctx("echo run")?, Some(b.ctx("echo run at epsilon/2")?))
    } else {
        (echo_experiment(&cfg).ctx("echo run")?, None)
    };
    let mut header = vec!["t", "abs_rho1"];
    let mut plot = LinePlot::new("plasma echo: |rho_hat(t,1)|", "t", "|rho_hat(t,1)|").log_y().with_series(
        &format!("epsilon = {}", cfg.epsilon),
        full.times.iter().zip(&full.abs_rho1).filter(|(_, v)| **v > 0.0).map(|(t, v)| (*t, *v)).collect(),
    );
    if let Some(h) = &half {
        header.push("abs_rho1_half_epsilon");
        plot = plot.with_series(
            &format!("epsilon = {}", h.config.epsilon),
            h.times.iter().zip(&h.abs_rho1).filter(|(_, v)| **v > 0.0).map(|(t, v)| (*t, *v)).collect(),
        );
    }
    let rows: Vec<Vec<f64>> = (0..full.times.len())
        .map(|i| {
            let mut r = vec![full.times[i], full.abs_rho1[i]];
            if let Some(h) = &half {
                r.push(h.abs_rho1[i]);
            }
            r
        })
        .collect();
    art.csv("echo.csv", &header, &rows)?;
    art.svg("echo.svg", &plot)?;

    let damping = cfg.nu.cbrt() * cfg.eta0;
    if damping >= 5.0 {
        art.check(
            "echo suppressed when nu^(1/3) eta0 >= 5",
            full.t_peak.is_none() && full.late_max < 3.0 * full.noise_floor,
            format!("late max {:.2e}, noise floor {:.2e}", full.late_max, full.noise_floor),
        );
    } else {
        let (lo, hi) = (0.9 * full.predicted_t, 1.1 * full.predicted_t);
        art.check(
            "echo peak near t = eta0",
            full.t_peak.is_some_and(|t| t >= lo && t <= hi),
            format!("t_peak {:?}, window [{lo}, {hi}]", full.t_peak),
        );
        if let Some(h) = &half {
            let ratio = full.echo_amplitude().zip(h.echo_amplitude()).map(|(a, b)| a / b);
            art.check(
                "echo amplitude drops 4x +- 25% when epsilon is halved",
                ratio.is_some_and(|r| (3.0..=5.0).contains(&r)),
                format!("ratio {ratio:?}"),
            );
        }
    }
    s.finish(
        art,
        json!({
            "config": cfg,
            "nu_cbrt_eta0": damping,
            "run": echo_summary(&full),
            "half_epsilon_run": half.as_ref().map(echo_summary),
        }),
    )
}

pub fn kernel_scaling(s: Setup) -> Result<Summary, CliError> {
    let p = &s.params;
    let gs = p.get("ks.s", 0.2)?;
    let nus = p.get_list("ks.nu", &[1e-2, 1e-3, 1e-4])?;
    let weight = GevreyWeight::new(
        p.get("ks.lambda1", 1000.5)?,
        p.get("ks.lambda_inf", 0.5)?,
        gs,
        p.get_opt("ks.beta")?,
        p.get("ks.m", 3u32)?,
    )
    .ctx("kernel weight")?;
    let d = KernelSumOptions::default();
    let o = KernelSumOptions {
        k_cap: p.get("ks.k_cap", d.k_cap)?,
        l_cap: p.get("ks.l_cap", d.l_cap)?,
        t_cap_factor: p.get("ks.t_cap_factor", d.t_cap_factor)?,
        t_min: p.get("ks.t_min", d.t_min)?,
        t_ratio: p.get("ks.t_ratio", d.t_ratio)?,
        rel_tol: p.get("ks.rel_tol", d.rel_tol)?,
        cap_tolerance: p.get("ks.cap_tolerance", d.cap_tolerance)?,
    };
    let mut art = s.start()?;
    let report = kernel_sum_scaling(&nus, &weight, &StabilityConstants::default(), &o).ctx("kernel-sum scaling")?;
    let rows: Vec<Vec<f64>> = report
        .sups
        .iter()
        .map(|r| vec![r.nu, r.m, r.argmax_k as f64, r.argmax_t, r.cap_sensitivity])
        .collect();
    art.csv("sups.csv", &["nu", "m", "argmax_k", "argmax_t", "cap_sensitivity"], &rows)?;
    art.svg(
        "scaling.svg",
        &LinePlot::new("kernel-sum supremum", "log10(1/nu)", "log10 M")
            .with_series("M(nu)", report.sups.iter().map(|r| (-r.nu.log10(), r.m.log10())).collect())
            .with_series(
                "C nu^-exponent",
                report
                    .sups
                    .iter()
                    .map(|r| (-r.nu.log10(), (report.constant * r.nu.powf(-report.exponent)).log10()))
                    .collect(),
            ),
    )?;
    if gs < 1.0 / 3.0 {
        art.check(
            "slope of log M against log(1/nu) <= exponent + 0.05",
            report.slope <= report.exponent + 0.05,
            format!("slope {:.4}, exponent {:.4}", report.slope, report.exponent),
        );
        art.check("M(nu) <= C nu^-exponent", report.bound_holds, format!("C = {:.4}", report.constant));
    } else {
        art.check("M(nu) varies by less than 3x", report.spread < 3.0, format!("spread {:.4}", report.spread));
    }
    s.finish(art, json!({ "report": report }))
}
