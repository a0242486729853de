//! General nonlinear simulation and the stability-threshold sweep.

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;
use vpfp_core::constants::{StabilityConstants, B_SMALL};
use vpfp_core::echo::threshold_exponent;
use vpfp_core::gevrey::GevreyWeight;
use vpfp_core::io::{density_trace_rows, snapshot_rows, LinePlot};
use vpfp_core::numeric::logspace;
use vpfp_core::sim::{monitor_ratio, run, BootstrapRecord, GaussianBump, InitialData, MonitorConfig, RunOutput, SimConfig};
use vpfp_core::{Error, Grid};

use super::{grid_from, rho_plot, Setup};
use crate::params::Params;
use crate::report::{CliError, Context, Summary};

fn broadcast<T: Clone>(key: &str, v: Vec<T>, n: usize) -> Result<Vec<T>, CliError> {
    match v.len() {
        1 => Ok(vec![v[0].clone(); n]),
        m if m == n => Ok(v),
        m => Err(CliError::Usage(format!("{key} has {m} entries, expected 1 or {n}"))),
    }
}

fn initial_from(p: &Params, grid: &Grid) -> Result<InitialData, CliError> {
    match p.get("init.kind", "bumps".to_string())?.as_str() {
        "bumps" => {
            let ks = p.get_list::<i64>("init.k", &[1])?;
            let n = ks.len();
            let amp = broadcast("init.amplitude", p.get_list("init.amplitude", &[1.0])?, n)?;
            let center = broadcast("init.center", p.get_list("init.center", &[0.0])?, n)?;
            let width = broadcast("init.width", p.get_list("init.width", &[1.0])?, n)?;
            Ok(InitialData::Bumps(
                (0..n)
                    .map(|i| GaussianBump {
                        k: ks[i],
                        amplitude: amp[i],
                        center: center[i],
                        width: width[i],
                    })
                    .collect(),
            ))
        }
        "gevrey" => Ok(InitialData::Gevrey {
            s: p.get("init.s", 0.5)?,
            lambda: p.get("init.lambda", 1.0)?,
            envelope: p.get("init.envelope", grid.eta_max / 8.0)?,
            modes: p.get_list("init.modes", &[1])?,
        }),
        other => Err(CliError::Usage(format!("init.kind must be 'bumps' or 'gevrey', got '{other}'"))),
    }
}

fn monitors_from(p: &Params, s_default: f64) -> Result<MonitorConfig, CliError> {
    let weight = GevreyWeight::new(
        p.get("monitor.lambda1", 0.5)?,
        p.get("monitor.lambda_inf", 0.25)?,
        p.get("monitor.s", s_default)?,
        p.get_opt("monitor.beta")?,
        p.get("monitor.m", 3u32)?,
    )
    .ctx("monitor weight")?;
    Ok(MonitorConfig {
        weight,
        constants: StabilityConstants::default(),
        b_small: p.get("monitor.b_small", B_SMALL)?,
    })
}

fn diagnostics_rows(out: &RunOutput, kmax: i64) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut header = vec!["t".to_string()];
    header.extend((0..=kmax).map(|k| format!("norm_{k}")));
    header.extend(["entropy", "hrho", "e_t", "e_ed", "hsh"].map(String::from));
    let rows = out
        .diagnostics
        .iter()
        .map(|d| {
            let mut r = vec![d.t];
            r.extend_from_slice(&d.mode_norms[kmax as usize..]);
            r.push(d.entropy.unwrap_or(f64::NAN));
            match d.bootstrap {
                Some(b) => r.extend([b.hrho, b.e_t, b.e_ed, b.hsh]),
                None => r.extend([f64::NAN; 4]),
            }
            r
        })
        .collect();
    (header, rows)
}

/// Largest `(H_{n+1} - H_n) / |H_n|` over consecutive samples.
fn worst_entropy_increase(series: &[(f64, f64)]) -> f64 {
    series
        .windows(2)
        .map(|w| (w[1].1 - w[0].1) / w[0].1.abs())
        .fold(f64::NEG_INFINITY, f64::max)
}

pub fn sim(s: Setup) -> Result<Summary, CliError> {
    let p = &s.params;
    let grid = grid_from(p, 2, 0.05, 20.0)?;
    let nu = p.get("sim.nu", 0.0)?;
    let dt = p.get("sim.dt", grid.dt_max(nu).min(0.05))?;
    let initial = initial_from(p, &grid)?;
    let s_default = match &initial {
        InitialData::Gevrey { s, .. } => *s,
        _ => 0.5,
    };
    let mut cfg = SimConfig::single_mode(grid, nu, dt, p.get("sim.t_end", 20.0)?, p.get("sim.epsilon", 1e-3)?);
    cfg.initial = initial;
    cfg.nonlinear = p.get("sim.nonlinear", true)?;
    cfg.linear_field = p.get("sim.linear_field", true)?;
    cfg.entropy = p.get("sim.entropy", false)?;
    cfg.diagnostics_stride = p.get("sim.diagnostics_stride", 10usize)?;
    cfg.history_stride = p.get("sim.snapshot_stride", 0usize)?;
    if p.get("monitor.enabled", false)? {
        cfg.monitors = Some(monitors_from(p, s_default)?);
    }
    let mut art = s.start()?;
    cfg.validate().ctx("simulation config")?;
    let out = run(&cfg).ctx("simulation")?;
    let (header, rows) = density_trace_rows(&out.trace);
    art.csv("trace.csv", &header, &rows)?;
    art.svg("rho.svg", &rho_plot("|rho_hat(t,k)|", &out.trace))?;
    if !out.diagnostics.is_empty() {
        let (header, rows) = diagnostics_rows(&out, cfg.grid.kmax);
        art.csv("diagnostics.csv", &header, &rows)?;
    }
    art.csv("final_state.csv", &["k", "eta", "re", "im"], &snapshot_rows(&out.final_state))?;
    if !out.snapshots.is_empty() {
        let rows: Vec<Vec<f64>> = out
            .snapshots
            .iter()
            .flat_map(|st| snapshot_rows(st).into_iter().map(move |r| [vec![st.time], r].concat()))
            .collect();
        art.csv("snapshots.csv", &["t", "k", "eta", "re", "im"], &rows)?;
    }
    art.check(
        "run completed",
        out.failure.is_none(),
        out.failure.as_ref().map_or("reached t_end".to_string(), |e| e.to_string()),
    );
    art.check(
        "mass stays zero",
        out.max_defects.mass < 1e-12,
        format!("largest projected mass {:.2e}", out.max_defects.mass),
    );
    let entropy = out.entropy_series();
    let worst = (entropy.len() > 1).then(|| worst_entropy_increase(&entropy));
    if let Some(w) = worst {
        art.check("energy-entropy nonincreasing", w <= 1e-8, format!("largest relative increase {w:.2e}"));
    }
    let numerical = out.failure.as_ref().is_some_and(Error::is_numerical);
    let summary = s.finish(
        art,
        json!({
            "final_time": out.final_state.time,
            "failure": out.failure.as_ref().map(|e| e.to_string()),
            "window_warnings": out.warnings.len(),
            "max_reality_defect": out.max_defects.reality,
            "max_mass_defect": out.max_defects.mass,
            "largest_entropy_increase": worst,
        }),
    )?;
    match out.failure {
        Some(e) if numerical => Err(e).ctx("simulation"),
        _ => Ok(summary),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
enum Label {
    Stable,
    Breached,
    Inconclusive,
}

#[derive(Debug, Clone, Serialize)]
struct SweepPoint {
    nu: f64,
    epsilon: f64,
    label: Label,
    /// Largest monitor value over the scaled linear reference plus floor.
    monitor_ratio: f64,
    /// `|rho_hat(T_end,1)| / max_t |rho_hat(t,1)|`.
    final_rho_ratio: f64,
    failure: Option<String>,
}

/// Reference monitors at amplitude `eps`, from a unit-amplitude linear run.
fn scale_record(r: &BootstrapRecord, eps: f64) -> BootstrapRecord {
    BootstrapRecord {
        t: r.t,
        hrho: eps * r.hrho,
        e_t: eps * eps * r.e_t,
        e_ed: eps * eps * r.e_ed,
        hsh: eps * r.hsh,
    }
}

struct SweepSettings {
    breach_factor: f64,
    floor: f64,
    decay_tol: f64,
}

fn classify(nu: f64, eps: f64, out: &RunOutput, reference: &[BootstrapRecord], set: &SweepSettings) -> SweepPoint {
    let rho = out.trace.abs_series(1);
    let peak = rho.iter().cloned().fold(0.0, f64::max);
    let final_rho_ratio = if peak > 0.0 { rho.last().copied().unwrap_or(0.0) / peak } else { 0.0 };
    let scaled: Vec<BootstrapRecord> = reference.iter().map(|r| scale_record(r, eps)).collect();
    let ref_max = reference.iter().flat_map(|r| r.norms()).fold(0.0, f64::max);
    let floor = (set.floor * eps * ref_max).max(f64::MIN_POSITIVE);
    let ratio = monitor_ratio(&out.bootstrap_series(), &scaled, floor);
    let label = if matches!(out.failure, Some(Error::BlowUp { .. })) || ratio > set.breach_factor {
        Label::Breached
    } else if out.failure.is_none() && final_rho_ratio <= set.decay_tol {
        Label::Stable
    } else {
        Label::Inconclusive
    };
    SweepPoint {
        nu,
        epsilon: eps,
        label,
        monitor_ratio: ratio,
        final_rho_ratio,
        failure: out.failure.as_ref().map(|e| e.to_string()),
    }
}

pub fn threshold_sweep(s: Setup) -> Result<Summary, CliError> {
    let p = &s.params;
    let gs = p.get("sweep.s", 0.2)?;
    let nus = p.get_list("sweep.nu", &[1e-2, 1e-3])?;
    let mut eps_grid = vec![0.0];
    eps_grid.extend(logspace(
        p.get("sweep.eps_min", 1e-3)?,
        p.get("sweep.eps_max", 1.0)?,
        p.get("sweep.n_eps", 4usize)?,
    ));
    let c = p.get("sweep.c", 0.02)?;
    let t_factor = p.get("sweep.t_factor", 10.0)?;
    let lambda = p.get("sweep.lambda", 1.0)?;
    let set = SweepSettings {
        breach_factor: p.get("sweep.breach_factor", 2.0)?,
        floor: p.get("sweep.floor", 0.1)?,
        decay_tol: p.get("sweep.decay_tol", 1e-2)?,
    };
    let sample_every = p.get("sweep.monitor_interval", 1.0)?;
    let grid = grid_from(p, 2, 0.1, 40.0)?;
    let monitors = monitors_from(p, gs)?;
    let mut art = s.start()?;
    let exponent = threshold_exponent(gs).ctx("threshold exponent")?;
    if t_factor < 10.0 {
        return Err(CliError::Usage(format!("sweep.t_factor must be at least 10, got {t_factor}")));
    }
    if nus.iter().any(|&nu| !(nu > 0.0)) {
        return Err(CliError::Usage("sweep.nu entries must be positive".into()));
    }
    let base = |nu: f64, eps: f64, nonlinear: bool| {
        let dt = grid.dt_max(nu).min(0.1);
        let mut cfg = SimConfig::single_mode(grid.clone(), nu, dt, t_factor * nu.powf(-1.0 / 3.0), eps);
        cfg.initial = InitialData::Gevrey {
            s: gs,
            lambda,
            envelope: grid.eta_max / 8.0,
            modes: vec![1],
        };
        cfg.nonlinear = nonlinear;
        cfg.monitors = Some(monitors);
        cfg.diagnostics_stride = ((sample_every / dt).round() as usize).max(1);
        cfg
    };
    let references = nus
        .par_iter()
        .map(|&nu| {
            let out = run(&base(nu, 1.0, false)).ctx(format!("linear reference at nu = {nu}"))?;
            match out.failure {
                Some(e) => Err(e).ctx(format!("linear reference at nu = {nu}")),
                None => Ok(out.bootstrap_series()),
            }
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let jobs: Vec<(usize, f64)> = (0..nus.len()).flat_map(|i| eps_grid.iter().map(move |&e| (i, e))).collect();
    let points = jobs
        .par_iter()
        .map(|&(i, eps)| {
            let nu = nus[i];
            let out = run(&base(nu, eps, true)).ctx(format!("sweep point nu = {nu}, epsilon = {eps}"))?;
            Ok(classify(nu, eps, &out, &references[i], &set))
        })
        .collect::<Result<Vec<_>, CliError>>()?;

    let code = |l: Label| match l {
        Label::Stable => 0.0,
        Label::Breached => 1.0,
        Label::Inconclusive => 2.0,
    };
    let rows: Vec<Vec<f64>> = points
        .iter()
        .map(|q| vec![q.nu, q.epsilon, code(q.label), q.monitor_ratio, q.final_rho_ratio])
        .collect();
    art.csv("sweep.csv", &["nu", "epsilon", "label", "monitor_ratio", "final_rho_ratio"], &rows)?;

    // eps*(nu): the largest grid amplitude below which every run is stable.
    let mut boundary = Vec::new();
    for &nu in &nus {
        let mut star = 0.0;
        for q in points.iter().filter(|q| q.nu == nu) {
            if q.label != Label::Stable {
                break;
            }
            star = q.epsilon;
        }
        boundary.push((nu, star));
    }
    art.csv(
        "boundary.csv",
        &["nu", "eps_star", "c_nu_exponent"],
        &boundary.iter().map(|&(nu, e)| vec![nu, e, c * nu.powf(exponent)]).collect::<Vec<_>>(),
    )?;
    art.svg(
        "boundary.svg",
        &LinePlot::new("stability boundary", "log10 nu", "log10 epsilon")
            .with_series(
                "eps*",
                boundary.iter().filter(|b| b.1 > 0.0).map(|&(nu, e)| (nu.log10(), e.log10())).collect(),
            )
            .with_series(
                "c nu^exponent",
                nus.iter().map(|&nu| (nu.log10(), (c * nu.powf(exponent)).log10())).collect(),
            ),
    )?;

    let zero_ok = points.iter().filter(|q| q.epsilon == 0.0).all(|q| q.label == Label::Stable);
    art.check("epsilon = 0 rows are stable", zero_ok, "");
    let below: Vec<&SweepPoint> = points
        .iter()
        .filter(|q| q.epsilon > 0.0 && q.epsilon <= c * q.nu.powf(exponent))
        .collect();
    let bad: Vec<String> = below
        .iter()
        .filter(|q| q.label != Label::Stable)
        .map(|q| format!("(nu {}, eps {})", q.nu, q.epsilon))
        .collect();
    art.check(
        "runs below c nu^exponent are stable",
        bad.is_empty(),
        format!("{} runs below the threshold; not stable: {}", below.len(), bad.join(" ")),
    );
    let mut order: Vec<(f64, f64)> = boundary.clone();
    order.sort_by(|a, b| b.0.total_cmp(&a.0));
    let monotone = order.windows(2).all(|w| w[1].1 <= w[0].1);
    art.check("eps* nonincreasing as nu decreases", monotone, format!("{order:?}"));
    s.finish(
        art,
        json!({
            "s": gs,
            "exponent": exponent,
            "c": c,
            "points": points,
            "boundary": boundary.iter().map(|&(nu, e)| json!({"nu": nu, "eps_star": e})).collect::<Vec<_>>(),
        }),
    )
}
