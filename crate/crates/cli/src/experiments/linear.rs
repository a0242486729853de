//! Linear-theory experiments: Penrose margin, dispersion roots, the linear
//! run with its Landau fit, Volterra cross-check and enhanced dissipation.

use rayon::prelude::*;
use serde_json::json;
use vpfp_core::constants::LAMBDA_BAR;
use vpfp_core::fit::{fit_rate, local_maxima, FitModel};
use vpfp_core::io::{density_trace_rows, kernel_table_rows, LinePlot};
use vpfp_core::linear_flow::s_shorthand;
use vpfp_core::linear_theory::{
    dispersion_roots, identity_residual, penrose_margin, resolvent, solve_volterra, solve_with_resolvent, PenroseScan,
    RootSearch,
};
use vpfp_core::numeric::phi_tilde;
use vpfp_core::sim::{run, RunOutput, SimConfig};
use vpfp_core::Grid;

use super::{grid_from, rho_plot, Setup};
use crate::report::{Artifacts, CliError, Context, Summary};

pub fn penrose(s: Setup) -> Result<Summary, CliError> {
    let p = &s.params;
    let nus = p.get_list("penrose.nu", &[0.0])?;
    let lambda_bar = p.get("penrose.lambda_bar", LAMBDA_BAR)?;
    let d = PenroseScan::default();
    let scan = PenroseScan {
        k_min: p.get("penrose.k_min", d.k_min)?,
        k_max: p.get("penrose.k_max", d.k_max)?,
        n_omega: p.get("penrose.n_omega", d.n_omega)?,
        omega_lo: p.get("penrose.omega_lo", d.omega_lo)?,
        omega_hi: p.get("penrose.omega_hi", d.omega_hi)?,
    };
    let mut art = s.start()?;
    let reports = nus
        .iter()
        .map(|&nu| penrose_margin(nu, lambda_bar, &scan).ctx(format!("penrose margin at nu = {nu}")))
        .collect::<Result<Vec<_>, _>>()?;
    let rows: Vec<Vec<f64>> = reports
        .iter()
        .map(|r| vec![r.nu, r.kappa_estimate, r.kappa_refined, r.refinement_change, r.argmin_k as f64])
        .collect();
    art.json("penrose.json", &reports)?;
    art.csv("penrose.csv", &["nu", "kappa", "kappa_refined", "refinement_change", "argmin_k"], &rows)?;
    let kappa0 = reports[0].kappa_estimate;
    for r in &reports {
        art.check(
            &format!("kappa({}) > 0", r.nu),
            r.kappa_estimate > 0.0,
            format!("kappa = {:.6}", r.kappa_estimate),
        );
        art.check(
            &format!("scan refinement at nu = {}", r.nu),
            r.refinement_change < 0.05,
            format!("relative change {:.2e}", r.refinement_change),
        );
        if r.nu != reports[0].nu {
            art.check(
                &format!("kappa({}) >= 0.9 kappa({})", r.nu, reports[0].nu),
                r.kappa_estimate >= 0.9 * kappa0,
                format!("ratio {:.5}", r.kappa_estimate / kappa0),
            );
        }
    }
    s.finish(art, json!({ "reports": reports }))
}

pub fn dispersion(s: Setup) -> Result<Summary, CliError> {
    let p = &s.params;
    let ks = p.get_list::<i64>("dispersion.k", &[1, 2, 3])?;
    let nu = p.get("dispersion.nu", 0.0)?;
    let d = RootSearch::default();
    let search = RootSearch {
        z_cut: p.get("dispersion.z_cut", d.z_cut)?,
        y: p.get("dispersion.y", d.y)?,
        x_hi: p.get("dispersion.x_hi", d.x_hi)?,
        residual_tol: p.get("dispersion.residual_tol", d.residual_tol)?,
    };
    let mut art = s.start()?;
    let found = ks
        .par_iter()
        .map(|&k| dispersion_roots(k, nu, &search).ctx(format!("dispersion roots for k = {k}")))
        .collect::<Result<Vec<_>, _>>()?;
    let mut rows = Vec::new();
    let mut per_mode = Vec::new();
    for (&k, roots) in ks.iter().zip(&found) {
        for z in roots {
            rows.push(vec![k as f64, z.re, z.im]);
        }
        let unstable = roots.iter().filter(|z| z.re >= 0.0).count();
        art.check(
            &format!("no growing mode for k = {k}"),
            unstable == 0,
            format!("{} roots, {unstable} with Re z >= 0", roots.len()),
        );
        per_mode.push(json!({
            "k": k,
            "roots": roots.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
            "leading_damping_rate": roots.first().map(|z| -z.re),
        }));
    }
    art.csv("roots.csv", &["k", "re", "im"], &rows)?;
    s.finish(art, json!({ "nu": nu, "modes": per_mode }))
}

fn sim_outputs(art: &mut Artifacts, out: &RunOutput, title: &str) -> Result<(), CliError> {
    let (header, rows) = density_trace_rows(&out.trace);
    art.csv("trace.csv", &header, &rows)?;
    art.svg("rho.svg", &rho_plot(title, &out.trace))
}

pub fn linear_run(s: Setup) -> Result<Summary, CliError> {
    let p = &s.params;
    let grid = grid_from(p, 2, 0.025, 25.0)?;
    let nu = p.get("sim.nu", 0.0)?;
    let dt = p.get("sim.dt", 0.05)?;
    let t_end = p.get("sim.t_end", 16.0)?;
    let epsilon = p.get("sim.epsilon", 1e-3)?;
    let k = p.get("fit.k", 1i64)?;
    let window = (p.get("fit.t_lo", 6.0)?, p.get("fit.t_hi", 14.0)?);
    let mut art = s.start()?;
    let cfg = SimConfig::single_mode(grid, nu, dt, t_end, epsilon);
    let out = run(&cfg).ctx("linear run")?;
    if let Some(e) = out.failure.clone() {
        return Err(e).ctx("linear run");
    }
    sim_outputs(&mut art, &out, "linear run: |rho_hat(t,k)|")?;
    let (pt, pv): (Vec<f64>, Vec<f64>) = local_maxima(&out.trace.times, &out.trace.abs_series(k)).into_iter().unzip();
    let fit = fit_rate(&pt, &pv, FitModel::Exponential, window).ctx("fitting the damping rate")?;
    let roots = dispersion_roots(k, nu, &RootSearch::default()).ctx("dispersion roots")?;
    let lead = roots.first().copied();
    if let Some(z) = lead {
        let rel = (fit.rate + z.re).abs() / z.re.abs();
        art.check(
            "fitted rate matches the leading dispersion root",
            rel < 0.05,
            format!("rate {:.6} vs {:.6}, relative error {rel:.2e}", fit.rate, -z.re),
        );
    } else {
        art.check("leading dispersion root found", false, "no root in the search rectangle");
    }
    art.check(
        "mass stays zero",
        out.max_defects.mass < 1e-12,
        format!("largest projected mass {:.2e}", out.max_defects.mass),
    );
    s.finish(
        art,
        json!({ "fit": fit, "leading_root": lead.map(|z| [z.re, z.im]), "warnings": out.warnings.len() }),
    )
}

pub fn volterra_xcheck(s: Setup) -> Result<Summary, CliError> {
    let p = &s.params;
    let k = p.get("volterra.k", 1i64)?;
    let nu = p.get("volterra.nu", 1e-3)?;
    let dt: f64 = p.get("volterra.dt", 0.02)?;
    let t_end = p.get("volterra.t_end", 20.0)?;
    let mut art = s.start()?;
    if !(dt > 0.0 && t_end > 0.0) {
        return Err(CliError::Usage("volterra.dt and volterra.t_end must be positive".into()));
    }
    let n = (t_end / dt).round() as usize;
    let t: Vec<f64> = (0..=n).map(|i| i as f64 * dt).collect();
    let table = resolvent(k, nu, &t, 0.0).ctx("resolvent")?;
    let residual = identity_residual(&table).ctx("resolvent identity")?;
    let h: Vec<_> = t
        .iter()
        .map(|&x| {
            let e = k as f64 * phi_tilde(x, nu);
            num_complex::Complex64::new((-e * e / 2.0).exp() * s_shorthand(x, k, nu), 0.0)
        })
        .collect();
    let direct = solve_volterra(&t, &h, &table).ctx("direct Volterra solve")?;
    let via_r = solve_with_resolvent(&t, &h, &table).ctx("resolvent formula")?;
    let scale = direct.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let diff = direct.iter().zip(&via_r).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    let rel = diff / scale;
    let (kh, krows) = kernel_table_rows(&table);
    art.csv("kernel.csv", &kh, &krows)?;
    let rows: Vec<Vec<f64>> = (0..t.len())
        .map(|i| vec![t[i], direct[i].re, direct[i].im, via_r[i].re, via_r[i].im])
        .collect();
    art.csv("density.csv", &["t", "re_direct", "im_direct", "re_resolvent", "im_resolvent"], &rows)?;
    art.svg(
        "density.svg",
        &LinePlot::new("Volterra cross-check: |rho(t)|", "t", "|rho|")
            .log_y()
            .with_series("direct", t.iter().zip(&direct).map(|(a, b)| (*a, b.norm())).collect())
            .with_series("resolvent", t.iter().zip(&via_r).map(|(a, b)| (*a, b.norm())).collect()),
    )?;
    art.check("direct and resolvent solutions agree", rel < 1e-4, format!("max relative difference {rel:.2e}"));
    art.check("R = K - R*K", residual < 1e-6, format!("residual {residual:.2e}"));
    s.finish(art, json!({ "relative_difference": rel, "identity_residual": residual }))
}

/// First time `||h_hat(t,1,.)||` falls below `e^{-3}` of its initial value.
fn e3_time(out: &RunOutput, kmax: i64) -> Option<f64> {
    let col = (1 + kmax) as usize;
    let n0 = out.diagnostics.first()?.mode_norms[col];
    out.diagnostics.windows(2).find_map(|w| {
        let a = (w[0].mode_norms[col] / n0).ln();
        let b = (w[1].mode_norms[col] / n0).ln();
        (a >= -3.0 && b < -3.0).then(|| w[0].t + (a + 3.0) / (a - b) * (w[1].t - w[0].t))
    })
}

pub fn ed_scaling(s: Setup) -> Result<Summary, CliError> {
    let p = &s.params;
    let nus = p.get_list("ed.nu", &[1e-3, 1e-4, 1e-5])?;
    let d_eta = p.get("ed.d_eta", 0.1)?;
    let dt = p.get("ed.dt", 0.1)?;
    let horizon = p.get("ed.horizon", 1.6)?;
    let epsilon = p.get("ed.epsilon", 1e-3)?;
    let mut art = s.start()?;
    if nus.len() < 2 || nus.iter().any(|&n| !(n > 0.0)) {
        return Err(CliError::Usage("ed.nu needs at least two positive values".into()));
    }
    let runs = nus
        .par_iter()
        .map(|&nu| {
            let t_end = horizon * (9.0f64 / nu).cbrt();
            let grid = Grid::with_spacing(2, d_eta, 1.25 * t_end).ctx("grid")?;
            let step = grid.dt_max(nu).min(dt);
            let mut cfg = SimConfig::single_mode(grid, nu, step, t_end, epsilon);
            cfg.diagnostics_stride = 1;
            let out = run(&cfg).ctx(format!("linear run at nu = {nu}"))?;
            if let Some(e) = out.failure.clone() {
                return Err(e).ctx(format!("linear run at nu = {nu}"));
            }
            Ok((nu, out))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let mut times = Vec::new();
    let mut plot = LinePlot::new("enhanced dissipation: ||h_hat(t,1)|| / ||h_hat(0,1)||", "t", "relative norm").log_y();
    for (nu, out) in &runs {
        let n0 = out.diagnostics[0].mode_norms[3];
        plot = plot.with_series(
            &format!("nu = {nu:e}"),
            out.diagnostics.iter().map(|d| (d.t, d.mode_norms[3] / n0)).collect(),
        );
        match e3_time(out, 2) {
            Some(t) => times.push(t),
            None => {
                return Err(CliError::Usage(format!(
                    "no e^3 decay within the horizon at nu = {nu}; raise ed.horizon"
                )))
            }
        }
    }
    let fit = fit_rate(&nus, &times, FitModel::Power, (0.0, f64::INFINITY)).ctx("log-log fit")?;
    let slope = -fit.rate;
    art.csv(
        "ed_times.csv",
        &["nu", "t_e3"],
        &nus.iter().zip(&times).map(|(a, b)| vec![*a, *b]).collect::<Vec<_>>(),
    )?;
    art.svg("norms.svg", &plot)?;
    art.svg(
        "scaling.svg",
        &LinePlot::new("e^3 time against nu", "log10 nu", "log10 t_e3")
            .with_series("measured", nus.iter().zip(&times).map(|(a, b)| (a.log10(), b.log10())).collect())
            .with_series(
                "fit",
                nus.iter().map(|a| (a.log10(), (fit.prefactor * a.powf(-fit.rate)).log10())).collect(),
            ),
    )?;
    art.check(
        "log-log slope is -1/3 +- 0.05",
        (slope + 1.0 / 3.0).abs() <= 0.05,
        format!("slope {slope:.4}"),
    );
    s.finish(art, json!({ "nu": nus, "t_e3": times, "slope": slope, "fit": fit }))
}
