//! Resolvent `R` of the kernel (`R = K - R*K`) by inversion of
//! `K~/(1+K~)` along `Re z = -lambda_bar |k|`.
//!
//! The leading behaviour `R'(0), R''(0), R'''(0)` is removed analytically:
//! with `g(t) = e^{-alpha t}(c1 t + c2 t^2/2 + c3 t^3/6)` matched to those
//! derivatives, `R~ - g~ = O(|z|^-5)` and the remaining contour integral
//! converges fast enough to truncate at `|Im z| = 200|k|`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::filon::{integrate_complex, FilonRule, PanelSamples};
use super::kernel::{kernel_k, resolvent_derivatives_at_zero, KernelTable};
use super::laplace::{LaplaceEvaluator, PANEL_WIDTH};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResolventOptions {
    /// Frequency cutoff in units of `|k|`.
    pub omega_max: f64,
    /// Frequency panel width.
    pub omega_panel: f64,
    /// Largest accepted tail estimate.
    pub tail_tol: f64,
}

impl Default for ResolventOptions {
    fn default() -> Self {
        ResolventOptions {
            omega_max: 200.0,
            omega_panel: 0.25,
            tail_tol: 1e-8,
        }
    }
}

/// Diagnostics of one inversion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResolventDiagnostics {
    pub contour_margin: f64,
    pub tail_estimate: f64,
}

fn subtraction(k: i64, nu: f64, a: f64) -> (f64, [f64; 3]) {
    let alpha = a + k.unsigned_abs() as f64 + 1.0;
    let r = resolvent_derivatives_at_zero(k, nu);
    let c1 = r[0];
    let c2 = r[1] + 2.0 * alpha * c1;
    let c3 = r[2] + 3.0 * alpha * c2 - 3.0 * alpha * alpha * c1;
    (alpha, [c1, c2, c3])
}

/// Resolvent sampled on `t_grid` (uniform, starting at 0) together with the
/// kernel on the same grid.
pub fn resolvent(k: i64, nu: f64, t_grid: &[f64], lambda_bar: f64) -> Result<KernelTable> {
    Ok(resolvent_with(k, nu, t_grid, lambda_bar, &ResolventOptions::default())?.0)
}

pub fn resolvent_with(
    k: i64,
    nu: f64,
    t_grid: &[f64],
    lambda_bar: f64,
    opts: &ResolventOptions,
) -> Result<(KernelTable, ResolventDiagnostics)> {
    if k == 0 {
        return Err(Error::Argument("resolvent needs k != 0".into()));
    }
    let dt = uniform_step(t_grid)?;
    let ka = k.unsigned_abs() as f64;
    let a = lambda_bar * ka;
    let (alpha, c) = subtraction(k, nu, a);
    let ev = LaplaceEvaluator::new(k, nu, a, 0, PANEL_WIDTH)?;
    let rule = FilonRule::default();
    let omega_max = opts.omega_max * ka;
    let n_panels = (omega_max / opts.omega_panel).ceil() as usize;
    let width = omega_max / n_panels as f64;

    let panels: Vec<Result<(Vec<Complex64>, f64)>> = (0..n_panels)
        .into_par_iter()
        .map(|p| {
            let center = (p as f64 + 0.5) * width;
            let mut margin = f64::INFINITY;
            let vals = rule
                .nodes
                .iter()
                .map(|x| {
                    let w = center + 0.5 * width * x;
                    let kt = ev.eval(w);
                    let dd = kt + 1.0;
                    margin = margin.min(dd.norm());
                    let s = Complex64::new(-a + alpha, w);
                    let g = c[0] / (s * s) + c[1] / (s * s * s) + c[2] / (s * s * s * s);
                    kt / dd - g
                })
                .collect();
            Ok((vals, margin))
        })
        .collect();
    let mut values = Vec::with_capacity(n_panels);
    let mut margin = f64::INFINITY;
    for p in panels {
        let (v, m) = p?;
        margin = margin.min(m);
        values.push(v);
    }
    if !(margin > 1e-12) {
        return Err(Error::Stability { kappa: margin });
    }
    // Tail: |F - G| ~ C w^-5, so \int_W^inf |F - G| ~ |F - G|(W) W / 4.
    let last = ev.eval(omega_max);
    let s = Complex64::new(-a + alpha, omega_max);
    let g = c[0] / (s * s) + c[1] / (s * s * s) + c[2] / (s * s * s * s);
    let tail = (last / (last + 1.0) - g).norm() * omega_max / 4.0 / std::f64::consts::PI;
    if tail > opts.tail_tol {
        return Err(Error::Truncation(format!(
            "contour tail estimate {tail:e} exceeds {:e}; raise omega_max",
            opts.tail_tol
        )));
    }
    let samples = PanelSamples {
        origin: 0.0,
        width,
        values,
    };
    let r_values: Vec<f64> = t_grid
        .par_iter()
        .map(|&t| {
            if t == 0.0 {
                return 0.0;
            }
            let smooth = (-alpha * t).exp() * (c[0] * t + c[1] * t * t / 2.0 + c[2] * t * t * t / 6.0);
            let integral = integrate_complex(&rule, &samples, t);
            smooth + (-a * t).exp() / std::f64::consts::PI * integral.re
        })
        .collect();
    let k_values = t_grid
        .iter()
        .map(|&t| kernel_k(t, k, nu))
        .collect::<Result<Vec<f64>>>()?;
    Ok((
        KernelTable {
            k,
            nu,
            dt,
            t_grid: t_grid.to_vec(),
            k_values,
            r_values: Some(r_values),
        },
        ResolventDiagnostics {
            contour_margin: margin,
            tail_estimate: tail,
        },
    ))
}

pub(crate) fn uniform_step(t_grid: &[f64]) -> Result<f64> {
    if t_grid.len() < 2 {
        return Err(Error::Argument("time grid needs at least two points".into()));
    }
    if t_grid[0] != 0.0 {
        return Err(Error::Argument("time grid must start at t = 0".into()));
    }
    let dt = t_grid[1] - t_grid[0];
    if !(dt > 0.0) {
        return Err(Error::Argument("time grid must be increasing".into()));
    }
    for (i, t) in t_grid.iter().enumerate() {
        if (t - i as f64 * dt).abs() > 1e-9 * dt.max(t.abs()) {
            return Err(Error::Argument(format!("time grid is not uniform at index {i}")));
        }
    }
    Ok(dt)
}

/// `\int_0^{t_n} f(tau) g(t_n - tau) d tau` on a uniform grid by the
/// trapezoid rule with end corrections from one-sided second-order
/// derivative estimates (fourth-order for smooth integrands).
pub fn convolve(f: &[Complex64], g: &[Complex64], dt: f64) -> Vec<Complex64> {
    let n = f.len().min(g.len());
    let zero = Complex64::new(0.0, 0.0);
    let mut out = vec![zero; n];
    let (f, g) = (&f[..n], &g[..n]);
    // Second-order derivative estimates of each factor, so the end
    // correction is available from the first step on.
    let deriv = |a: &[Complex64], i: usize| -> Complex64 {
        if n < 3 {
            return zero;
        }
        if i == 0 {
            (a[1] * 4.0 - a[0] * 3.0 - a[2]) / (2.0 * dt)
        } else if i == n - 1 {
            (a[i] * 3.0 - a[i - 1] * 4.0 + a[i - 2]) / (2.0 * dt)
        } else {
            (a[i + 1] - a[i - 1]) / (2.0 * dt)
        }
    };
    let df: Vec<Complex64> = (0..n).map(|i| deriv(f, i)).collect();
    let dg: Vec<Complex64> = (0..n).map(|i| deriv(g, i)).collect();
    for m in 1..n {
        let prod = |j: usize| f[j] * g[m - j];
        let mut terms = Vec::with_capacity(m + 1);
        terms.push(prod(0) * 0.5);
        for j in 1..m {
            terms.push(prod(j));
        }
        terms.push(prod(m) * 0.5);
        let s = crate::numeric::pairwise_sum_c(&terms) * dt;
        // d/dtau f(tau) g(t - tau) at both ends.
        let d0 = df[0] * g[m] - f[0] * dg[m];
        let d1 = df[m] * g[0] - f[m] * dg[0];
        out[m] = s - (d1 - d0) * (dt * dt / 12.0);
    }
    out
}

/// `max_t |R - K + R*K|` for a table holding both functions.
pub fn identity_residual(table: &KernelTable) -> Result<f64> {
    let r = table
        .r_values
        .as_ref()
        .ok_or_else(|| Error::Argument("table carries no resolvent".into()))?;
    let rc: Vec<Complex64> = r.iter().map(|v| Complex64::new(*v, 0.0)).collect();
    let kc: Vec<Complex64> = table.k_values.iter().map(|v| Complex64::new(*v, 0.0)).collect();
    let conv = convolve(&rc, &kc, table.dt);
    Ok((0..r.len())
        .map(|i| (r[i] - table.k_values[i] + conv[i].re).abs())
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn convolution_of_polynomials() {
        // \int_0^t tau (t - tau) d tau = t^3/6
        let dt = 0.05;
        let f: Vec<Complex64> = (0..41).map(|i| Complex64::new(i as f64 * dt, 0.0)).collect();
        let c = convolve(&f, &f, dt);
        for (i, v) in c.iter().enumerate() {
            let t = i as f64 * dt;
            assert!((v.re - t * t * t / 6.0).abs() < 1e-12);
        }
    }

    #[test]
    fn non_uniform_grid_rejected() {
        assert!(uniform_step(&[0.0, 0.1, 0.25]).is_err());
        assert!(uniform_step(&[0.1, 0.2]).is_err());
    }
}
