//! The four bootstrap quantities evaluated along a simulation.
//!
//! Norms of the shifted unknown `f_hat(t,k,eta) = h_hat(t,k,eta_bar(t,k,eta))`
//! are computed on the `h` grid through the change of variables
//! `eta = e^{-nu t} zeta + k phi_tilde(t)`, `d eta = e^{-nu t} d zeta`, so no
//! interpolation is needed. Velocity moments are formed by multiplying the
//! physical velocity profile; under the same change of variables
//! `(v^a f)^(k, eta) = e^{a nu t} (w^a h_k)^(zeta)`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::MonitorConfig;
use super::fields::DensityTrace;
use crate::constants::k_weight;
use crate::error::Result;
use crate::gevrey::{gevrey_lambda, multiplier};
use crate::norm::weighted_norm_sq_modes;
use crate::numeric::{bracket, pairwise_sum, phi_tilde};
use crate::state::SpectralState;
use crate::transform::{eta_to_v, v_to_eta};

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct BootstrapRecord {
    pub t: f64,
    /// `|| |d_x|^{1/2} A_{1/2} rho e^{delta nu^{1/3} t} <phi_tilde>^4 ||_{L^2_t L^2_x}` up to `t`.
    pub hrho: f64,
    /// Top-order functional `E^T`.
    pub e_t: f64,
    /// Hypocoercive functional `E^ED`.
    pub e_ed: f64,
    /// `|| A_{-beta}(t,0,e^{-nu t} grad) h_0 ||_{H^{beta+1}_m}`.
    pub hsh: f64,
}

impl BootstrapRecord {
    /// The four quantities on a common norm scale (square roots of the
    /// energy functionals).
    pub fn norms(&self) -> [f64; 4] {
        [self.hrho, self.e_t.sqrt(), self.e_ed.max(0.0).sqrt(), self.hsh]
    }
}

/// Running state of the monitors; the density integral accumulates by the
/// trapezoid rule over every observed time.
#[derive(Debug, Clone)]
pub struct BootstrapMonitor {
    pub cfg: MonitorConfig,
    pub nu: f64,
    integral: f64,
    last: Option<(f64, f64)>,
}

impl BootstrapMonitor {
    pub fn new(cfg: MonitorConfig, nu: f64) -> Self {
        BootstrapMonitor {
            cfg,
            nu,
            integral: 0.0,
            last: None,
        }
    }

    fn density_integrand(&self, t: f64, rho: &[Complex64], kmax: i64) -> Result<f64> {
        let nu = self.nu;
        let p = phi_tilde(t, nu);
        let mut parts = Vec::with_capacity(rho.len());
        for (k, r) in (-kmax..=kmax).zip(rho) {
            if k == 0 {
                continue;
            }
            let a = multiplier(t, nu, k, k as f64 * p, 0.5, &self.cfg.weight)?;
            parts.push(k.unsigned_abs() as f64 * (a * r.norm()).powi(2));
        }
        let growth = (2.0 * self.cfg.constants.delta * nu.cbrt() * t).exp() * bracket(p).powi(8);
        Ok(2.0 * std::f64::consts::PI * pairwise_sum(&parts) * growth)
    }

    pub fn observe_density(&mut self, t: f64, rho: &[Complex64], kmax: i64) -> Result<()> {
        let v = self.density_integrand(t, rho, kmax)?;
        if let Some((t0, v0)) = self.last {
            self.integral += 0.5 * (t - t0) * (v + v0);
        }
        self.last = Some((t, v));
        Ok(())
    }

    pub fn hrho(&self) -> f64 {
        self.integral.sqrt()
    }

    pub fn record(&self, state: &SpectralState) -> Result<BootstrapRecord> {
        let (e_t, e_ed) = energy_functionals(state, &self.cfg)?;
        Ok(BootstrapRecord {
            t: state.time,
            hrho: self.hrho(),
            e_t,
            e_ed,
            hsh: shell_norm(state, &self.cfg)?,
        })
    }
}

/// `(w^a h_k)^` on the eta grid for every mode.
fn moment_rows(state: &SpectralState, alpha: u32) -> Vec<Vec<Complex64>> {
    let grid = &state.grid;
    let modes: Vec<i64> = grid.modes().collect();
    if alpha == 0 {
        return modes.iter().map(|&k| state.row(k).to_vec()).collect();
    }
    let ws: Vec<f64> = (0..grid.nv).map(|j| grid.v(j)).collect();
    modes
        .par_iter()
        .map(|&k| {
            let row = state.row(k);
            if row.iter().all(|v| *v == Complex64::new(0.0, 0.0)) {
                return row.to_vec();
            }
            let hv = eta_to_v(row, grid, &ws);
            let weighted: Vec<Complex64> = hv.iter().zip(&ws).map(|(h, w)| h * w.powi(alpha as i32)).collect();
            v_to_eta(&weighted, &ws, grid)
        })
        .collect()
}

/// `(E^T, E^ED)` at the state's time.
pub fn energy_functionals(state: &SpectralState, cfg: &MonitorConfig) -> Result<(f64, f64)> {
    let grid = &state.grid;
    let t = state.time;
    let nu = state.nu;
    let decay = (-nu * t).exp();
    let p = phi_tilde(t, nu);
    let w = &cfg.weight;
    let b = cfg.b_small;
    let nu13 = nu.cbrt();
    let ed_growth = (2.0 * cfg.constants.delta1 * nu13 * t).exp();
    let de = grid.d_eta();
    let mut e_t_parts = Vec::new();
    let mut e_ed_parts = Vec::new();
    for alpha in 0..=w.m {
        let rows = moment_rows(state, alpha);
        let pre = (-2.0 * (alpha as f64 + 1.0) * nu * t).exp() / k_weight(alpha as usize);
        let moment_scale = (alpha as f64 * nu * t).exp();
        let per_mode: Vec<Result<(f64, f64)>> = grid
            .modes()
            .zip(rows.iter())
            .collect::<Vec<_>>()
            .par_iter()
            .map(|(k, row)| {
                let kf = *k as f64;
                let mut top = Vec::with_capacity(row.len());
                let mut ed = Vec::with_capacity(row.len());
                for (j, h) in row.iter().enumerate() {
                    if *h == Complex64::new(0.0, 0.0) {
                        continue;
                    }
                    let zeta = grid.eta(j);
                    let eta = decay * zeta + kf * p;
                    let g = h.norm() * moment_scale;
                    let a2 = multiplier(t, nu, *k, eta, 2.0, w)?;
                    top.push((a2 * g).powi(2));
                    if *k != 0 {
                        let a0 = multiplier(t, nu, *k, eta, 0.0, w)?;
                        let s = (a0 * g).powi(2);
                        let k2 = kf * kf;
                        ed.push(s * (k2 * k2 + b * nu13 * nu13 * k2 * zeta * zeta + b * nu13 * k2 * kf * zeta));
                    }
                }
                Ok((pairwise_sum(&top), pairwise_sum(&ed)))
            })
            .collect();
        let mut top = Vec::new();
        let mut ed = Vec::new();
        for r in per_mode {
            let (a, c) = r?;
            top.push(a);
            ed.push(c);
        }
        e_t_parts.push(pre * pairwise_sum(&top) * decay * de);
        e_ed_parts.push(pre * pairwise_sum(&ed) * decay * de * ed_growth);
    }
    Ok((pairwise_sum(&e_t_parts), pairwise_sum(&e_ed_parts)))
}

/// `|| A_{-beta}(t, 0, e^{-nu t} grad) h_0 ||_{H^{beta+1}_m}`; zero when the
/// state has no spatially homogeneous part.
pub fn shell_norm(state: &SpectralState, cfg: &MonitorConfig) -> Result<f64> {
    let grid = &state.grid;
    let row0 = state.row(0);
    if row0.iter().all(|v| *v == Complex64::new(0.0, 0.0)) {
        return Ok(0.0);
    }
    let t = state.time;
    let nu = state.nu;
    let decay = (-nu * t).exp();
    let p = phi_tilde(t, nu);
    let mut tmp = SpectralState::zeros(grid.clone(), nu);
    for j in 0..grid.n_eta_points() {
        let lam = gevrey_lambda(p, (decay * grid.eta(j)).abs(), &cfg.weight);
        if lam > crate::gevrey::MAX_EXPONENT {
            return Err(crate::error::Error::Overflow {
                k: 0,
                eta: grid.eta(j),
                exponent: lam,
            });
        }
        tmp.set(0, j, row0[j] * lam.exp());
    }
    Ok(weighted_norm_sq_modes(&tmp, cfg.weight.beta + 1.0, cfg.weight.m as i32, |k| k == 0)?.sqrt())
}

/// Monitors reconstructed from a trace: the density integral is accumulated
/// over every trace sample up to the state's time.
pub fn bootstrap_functionals(state: &SpectralState, trace: &DensityTrace, cfg: &MonitorConfig) -> Result<BootstrapRecord> {
    let mut mon = BootstrapMonitor::new(*cfg, state.nu);
    for (n, &t) in trace.times.iter().enumerate() {
        if t > state.time + 1e-12 {
            break;
        }
        mon.observe_density(t, &trace.rho_hat[n], trace.kmax)?;
    }
    mon.record(state)
}

/// Largest ratio, over the four quantities and all samples, between a run's
/// monitors and a reference series (same times) plus `floor`.
pub fn monitor_ratio(run: &[BootstrapRecord], reference: &[BootstrapRecord], floor: f64) -> f64 {
    let mut worst = 0.0f64;
    for (a, b) in run.iter().zip(reference) {
        for (x, y) in a.norms().iter().zip(b.norms()) {
            worst = worst.max(x / (y + floor));
        }
    }
    worst
}
