//! Two-mode echo run: a bump in mode 2 centred at `eta0` plus a small mode-1
//! seed at `eta = 0`. The mode-1 density samples frequency `eta = t`, so the
//! nonlinearly transferred bump returns near `t = eta0`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::sim::{run, GaussianBump, InitialData, SimConfig};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EchoConfig {
    pub nu: f64,
    pub epsilon: f64,
    pub eta0: f64,
    pub bump_mode: i64,
    pub bump_width: f64,
    pub seed_amplitude: f64,
    pub kmax: i64,
    pub eta_max: f64,
    pub d_eta: f64,
    pub dt: f64,
    /// Run length as a multiple of `eta0`.
    pub t_end_factor: f64,
    pub nonlinear: bool,
}

impl Default for EchoConfig {
    fn default() -> Self {
        EchoConfig {
            nu: 0.0,
            epsilon: 1e-3,
            eta0: 30.0,
            bump_mode: 2,
            bump_width: 1.0,
            seed_amplitude: 0.1,
            kmax: 4,
            eta_max: 45.0,
            d_eta: 0.025,
            dt: 0.05,
            t_end_factor: 1.2,
            nonlinear: true,
        }
    }
}

impl EchoConfig {
    pub fn sim_config(&self) -> Result<SimConfig> {
        if !(self.eta0 > 0.0 && self.eta0 <= 0.8 * self.eta_max) {
            return Err(Error::Config(format!(
                "eta0 = {} must lie inside the eta window with a 20% margin (eta_max = {})",
                self.eta0, self.eta_max
            )));
        }
        if self.bump_mode < 2 || self.bump_mode > self.kmax {
            return Err(Error::Config(format!("bump mode {} must lie in 2..={}", self.bump_mode, self.kmax)));
        }
        let grid = Grid::with_spacing(self.kmax, self.d_eta, self.eta_max)?;
        let mut cfg = SimConfig::single_mode(grid, self.nu, self.dt, self.t_end_factor * self.eta0, self.epsilon);
        cfg.initial = InitialData::Bumps(vec![
            GaussianBump {
                k: 1,
                amplitude: self.seed_amplitude,
                center: 0.0,
                width: 1.0,
            },
            GaussianBump {
                k: self.bump_mode,
                amplitude: 1.0,
                center: self.eta0,
                width: self.bump_width,
            },
        ]);
        cfg.nonlinear = self.nonlinear;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EchoReport {
    pub config: EchoConfig,
    pub times: Vec<f64>,
    /// `|rho_hat(t,1)|`.
    pub abs_rho1: Vec<f64>,
    pub primary_max: f64,
    /// `max(max |rho_hat(.,1)| on [eta0/2, 3 eta0/4], 1e-10 primary_max)`.
    pub noise_floor: f64,
    /// Largest value after `3 eta0/4` and its time.
    pub late_max: f64,
    pub late_argmax: f64,
    /// `Some(t_peak)` when the late maximum is an interior local maximum at
    /// least three times the noise floor.
    pub t_peak: Option<f64>,
    pub predicted_t: f64,
}

impl EchoReport {
    pub fn echo_amplitude(&self) -> Option<f64> {
        self.t_peak.map(|_| self.late_max)
    }
}

pub fn echo_experiment(cfg: &EchoConfig) -> Result<EchoReport> {
    let sim = cfg.sim_config()?;
    let out = run(&sim)?;
    if let Some(e) = out.failure {
        return Err(e);
    }
    let times = out.trace.times.clone();
    let abs_rho1 = out.trace.abs_series(1);
    let window_max = |lo: f64, hi: f64| {
        times
            .iter()
            .zip(&abs_rho1)
            .enumerate()
            .filter(|(_, (t, _))| **t >= lo && **t <= hi)
            .fold((0.0f64, 0usize), |acc, (i, (_, v))| if *v > acc.0 { (*v, i) } else { acc })
    };
    let primary_max = window_max(0.0, 0.25 * cfg.eta0).0;
    let baseline = window_max(0.5 * cfg.eta0, 0.75 * cfg.eta0).0;
    let noise_floor = baseline.max(1e-10 * primary_max);
    let (late_max, i) = window_max(0.75 * cfg.eta0, f64::INFINITY);
    let interior = i > 0 && i + 1 < abs_rho1.len() && late_max > 0.0;
    let t_peak = (interior && late_max >= 3.0 * noise_floor).then_some(times[i]);
    Ok(EchoReport {
        config: *cfg,
        late_argmax: times[i],
        times,
        abs_rho1,
        primary_max,
        noise_floor,
        late_max,
        t_peak,
        predicted_t: cfg.eta0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eta0_must_fit_the_window() {
        let cfg = EchoConfig {
            eta0: 40.0,
            ..Default::default()
        };
        assert!(matches!(cfg.sim_config(), Err(Error::Config(_))));
    }
}
