use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::constants::StabilityConstants;
use crate::error::{Error, Result};
use crate::gevrey::GevreyWeight;
use crate::grid::Grid;
use crate::numeric::bracket2;
use crate::state::SpectralState;

/// `h_in(k, eta) = amplitude * exp(-(eta - center)^2 / (2 width^2))` for
/// `k > 0`; the `-k` row is filled by the reality symmetry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianBump {
    pub k: i64,
    pub amplitude: f64,
    pub center: f64,
    pub width: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum InitialData {
    Bumps(Vec<GaussianBump>),
    /// `h_in(k, eta) = exp(-lambda <k,eta>^s) exp(-eta^2/(2 envelope^2))`
    /// on the listed positive modes (and their mirrors).
    Gevrey {
        s: f64,
        lambda: f64,
        envelope: f64,
        modes: Vec<i64>,
    },
}

impl InitialData {
    /// State with the profile scaled by `epsilon`, projected onto real,
    /// mean-zero data.
    pub fn build(&self, grid: &Grid, nu: f64, epsilon: f64) -> Result<SpectralState> {
        let mut s = SpectralState::zeros(grid.clone(), nu);
        match self {
            InitialData::Bumps(bumps) => {
                for b in bumps {
                    if b.k <= 0 || b.k > grid.kmax {
                        return Err(Error::Config(format!(
                            "bump mode {} must lie in 1..={}",
                            b.k, grid.kmax
                        )));
                    }
                    if !(b.width > 0.0) {
                        return Err(Error::Config(format!("bump width must be positive, got {}", b.width)));
                    }
                    for j in 0..grid.n_eta_points() {
                        let eta = grid.eta(j);
                        let g = epsilon * b.amplitude * (-(eta - b.center).powi(2) / (2.0 * b.width * b.width)).exp();
                        let mirror = grid.neta - j;
                        let cur = s.get(b.k, j);
                        s.set(b.k, j, cur + g);
                        let cur = s.get(-b.k, mirror);
                        s.set(-b.k, mirror, cur + g);
                    }
                }
            }
            InitialData::Gevrey {
                s: gs,
                lambda,
                envelope,
                modes,
            } => {
                for &k in modes {
                    if k <= 0 || k > grid.kmax {
                        return Err(Error::Config(format!("Gevrey mode {k} must lie in 1..={}", grid.kmax)));
                    }
                    for sign in [1i64, -1] {
                        let kk = sign * k;
                        for j in 0..grid.n_eta_points() {
                            let eta = grid.eta(j);
                            let v = epsilon
                                * (-lambda * bracket2(kk as f64, eta).powf(*gs)).exp()
                                * (-eta * eta / (2.0 * envelope * envelope)).exp();
                            s.set(kk, j, Complex64::new(v, 0.0));
                        }
                    }
                }
            }
        }
        s.project();
        Ok(s)
    }
}

/// Settings for the bootstrap monitors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonitorConfig {
    pub weight: GevreyWeight,
    pub constants: StabilityConstants,
    pub b_small: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub grid: Grid,
    pub nu: f64,
    pub dt: f64,
    pub t_end: f64,
    pub epsilon: f64,
    pub initial: InitialData,
    pub nonlinear: bool,
    pub linear_field: bool,
    /// Store a snapshot every this many steps (0 disables snapshots).
    pub history_stride: usize,
    /// Evaluate norms, entropy and monitors every this many steps.
    pub diagnostics_stride: usize,
    pub entropy: bool,
    pub monitors: Option<MonitorConfig>,
}

impl SimConfig {
    /// Linear run with a single Gaussian bump centred at `eta = 0` in mode 1.
    pub fn single_mode(grid: Grid, nu: f64, dt: f64, t_end: f64, epsilon: f64) -> Self {
        SimConfig {
            grid,
            nu,
            dt,
            t_end,
            epsilon,
            initial: InitialData::Bumps(vec![GaussianBump {
                k: 1,
                amplitude: 1.0,
                center: 0.0,
                width: 1.0,
            }]),
            nonlinear: false,
            linear_field: true,
            history_stride: 0,
            diagnostics_stride: 0,
            entropy: false,
            monitors: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.grid.validate()?;
        if !(self.nu >= 0.0) || !self.nu.is_finite() {
            return Err(Error::Config(format!("nu must be non-negative, got {}", self.nu)));
        }
        if !(self.dt > 0.0) {
            return Err(Error::Config(format!("dt must be positive, got {}", self.dt)));
        }
        let dt_max = self.grid.dt_max(self.nu);
        if self.dt > dt_max * (1.0 + 1e-12) {
            return Err(Error::Config(format!("dt = {} exceeds dt_max = {dt_max}", self.dt)));
        }
        if !(self.t_end >= 0.0) {
            return Err(Error::Config(format!("t_end must be non-negative, got {}", self.t_end)));
        }
        if !(self.epsilon >= 0.0) {
            return Err(Error::Config(format!("epsilon must be non-negative, got {}", self.epsilon)));
        }
        if let Some(m) = &self.monitors {
            m.weight.validate()?;
            m.constants.validate()?;
            if m.weight.m > self.grid.m {
                return Err(Error::Capability(format!(
                    "monitor moment order {} exceeds grid moment order {}",
                    m.weight.m, self.grid.m
                )));
            }
        }
        Ok(())
    }

    pub fn n_steps(&self) -> usize {
        (self.t_end / self.dt - 1e-9).ceil().max(0.0) as usize
    }
}
