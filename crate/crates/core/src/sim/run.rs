//! Time integration driver.

use serde::{Deserialize, Serialize};

use super::bootstrap::{BootstrapMonitor, BootstrapRecord};
use super::config::SimConfig;
use super::entropy::entropy_energy;
use super::fields::DensityTrace;
use super::stepper::Stepper;
use crate::error::{Error, Result};
use crate::state::{ProjectionDefects, SpectralState};
use crate::transform::TruncationWarning;

/// Quantities evaluated every `diagnostics_stride` steps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub t: f64,
    /// `||h_hat(t,k,.)||_{L^2}` indexed `k + kmax`.
    pub mode_norms: Vec<f64>,
    /// Largest reality and mass defects removed since the previous sample.
    pub reality_defect: f64,
    pub mass_defect: f64,
    pub entropy: Option<f64>,
    pub bootstrap: Option<BootstrapRecord>,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    /// Density at every step, starting with the initial data.
    pub trace: DensityTrace,
    /// Every `history_stride`-th state, starting with the initial data.
    pub snapshots: Vec<SpectralState>,
    pub diagnostics: Vec<Diagnostic>,
    /// First window warning of each step that produced one.
    pub warnings: Vec<(f64, TruncationWarning)>,
    pub final_state: SpectralState,
    /// Largest reality and mass defects removed by any step.
    pub max_defects: ProjectionDefects,
    /// Set when the run stopped early; everything recorded before the
    /// failure is kept.
    pub failure: Option<Error>,
}

impl RunOutput {
    pub fn completed(&self) -> bool {
        self.failure.is_none()
    }

    pub fn entropy_series(&self) -> Vec<(f64, f64)> {
        self.diagnostics.iter().filter_map(|d| d.entropy.map(|e| (d.t, e))).collect()
    }

    pub fn bootstrap_series(&self) -> Vec<BootstrapRecord> {
        self.diagnostics.iter().filter_map(|d| d.bootstrap).collect()
    }
}

fn diagnostic(
    state: &SpectralState,
    cfg: &SimConfig,
    monitor: Option<&BootstrapMonitor>,
    defects: (f64, f64),
) -> Result<Diagnostic> {
    let de = state.grid.d_eta();
    Ok(Diagnostic {
        t: state.time,
        mode_norms: state.grid.modes().map(|k| (state.mode_norm_sq(k) * de).sqrt()).collect(),
        reality_defect: defects.0,
        mass_defect: defects.1,
        entropy: if cfg.entropy { Some(entropy_energy(state)?) } else { None },
        bootstrap: match monitor {
            Some(m) => Some(m.record(state)?),
            None => None,
        },
    })
}

/// Integrates `cfg` from its initial data to `t_end`. Configuration errors
/// are returned directly; numerical failures during the march end the run
/// and are reported in [`RunOutput::failure`].
pub fn run(cfg: &SimConfig) -> Result<RunOutput> {
    cfg.validate()?;
    let state = cfg.initial.build(&cfg.grid, cfg.nu, cfg.epsilon)?;
    run_from(cfg, state)
}

/// As [`run`], starting from a given state.
pub fn run_from(cfg: &SimConfig, initial: SpectralState) -> Result<RunOutput> {
    cfg.validate()?;
    if initial.grid != cfg.grid {
        return Err(Error::Config("initial state grid differs from the configured grid".into()));
    }
    let stepper = Stepper::new(&initial, cfg.dt, cfg.linear_field, cfg.nonlinear)?;
    let mut monitor = cfg.monitors.map(|m| BootstrapMonitor::new(m, cfg.nu));
    let mut out = RunOutput {
        trace: DensityTrace::new(cfg.grid.kmax),
        snapshots: Vec::new(),
        diagnostics: Vec::new(),
        warnings: Vec::new(),
        final_state: initial.clone(),
        max_defects: ProjectionDefects::default(),
        failure: None,
    };
    let mut state = initial;
    out.trace.record(&state);
    if cfg.history_stride > 0 {
        out.snapshots.push(state.clone());
    }
    let mut defects = (0.0f64, 0.0f64);
    let observe = |monitor: &mut Option<BootstrapMonitor>, trace: &DensityTrace| -> Result<()> {
        if let Some(m) = monitor.as_mut() {
            let n = trace.len() - 1;
            m.observe_density(trace.times[n], &trace.rho_hat[n], trace.kmax)?;
        }
        Ok(())
    };
    let start = (|| -> Result<()> {
        observe(&mut monitor, &out.trace)?;
        if cfg.diagnostics_stride > 0 {
            out.diagnostics.push(diagnostic(&state, cfg, monitor.as_ref(), defects)?);
        }
        Ok(())
    })();
    if let Err(e) = start {
        out.failure = Some(e);
        return Ok(out);
    }
    for n in 1..=cfg.n_steps() {
        let res = (|| -> Result<SpectralState> {
            let (next, report) = stepper.step(&state)?;
            if let Some(w) = report.warning {
                out.warnings.push((next.time, w));
            }
            out.max_defects.reality = out.max_defects.reality.max(report.defects.reality);
            out.max_defects.mass = out.max_defects.mass.max(report.defects.mass);
            defects.0 = defects.0.max(report.defects.reality);
            defects.1 = defects.1.max(report.defects.mass);
            out.trace.record(&next);
            observe(&mut monitor, &out.trace)?;
            if cfg.history_stride > 0 && n % cfg.history_stride == 0 {
                out.snapshots.push(next.clone());
            }
            if cfg.diagnostics_stride > 0 && n % cfg.diagnostics_stride == 0 {
                out.diagnostics.push(diagnostic(&next, cfg, monitor.as_ref(), defects)?);
                defects = (0.0, 0.0);
            }
            Ok(next)
        })();
        match res {
            Ok(next) => state = next,
            Err(e) => {
                out.failure = Some(e);
                break;
            }
        }
    }
    out.final_state = state;
    Ok(out)
}
