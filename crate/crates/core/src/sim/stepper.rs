//! Strang splitting: exact free flow for `dt/2`, a two-stage explicit
//! substep for the field terms, exact free flow for `dt/2`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::fields::density;
use crate::error::{Error, Result};
use crate::linear_flow::{window_warning, LinearPropagator};
use crate::linear_theory::mu_hat;
use crate::state::{ProjectionDefects, SpectralState};
use crate::transform::TruncationWarning;

/// Field-driven part of the evolution,
/// `-rho(k) (eta/k) mu_hat(eta) - sum_{l != 0} rho(l) (eta/l) h(k-l, eta)`,
/// with either term switchable. Products leaving the mode range are dropped.
pub fn field_rhs(state: &SpectralState, linear_field: bool, nonlinear: bool) -> SpectralState {
    let grid = &state.grid;
    let kmax = grid.kmax;
    let rho = density(state);
    let etas: Vec<f64> = (0..grid.n_eta_points()).map(|j| grid.eta(j)).collect();
    let modes: Vec<i64> = grid.modes().collect();
    let rows: Vec<Vec<Complex64>> = modes
        .par_iter()
        .map(|&k| {
            let mut out = vec![Complex64::new(0.0, 0.0); etas.len()];
            if linear_field && k != 0 {
                let c = -rho[(k + kmax) as usize] / k as f64;
                for (o, &eta) in out.iter_mut().zip(&etas) {
                    *o += c * (eta * mu_hat(eta));
                }
            }
            if nonlinear {
                for ell in -kmax..=kmax {
                    if ell == 0 || (k - ell).abs() > kmax {
                        continue;
                    }
                    let c = -rho[(ell + kmax) as usize] / ell as f64;
                    if c == Complex64::new(0.0, 0.0) {
                        continue;
                    }
                    let src = state.row(k - ell);
                    for ((o, &eta), h) in out.iter_mut().zip(&etas).zip(src) {
                        *o += c * eta * h;
                    }
                }
            }
            out
        })
        .collect();
    let mut inc = SpectralState::zeros(grid.clone(), state.nu);
    inc.time = state.time;
    for (k, r) in modes.iter().zip(rows) {
        inc.row_mut(*k).copy_from_slice(&r);
    }
    inc
}

/// Both field terms switched on.
pub fn nonlinear_rhs(state: &SpectralState) -> SpectralState {
    field_rhs(state, true, true)
}

/// What one step removed or flagged.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct StepReport {
    pub defects: ProjectionDefects,
    pub warning: Option<TruncationWarning>,
}

/// Step operator with the half-step propagator cached.
#[derive(Debug, Clone)]
pub struct Stepper {
    pub dt: f64,
    pub linear_field: bool,
    pub nonlinear: bool,
    half: LinearPropagator,
}

impl Stepper {
    pub fn new(state: &SpectralState, dt: f64, linear_field: bool, nonlinear: bool) -> Result<Self> {
        if !(dt > 0.0) {
            return Err(Error::Argument(format!("step needs dt > 0, got {dt}")));
        }
        Ok(Stepper {
            dt,
            linear_field,
            nonlinear,
            half: LinearPropagator::new(&state.grid, state.nu, 0.5 * dt)?,
        })
    }

    pub fn step(&self, state: &SpectralState) -> Result<(SpectralState, StepReport)> {
        let mut warning = window_warning(&self.half, state);
        let s1 = self.half.apply(state)?;
        let s2 = if self.linear_field || self.nonlinear {
            // Heun: the density is read again at the second stage.
            let k1 = field_rhs(&s1, self.linear_field, self.nonlinear);
            let mut mid = s1.clone();
            mid.axpy(self.dt, &k1);
            let k2 = field_rhs(&mid, self.linear_field, self.nonlinear);
            let mut s2 = s1.clone();
            s2.axpy(0.5 * self.dt, &k1);
            s2.axpy(0.5 * self.dt, &k2);
            s2
        } else {
            s1
        };
        if warning.is_none() {
            warning = window_warning(&self.half, &s2);
        }
        let mut s3 = self.half.apply(&s2)?;
        s3.time = state.time + self.dt;
        if let Some(k) = s3.first_non_finite_mode() {
            return Err(Error::BlowUp { t: s3.time, k });
        }
        let defects = s3.project();
        Ok((s3, StepReport { defects, warning }))
    }
}

/// One Strang step; builds the propagator on every call.
pub fn step(
    state: &SpectralState,
    dt: f64,
    linear_field: bool,
    nonlinear: bool,
) -> Result<(SpectralState, StepReport)> {
    Stepper::new(state, dt, linear_field, nonlinear)?.step(state)
}
