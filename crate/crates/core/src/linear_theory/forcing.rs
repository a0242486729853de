//! Forcing `H = I + N_0 + N_!=` of the density equation assembled from a
//! stored simulation history.

use num_complex::Complex64;
use rayon::prelude::*;

use super::resolvent::uniform_step;
use crate::error::{Error, Result};
use crate::linear_flow::s_shorthand;
use crate::numeric::{interp_cubic, pairwise_sum_c, phi_tilde};
use crate::sim::DensityTrace;
use crate::state::SpectralState;

/// Forcing per nonzero mode on the history's time grid, as `(k, H(t_n, k))`.
///
/// `history[n]` is the state at `t_n = n dt` (the first entry holds the
/// initial data) and `trace` must carry the density at the same times. With
/// `nonlinear = false` only the initial-data term `I` is assembled.
pub fn volterra_forcing_from_history(
    history: &[SpectralState],
    trace: &DensityTrace,
    nonlinear: bool,
) -> Result<Vec<(i64, Vec<Complex64>)>> {
    if history.len() < 2 {
        return Err(Error::Argument("history needs at least two snapshots".into()));
    }
    let t0 = history[0].time;
    let times: Vec<f64> = history.iter().map(|s| s.time - t0).collect();
    let dt = uniform_step(&times)?;
    if t0 != 0.0 {
        return Err(Error::Argument("history must start at t = 0".into()));
    }
    if trace.times.len() < history.len() {
        return Err(Error::Argument(format!(
            "density trace has {} samples but the history has {}",
            trace.times.len(),
            history.len()
        )));
    }
    for (i, s) in history.iter().enumerate() {
        if (trace.times[i] - s.time).abs() > 1e-9 * dt {
            return Err(Error::Argument(format!(
                "history sample {i} at t = {} has no matching density sample (found t = {})",
                s.time, trace.times[i]
            )));
        }
    }
    let grid = history[0].grid.clone();
    let nu = history[0].nu;
    let kmax = grid.kmax;
    let modes: Vec<i64> = grid.modes().filter(|k| *k != 0).collect();
    let out: Vec<(i64, Vec<Complex64>)> = modes
        .par_iter()
        .map(|&k| {
            let kf = k as f64;
            let h: Vec<Complex64> = times
                .iter()
                .enumerate()
                .map(|(n, &t)| {
                    let init = interp_cubic(history[0].row(k), grid.position(kf * phi_tilde(t, nu)))
                        * s_shorthand(t, k, nu);
                    if !nonlinear || n == 0 {
                        return init;
                    }
                    let mut by_ell = Vec::new();
                    for ell in -kmax..=kmax {
                        if ell == 0 || (k - ell).abs() > kmax {
                            continue;
                        }
                        let terms: Vec<Complex64> = (0..=n)
                            .map(|m| {
                                let lag = t - times[m];
                                let p = phi_tilde(lag, nu);
                                let f = interp_cubic(history[m].row(k - ell), grid.position(kf * p));
                                let w = if m == 0 || m == n { 0.5 } else { 1.0 };
                                trace.rho(m, ell) * f * (w * kf / ell as f64 * p * s_shorthand(lag, k, nu))
                            })
                            .collect();
                        by_ell.push(pairwise_sum_c(&terms) * dt);
                    }
                    init - pairwise_sum_c(&by_ell)
                })
                .collect();
            (k, h)
        })
        .collect();
    Ok(out)
}
