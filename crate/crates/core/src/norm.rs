//! Weighted Sobolev norms `||f||^2 = \iint <v>^q |<grad>^sigma f|^2 dx dv`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numeric::{bracket, bracket2, pairwise_sum};
use crate::state::SpectralState;
use crate::transform::{eta_to_v, trapezoid_weights};

/// Squared weighted norm of the modes selected by `keep`.
pub fn weighted_norm_sq_modes<F: Fn(i64) -> bool + Sync>(
    state: &SpectralState,
    sigma: f64,
    q: i32,
    keep: F,
) -> Result<f64> {
    let grid = &state.grid;
    if q < 0 || q as u32 > 2 * grid.m {
        return Err(Error::Capability(format!(
            "velocity weight q = {q} exceeds the configured moment order 2m = {}",
            2 * grid.m
        )));
    }
    let vs: Vec<f64> = (0..grid.nv).map(|j| grid.v(j)).collect();
    let wv: Vec<f64> = trapezoid_weights(vs.len(), grid.d_v())
        .iter()
        .zip(&vs)
        .map(|(w, v)| w * bracket(*v).powi(q))
        .collect();
    let modes: Vec<i64> = grid.modes().filter(|k| keep(*k)).collect();
    let parts: Vec<f64> = modes
        .par_iter()
        .map(|&k| {
            let row: Vec<Complex64> = state
                .row(k)
                .iter()
                .enumerate()
                .map(|(j, a)| a * bracket2(k as f64, grid.eta(j)).powf(sigma))
                .collect();
            if row.iter().all(|a| *a == Complex64::new(0.0, 0.0)) {
                return 0.0;
            }
            let g = eta_to_v(&row, grid, &vs);
            let terms: Vec<f64> = g.iter().zip(&wv).map(|(g, w)| g.norm_sqr() * w).collect();
            2.0 * PI * pairwise_sum(&terms)
        })
        .collect();
    Ok(pairwise_sum(&parts))
}

/// `||h||_{H^sigma_q}` evaluated through the physical velocity variable.
pub fn weighted_norm(state: &SpectralState, sigma: f64, q: i32) -> Result<f64> {
    Ok(weighted_norm_sq_modes(state, sigma, q, |_| true)?.sqrt())
}

/// `sum_k \int |h_hat(k,eta)|^2 d eta`, which equals `\iint |h|^2 dx dv`.
pub fn spectral_l2_sq(state: &SpectralState) -> f64 {
    let parts: Vec<f64> = state.grid.modes().map(|k| state.mode_norm_sq(k)).collect();
    pairwise_sum(&parts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;

    #[test]
    fn zero_state_has_zero_norm() {
        let g = Grid::new(2, 64, 8.0).unwrap();
        let s = SpectralState::zeros(g, 0.0);
        assert_eq!(weighted_norm(&s, 1.0, 2).unwrap(), 0.0);
    }

    #[test]
    fn moment_order_is_enforced() {
        let g = Grid::new(2, 64, 8.0).unwrap();
        let s = SpectralState::zeros(g, 0.0);
        assert!(matches!(weighted_norm(&s, 0.0, 7), Err(Error::Capability(_))));
    }
}
