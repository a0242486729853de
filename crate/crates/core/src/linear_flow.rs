//! Exact propagators for free transport with Fokker–Planck friction and
//! diffusion: the characteristic shift `eta_bar`, the damping factor `S`,
//! the per-step linear flow and the Ornstein–Uhlenbeck semigroup.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::numeric::{bracket, e1, g_series, integrate_adaptive, phi, phi_tilde, q_series, CubicStencil, MAX_NU_T};
use crate::state::SpectralState;
use crate::transform::TruncationWarning;

pub(crate) fn check_horizon(t: f64, nu: f64) -> Result<()> {
    if nu * t > MAX_NU_T {
        return Err(Error::Horizon {
            nu_t: nu * t,
            limit: MAX_NU_T,
            horizon: MAX_NU_T / nu,
        });
    }
    Ok(())
}

/// Cached ingredients of the characteristic flow at one `(nu, k, t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearFlowParams {
    pub nu: f64,
    pub k: i64,
    pub t: f64,
    /// `e^{-nu t}`
    pub decay: f64,
    /// `(1 - e^{-nu t}) / nu`
    pub phi_tilde: f64,
}

impl LinearFlowParams {
    pub fn new(nu: f64, k: i64, t: f64) -> Result<Self> {
        check_horizon(t, nu)?;
        Ok(LinearFlowParams {
            nu,
            k,
            t,
            decay: (-nu * t).exp(),
            phi_tilde: phi_tilde(t, nu),
        })
    }

    /// `eta_bar(t, k, eta) = e^{nu t} (eta - k phi_tilde(t))`.
    pub fn eta_bar(&self, eta: f64) -> f64 {
        (eta - self.k as f64 * self.phi_tilde) / self.decay
    }

    /// Frequency of the density: `eta_bar(t, k, k phi_tilde) = 0`.
    pub fn density_frequency(&self) -> f64 {
        self.k as f64 * self.phi_tilde
    }
}

/// `eta_bar(t, k, eta) = e^{nu t} eta - k (e^{nu t} - 1)/nu`.
pub fn eta_bar(t: f64, k: i64, eta: f64, nu: f64) -> Result<f64> {
    if t < 0.0 {
        return Err(Error::Argument(format!("eta_bar needs t >= 0, got {t}")));
    }
    check_horizon(t, nu)?;
    if nu == 0.0 {
        return Ok(eta - k as f64 * t);
    }
    Ok((nu * t).exp() * eta - k as f64 * phi(t, nu))
}

/// `\int_0^T eta_bar(s, k, eta0)^2 ds`.
pub fn j_integral(eta0: f64, k: i64, big_t: f64, nu: f64) -> f64 {
    let x = nu * big_t;
    let k = k as f64;
    let t2 = big_t * big_t;
    eta0 * eta0 * big_t * e1(2.0 * x) - 2.0 * k * eta0 * t2 * g_series(x) + k * k * t2 * big_t * q_series(x)
}

/// `S(t, tau, k, eta) = exp(-nu \int_tau^t eta_bar(s, k, eta)^2 ds)`.
pub fn s_factor(t: f64, tau: f64, k: i64, eta: f64, nu: f64) -> Result<f64> {
    if tau > t || tau < 0.0 {
        return Err(Error::Argument(format!("S needs 0 <= tau <= t, got tau = {tau}, t = {t}")));
    }
    if nu == 0.0 {
        return Ok(1.0);
    }
    let start = eta_bar(tau, k, eta, nu)?;
    check_horizon(t, nu)?;
    Ok((-nu * j_integral(start, k, t - tau, nu)).exp())
}

/// Shorthand `S(T, k) = exp(-nu k^2 \int_0^T phi_tilde(s)^2 ds)`.
pub fn s_shorthand(big_t: f64, k: i64, nu: f64) -> f64 {
    if nu == 0.0 || big_t == 0.0 {
        return 1.0;
    }
    let k = k as f64;
    (-nu * k * k * big_t.powi(3) * q_series(-nu * big_t)).exp()
}

/// Adaptive quadrature of the definition of `S`, used as an independent check.
pub fn s_factor_quadrature(t: f64, tau: f64, k: i64, eta: f64, nu: f64) -> Result<f64> {
    if tau > t {
        return Err(Error::Argument(format!("S needs tau <= t, got tau = {tau}, t = {t}")));
    }
    check_horizon(t, nu)?;
    let (integral, _) = integrate_adaptive(
        |s| {
            let e = (nu * s).exp() * eta - k as f64 * phi(s, nu);
            e * e
        },
        tau,
        t,
        1e-300,
        1e-14,
    );
    Ok((-nu * integral).exp())
}

/// Per-mode interpolation stencils and damping for one step of the free flow.
#[derive(Debug, Clone)]
pub struct LinearPropagator {
    pub dt: f64,
    pub nu: f64,
    grid: Grid,
    rows: Vec<Vec<(CubicStencil, f64)>>,
    /// True when some back-mapped frequency leaves the window.
    pub leaves_window: bool,
}

impl LinearPropagator {
    pub fn new(grid: &Grid, nu: f64, dt: f64) -> Result<Self> {
        if dt < 0.0 || !dt.is_finite() {
            return Err(Error::Argument(format!("linear step needs dt >= 0, got {dt}")));
        }
        check_horizon(dt, nu)?;
        let contraction = (-nu * dt).exp();
        let shift = phi_tilde(dt, nu);
        let n = grid.n_eta_points();
        let mut leaves_window = false;
        let rows: Vec<Vec<(CubicStencil, f64)>> = grid
            .modes()
            .map(|k| {
                (0..n)
                    .map(|j| {
                        let eta0 = contraction * grid.eta(j) + k as f64 * shift;
                        let st = CubicStencil::at(grid.position(eta0));
                        if !st.supported_inside(n) {
                            leaves_window = true;
                        }
                        let damping = if nu == 0.0 {
                            1.0
                        } else {
                            (-nu * j_integral(eta0, k, dt, nu)).exp()
                        };
                        (st, damping)
                    })
                    .collect()
            })
            .collect();
        Ok(LinearPropagator {
            dt,
            nu,
            grid: grid.clone(),
            rows,
            leaves_window,
        })
    }

    pub fn apply(&self, state: &SpectralState) -> Result<SpectralState> {
        if state.grid != self.grid {
            return Err(Error::Config("propagator built for a different grid".into()));
        }
        let modes: Vec<i64> = state.grid.modes().collect();
        let new_rows: Vec<Vec<Complex64>> = modes
            .par_iter()
            .zip(self.rows.par_iter())
            .map(|(&k, stencils)| {
                let src = state.row(k);
                stencils
                    .iter()
                    .map(|(st, damp)| st.apply(src) * *damp)
                    .collect()
            })
            .collect();
        let mut out = state.clone();
        for (k, r) in modes.iter().zip(new_rows) {
            out.row_mut(*k).copy_from_slice(&r);
        }
        out.time = state.time + self.dt;
        Ok(out)
    }
}

/// One exact step of the free flow. A warning is attached when frequencies
/// are pulled in from outside the window while the state is not negligible
/// near its edges.
pub fn linear_step(state: &SpectralState, dt: f64) -> Result<(SpectralState, Option<TruncationWarning>)> {
    if dt == 0.0 {
        return Ok((state.clone(), None));
    }
    let prop = LinearPropagator::new(&state.grid, state.nu, dt)?;
    let out = prop.apply(state)?;
    Ok((out, window_warning(&prop, state)))
}

pub(crate) fn window_warning(prop: &LinearPropagator, state: &SpectralState) -> Option<TruncationWarning> {
    if !prop.leaves_window {
        return None;
    }
    let r = state.boundary_residual(4);
    (r > crate::transform::BOUNDARY_TOLERANCE).then_some(TruncationWarning { boundary_residual: r })
}

/// Homogeneous Fokker–Planck semigroup `e^{nu t L}` in velocity frequency:
/// `g_hat(t, eta) = g_hat(0, e^{-nu t} eta) exp(-eta^2 (1 - e^{-2 nu t})/2)`.
/// Samples are on the eta lattice of `grid`.
pub fn fp_semigroup(g_hat: &[Complex64], grid: &Grid, t: f64, nu: f64) -> Result<Vec<Complex64>> {
    if g_hat.len() != grid.n_eta_points() {
        return Err(Error::Config(format!(
            "expected {} eta samples, got {}",
            grid.n_eta_points(),
            g_hat.len()
        )));
    }
    if t < 0.0 {
        return Err(Error::Argument(format!("semigroup needs t >= 0, got {t}")));
    }
    if t == 0.0 {
        return Ok(g_hat.to_vec());
    }
    check_horizon(t, nu)?;
    let c = (-nu * t).exp();
    let spread = -(-2.0 * nu * t).exp_m1();
    Ok((0..g_hat.len())
        .map(|j| {
            let eta = grid.eta(j);
            let st = CubicStencil::at(grid.position(c * eta));
            st.apply(g_hat) * (-eta * eta * spread / 2.0).exp()
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NutReport {
    pub nu: f64,
    pub sup_ratio: f64,
    pub argmax_t: f64,
}

/// Sup over `t_grid` of `<t> <nu t>^{-1} <(1 - e^{-nu t})/nu>^{-1}`.
pub fn nut_inequality_check(nu: f64, t_grid: &[f64], nu0: f64) -> Result<NutReport> {
    if !(nu >= 0.0 && nu < nu0) {
        return Err(Error::Argument(format!("nu = {nu} must lie in [0, nu0 = {nu0})")));
    }
    let mut best = (f64::NEG_INFINITY, 0.0);
    for &t in t_grid {
        let r = bracket(t) / (bracket(nu * t) * bracket(phi_tilde(t, nu)));
        if r > best.0 {
            best = (r, t);
        }
    }
    Ok(NutReport {
        nu,
        sup_ratio: best.0,
        argmax_t: best.1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eta_bar_basics() {
        assert_eq!(eta_bar(0.0, 3, 1.5, 0.1).unwrap(), 1.5);
        assert!((eta_bar(5.0, 1, 2.0, 1e-12).unwrap() + 3.0).abs() < 1e-9);
        assert!(matches!(eta_bar(1e4, 1, 0.0, 0.1), Err(Error::Horizon { .. })));
    }

    #[test]
    fn shorthand_matches_general_factor() {
        for &(t, k, nu) in &[(2.0, 1, 0.01), (7.0, 3, 0.2), (0.5, -2, 1e-7)] {
            let p = LinearFlowParams::new(nu, k, t).unwrap();
            let general = s_factor(t, 0.0, k, p.density_frequency(), nu).unwrap();
            assert!((general - s_shorthand(t, k, nu)).abs() < 1e-13);
        }
    }

    #[test]
    fn s_of_empty_interval_is_one() {
        assert_eq!(s_factor(3.0, 3.0, 2, 0.7, 0.05).unwrap(), 1.0);
        assert!(matches!(s_factor(1.0, 2.0, 1, 0.0, 0.1), Err(Error::Argument(_))));
    }

    #[test]
    fn zero_step_is_identity() {
        let g = Grid::new(2, 64, 8.0).unwrap();
        let s = SpectralState::from_fn(g, 0.01, |k, eta| Complex64::new((-eta * eta).exp() * k as f64, 0.0));
        let (out, w) = linear_step(&s, 0.0).unwrap();
        assert_eq!(out, s);
        assert!(w.is_none());
        assert!(linear_step(&s, -1.0).is_err());
    }

    #[test]
    fn nut_ratio_is_one_at_origin() {
        let r = nut_inequality_check(1e-3, &[0.0], 0.1).unwrap();
        assert_eq!(r.sup_ratio, 1.0);
        assert!(nut_inequality_check(0.5, &[0.0], 0.1).is_err());
    }
}
