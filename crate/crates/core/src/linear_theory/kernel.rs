use serde::{Deserialize, Serialize};

use crate::constants::C0;
use crate::error::{Error, Result};
use crate::linear_flow::s_shorthand;
use crate::numeric::phi_tilde;

/// `mu_hat(eta) = (2 pi)^{-1} e^{-eta^2/2}`.
#[inline]
pub fn mu_hat(eta: f64) -> f64 {
    C0 * (-0.5 * eta * eta).exp()
}

/// Kernel value without argument checks.
#[inline]
pub(crate) fn kernel_unchecked(t: f64, k: i64, nu: f64) -> f64 {
    let p = phi_tilde(t, nu);
    p * mu_hat(k as f64 * p) * s_shorthand(t, k, nu)
}

/// `K^nu(t,k) = phi_tilde(t) mu_hat(k phi_tilde(t)) S(t,k)`.
pub fn kernel_k(t: f64, k: i64, nu: f64) -> Result<f64> {
    if k == 0 {
        return Err(Error::Argument("the kernel is undefined for the zero mode".into()));
    }
    if t < 0.0 {
        return Err(Error::Argument(format!("kernel needs t >= 0, got {t}")));
    }
    Ok(kernel_unchecked(t, k, nu))
}

/// `(K'(0), K''(0), K'''(0))`.
pub fn kernel_derivatives_at_zero(k: i64, nu: f64) -> [f64; 3] {
    let k2 = (k * k) as f64;
    [C0, -nu * C0, C0 * (nu * nu - 3.0 * k2)]
}

/// `(R'(0), R''(0), R'''(0))` for the resolvent of `K`.
pub fn resolvent_derivatives_at_zero(k: i64, nu: f64) -> [f64; 3] {
    let d = kernel_derivatives_at_zero(k, nu);
    [d[0], d[1], d[2] - C0 * C0]
}

/// Kernel (and optionally resolvent) sampled on `t_i = i dt`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelTable {
    pub k: i64,
    pub nu: f64,
    pub dt: f64,
    pub t_grid: Vec<f64>,
    pub k_values: Vec<f64>,
    pub r_values: Option<Vec<f64>>,
}

impl KernelTable {
    /// `n` samples starting at `t = 0`.
    pub fn sample(k: i64, nu: f64, dt: f64, n: usize) -> Result<Self> {
        if !(dt > 0.0) {
            return Err(Error::Argument(format!("time step must be positive, got {dt}")));
        }
        let t_grid: Vec<f64> = (0..n).map(|i| i as f64 * dt).collect();
        let k_values = t_grid
            .iter()
            .map(|&t| kernel_k(t, k, nu))
            .collect::<Result<Vec<f64>>>()?;
        Ok(KernelTable {
            k,
            nu,
            dt,
            t_grid,
            k_values,
            r_values: None,
        })
    }

    /// Table with a constant kernel, used for solver checks.
    pub fn constant(c: f64, dt: f64, n: usize) -> Self {
        KernelTable {
            k: 1,
            nu: 0.0,
            dt,
            t_grid: (0..n).map(|i| i as f64 * dt).collect(),
            k_values: vec![c; n],
            r_values: None,
        }
    }

    pub fn len(&self) -> usize {
        self.t_grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t_grid.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_vanishes_at_zero_and_rejects_zero_mode() {
        assert_eq!(kernel_k(0.0, 1, 0.01).unwrap(), 0.0);
        assert!(kernel_k(1.0, 0, 0.01).is_err());
    }

    #[test]
    fn small_nu_matches_collisionless_branch() {
        for &t in &[0.3, 1.0, 2.5, 6.0] {
            let a = kernel_k(t, 1, 1e-10).unwrap();
            let b = t * mu_hat(t);
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn taylor_coefficients_match_finite_differences() {
        let (k, nu) = (2, 0.3);
        let h = 1e-3;
        let d = kernel_derivatives_at_zero(k, nu);
        let f = |t: f64| kernel_k(t, k, nu).unwrap();
        // K(h) = K1 h + K2 h^2/2 + K3 h^3/6 + O(h^4)
        let approx = d[0] * h + d[1] * h * h / 2.0 + d[2] * h.powi(3) / 6.0;
        assert!((f(h) - approx).abs() < 1e-11);
    }
}
