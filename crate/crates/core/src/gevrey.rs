//! Time-dependent Gevrey weight `lambda(t, r)` and the multipliers
//! `A_c(t,k,eta) = <k,eta>^{beta+c} exp(lambda(phi(t), |k,eta|))`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{bracket, phi_tilde};
use crate::state::SpectralState;

/// Largest exponent accepted before a multiplier is reported as overflowing.
pub const MAX_EXPONENT: f64 = 700.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GevreyWeight {
    pub lambda1: f64,
    pub lambda_inf: f64,
    pub s: f64,
    pub b: f64,
    pub beta: f64,
    pub m: u32,
}

impl GevreyWeight {
    /// Weight with `b = s/8` and the smallest admissible `beta` unless a
    /// larger one is given.
    pub fn new(lambda1: f64, lambda_inf: f64, s: f64, beta: Option<f64>, m: u32) -> Result<Self> {
        let beta_min = Self::beta_min(1, m);
        let w = GevreyWeight {
            lambda1,
            lambda_inf,
            s,
            b: s / 8.0,
            beta: beta.unwrap_or(beta_min),
            m,
        };
        w.validate()?;
        Ok(w)
    }

    /// `max(d/2 + m + 3, 5)`.
    pub fn beta_min(d: usize, m: u32) -> f64 {
        (d as f64 / 2.0 + m as f64 + 3.0).max(5.0)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda_inf > 0.0) {
            return Err(Error::Config(format!("lambda_inf must be positive, got {}", self.lambda_inf)));
        }
        // Equality is allowed for the degenerate constant-lambda weight.
        if self.lambda1 < self.lambda_inf {
            return Err(Error::Config(format!(
                "lambda1 ({}) must not be below lambda_inf ({})",
                self.lambda1, self.lambda_inf
            )));
        }
        if !(self.s > 0.0 && self.s <= 1.0) {
            return Err(Error::Config(format!("Gevrey index s must lie in (0, 1], got {}", self.s)));
        }
        if self.b != self.s / 8.0 {
            return Err(Error::Config(format!("b must equal s/8, got b = {}", self.b)));
        }
        if (self.m as f64) < 0.5 + 2.0 {
            return Err(Error::Config(format!("moment order m must be >= d/2 + 2, got {}", self.m)));
        }
        if self.beta < Self::beta_min(1, self.m) {
            return Err(Error::Config(format!(
                "beta must be >= {}, got {}",
                Self::beta_min(1, self.m),
                self.beta
            )));
        }
        Ok(())
    }
}

/// `lambda(t, r)`.
pub fn gevrey_lambda(t: f64, r: f64, w: &GevreyWeight) -> f64 {
    let amp = (w.lambda1 - w.lambda_inf) / 8.0;
    let rs = bracket(r).powf(w.s);
    let r_sm1 = bracket(r).powf(w.s - 1.0);
    w.lambda_inf + amp * (1.0 + t).powf(-w.b) * rs + amp * (1.0 + t * r_sm1).powf(-w.b) * rs
}

/// `ln A_c` evaluated at the already-transformed time argument `t_arg`.
pub fn log_multiplier(t_arg: f64, k: f64, eta: f64, c: f64, w: &GevreyWeight) -> f64 {
    let r = k.hypot(eta);
    let br = (1.0 + r * r).sqrt();
    (w.beta + c) * br.ln() + gevrey_lambda(t_arg, r, w)
}

/// `A^nu_c(t, k, eta)` with the `(1 - e^{-nu t})/nu` time argument.
pub fn multiplier(t: f64, nu: f64, k: i64, eta: f64, c: f64, w: &GevreyWeight) -> Result<f64> {
    let e = log_multiplier(phi_tilde(t, nu), k as f64, eta, c, w);
    if e > MAX_EXPONENT || !e.is_finite() {
        return Err(Error::Overflow { k, eta, exponent: e });
    }
    Ok(e.exp())
}

/// Pointwise product of the state with `A^nu_c(t, k, eta)`.
pub fn apply_multiplier(state: &SpectralState, c: f64, w: &GevreyWeight, t: f64) -> Result<SpectralState> {
    if c < -w.beta {
        return Err(Error::Argument(format!("c = {c} is below -beta = {}", -w.beta)));
    }
    let mut out = state.clone();
    let grid = state.grid.clone();
    for k in grid.modes() {
        let row = out.row_mut(k);
        for (j, v) in row.iter_mut().enumerate() {
            *v *= multiplier(t, state.nu, k, grid.eta(j), c, w)?;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn weight() -> GevreyWeight {
        GevreyWeight::new(1.0, 0.5, 1.0 / 3.0, None, 3).unwrap()
    }

    #[test]
    fn lambda_at_origin_and_infinity() {
        let w = weight();
        assert!((gevrey_lambda(0.0, 0.0, &w) - (0.5 + 0.5 / 4.0)).abs() < 1e-15);
        // The approach is like t^{-b} with b = s/8, so 1e-6 needs t ~ 10^{6/b}.
        let at_1e8 = gevrey_lambda(1e8, 3.0, &w);
        assert!(at_1e8 > 0.5 && at_1e8 < gevrey_lambda(0.0, 3.0, &w));
        let far = 10f64.powf(7.0 / w.b);
        assert!((gevrey_lambda(far, 3.0, &w) - 0.5).abs() < 1e-6);
    }

    #[test]
    fn b_must_equal_s_over_8() {
        let mut w = weight();
        w.b = 0.1;
        assert!(w.validate().is_err());
    }

    #[test]
    fn overflow_is_reported_with_location() {
        let w = GevreyWeight::new(400.0, 300.0, 1.0, None, 3).unwrap();
        match multiplier(0.0, 0.0, 3, 1e3, 0.0, &w) {
            Err(Error::Overflow { k, eta, .. }) => {
                assert_eq!(k, 3);
                assert_eq!(eta, 1e3);
            }
            other => panic!("expected overflow, got {other:?}"),
        }
    }
}
