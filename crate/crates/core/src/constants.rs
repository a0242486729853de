//! Numerical constants that the analysis leaves unspecified, fixed once here.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Admissible exponent in `S(t,k) <= exp(-delta' min(nu k^2 t^3, k^2 t / nu))`.
/// Fixed from a lattice minimisation of the ratio `-ln S / min(..)`, whose
/// infimum is about 0.168 at `nu t = 1`; 1/12 leaves a factor-two margin.
pub const DELTA_PRIME: f64 = 1.0 / 12.0;

/// Default contour abscissa `lambda_bar = delta' / 2`.
pub const LAMBDA_BAR: f64 = DELTA_PRIME / 2.0;

/// Default cutoff above which modes are dismissed in the Penrose scan.
pub const K0: i64 = 16;

/// Default small constant in the hypocoercive functional.
pub const B_SMALL: f64 = 0.01;

/// Default upper bound on the diffusion coefficient used by sweeps.
pub const NU0: f64 = 0.1;

/// `K_j = 100^j`; `K_0 = 1`.
pub fn k_weight(j: usize) -> f64 {
    100f64.powi(j as i32)
}

/// `(2 pi)^{-1}`, the value of `mu_hat(0)` in one dimension.
pub const C0: f64 = 1.0 / (2.0 * std::f64::consts::PI);

/// Decay rates and contour data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilityConstants {
    pub delta: f64,
    pub delta1: f64,
    pub delta2: f64,
    pub lambda_bar: f64,
    pub kappa: f64,
    pub delta_prime: f64,
}

impl Default for StabilityConstants {
    fn default() -> Self {
        let delta = DELTA_PRIME / 4.0;
        StabilityConstants {
            delta,
            delta1: delta / 2.0,
            delta2: delta / 4.0,
            lambda_bar: LAMBDA_BAR,
            // Replaced by the measured margin once a Penrose scan has run.
            kappa: 0.5,
            delta_prime: DELTA_PRIME,
        }
    }
}

impl StabilityConstants {
    pub fn validate(&self) -> Result<()> {
        let ok = self.delta > self.delta1
            && self.delta1 > self.delta2
            && self.delta2 > 0.0
            && self.lambda_bar > 0.0
            && self.kappa > 0.0
            && self.delta_prime > 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!(
                "stability constants must satisfy delta > delta1 > delta2 > 0 and be positive: {self:?}"
            )))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_ordered() {
        let c = StabilityConstants::default();
        c.validate().unwrap();
        assert!(c.lambda_bar < c.delta_prime);
        assert_eq!(k_weight(0), 1.0);
        assert_eq!(k_weight(2), 1e4);
    }
}
