use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::state::SpectralState;

/// `rho_hat(t,k) = h_hat(t,k,0)` for every mode, indexed `k + kmax`.
pub fn density(state: &SpectralState) -> Vec<Complex64> {
    let z = state.grid.zero_index();
    state.grid.modes().map(|k| state.get(k, z)).collect()
}

/// `E_hat(k) = -i k/|k|^2 rho_hat(k)`, `E_hat(0) = 0`.
pub fn efield(rho: &[Complex64], kmax: i64) -> Vec<Complex64> {
    (-kmax..=kmax)
        .zip(rho)
        .map(|(k, r)| {
            if k == 0 {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(0.0, -1.0 / k as f64) * r
            }
        })
        .collect()
}

/// `(1/2) \int E^2 dx = pi sum_k |E_hat(k)|^2`.
pub fn field_energy(efield_hat: &[Complex64]) -> f64 {
    let parts: Vec<f64> = efield_hat.iter().map(|e| e.norm_sqr()).collect();
    std::f64::consts::PI * crate::numeric::pairwise_sum(&parts)
}

/// Time series of the density and field per mode.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DensityTrace {
    pub kmax: i64,
    pub times: Vec<f64>,
    /// `rho_hat[n][k + kmax]`
    pub rho_hat: Vec<Vec<Complex64>>,
    pub efield_hat: Vec<Vec<Complex64>>,
}

impl DensityTrace {
    pub fn new(kmax: i64) -> Self {
        DensityTrace {
            kmax,
            ..Default::default()
        }
    }

    pub fn record(&mut self, state: &SpectralState) {
        let rho = density(state);
        self.efield_hat.push(efield(&rho, self.kmax));
        self.rho_hat.push(rho);
        self.times.push(state.time);
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    #[inline]
    pub fn rho(&self, n: usize, k: i64) -> Complex64 {
        self.rho_hat[n][(k + self.kmax) as usize]
    }

    /// `rho_hat(., k)` over the whole trace.
    pub fn series(&self, k: i64) -> Vec<Complex64> {
        (0..self.len()).map(|n| self.rho(n, k)).collect()
    }

    /// `|rho_hat(., k)|` over the whole trace.
    pub fn abs_series(&self, k: i64) -> Vec<f64> {
        (0..self.len()).map(|n| self.rho(n, k).norm()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;

    #[test]
    fn field_follows_poisson() {
        let rho = vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 2.0),
            Complex64::new(3.0, 0.0),
            Complex64::new(0.0, 2.0),
            Complex64::new(1.0, 0.0),
        ];
        let e = efield(&rho, 2);
        assert_eq!(e[2], Complex64::new(0.0, 0.0));
        // k = 1: -i rho
        assert_eq!(e[3], Complex64::new(2.0, 0.0));
        // k = -2: -i/(-2) rho = i/2 rho
        assert_eq!(e[0], Complex64::new(0.0, 0.5));
    }

    #[test]
    fn zero_state_has_zero_density() {
        let s = SpectralState::zeros(Grid::new(2, 16, 4.0).unwrap(), 0.0);
        assert!(density(&s).iter().all(|r| r.norm() == 0.0));
    }
}
