use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Truncated mode/frequency grid plus the physical-space sampling used by
/// quadrature-based diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub d: usize,
    pub kmax: i64,
    /// Number of eta intervals; samples are `eta_j = (j - neta/2) * d_eta`
    /// for `j = 0..=neta`, so `eta = 0` sits at `j = neta/2`.
    pub neta: usize,
    pub eta_max: f64,
    pub nx: usize,
    pub nv: usize,
    /// Half-width of the physical velocity window.
    pub v_max: f64,
    /// Velocity-moment order; weighted norms accept `q <= 2m`.
    pub m: u32,
}

impl Grid {
    pub fn new(kmax: i64, neta: usize, eta_max: f64) -> Result<Self> {
        let g = Grid {
            d: 1,
            kmax,
            neta,
            eta_max,
            nx: (4 * kmax as usize + 4).max(16),
            nv: 256,
            v_max: 8.0,
            m: 3,
        };
        g.validate()?;
        Ok(g)
    }

    /// Grid with a prescribed spacing; `eta_max` is rounded up to a whole
    /// number of cells.
    pub fn with_spacing(kmax: i64, d_eta: f64, eta_max: f64) -> Result<Self> {
        if !(d_eta > 0.0) {
            return Err(Error::Config(format!("d_eta must be positive, got {d_eta}")));
        }
        let half = (eta_max / d_eta - 1e-9).ceil().max(1.0) as usize;
        Grid::new(kmax, 2 * half, half as f64 * d_eta)
    }

    pub fn validate(&self) -> Result<()> {
        if self.d != 1 {
            return Err(Error::Capability(format!(
                "only d = 1 is supported by the shipped solvers (got d = {})",
                self.d
            )));
        }
        if self.neta == 0 || self.neta % 2 != 0 {
            return Err(Error::Config(format!("neta must be even and positive, got {}", self.neta)));
        }
        if !(self.eta_max > 0.0) || !self.eta_max.is_finite() {
            return Err(Error::Config(format!("eta_max must be positive, got {}", self.eta_max)));
        }
        if self.kmax < 2 {
            return Err(Error::Config(format!("kmax must be at least 2, got {}", self.kmax)));
        }
        if self.nx == 0 || self.nv < 2 || !(self.v_max > 0.0) {
            return Err(Error::Config("physical grid needs nx >= 1, nv >= 2, v_max > 0".into()));
        }
        Ok(())
    }

    #[inline]
    pub fn d_eta(&self) -> f64 {
        2.0 * self.eta_max / self.neta as f64
    }

    /// Number of eta samples per mode.
    #[inline]
    pub fn n_eta_points(&self) -> usize {
        self.neta + 1
    }

    #[inline]
    pub fn n_modes(&self) -> usize {
        (2 * self.kmax + 1) as usize
    }

    #[inline]
    pub fn eta(&self, j: usize) -> f64 {
        (j as f64 - (self.neta / 2) as f64) * self.d_eta()
    }

    #[inline]
    pub fn zero_index(&self) -> usize {
        self.neta / 2
    }

    /// Fractional eta index of a frequency.
    #[inline]
    pub fn position(&self, eta: f64) -> f64 {
        eta / self.d_eta() + (self.neta / 2) as f64
    }

    #[inline]
    pub fn mode_index(&self, k: i64) -> usize {
        (k + self.kmax) as usize
    }

    pub fn modes(&self) -> impl Iterator<Item = i64> {
        -self.kmax..=self.kmax
    }

    pub fn x(&self, i: usize) -> f64 {
        2.0 * std::f64::consts::PI * i as f64 / self.nx as f64
    }

    pub fn v(&self, j: usize) -> f64 {
        -self.v_max + 2.0 * self.v_max * j as f64 / (self.nv - 1) as f64
    }

    pub fn d_v(&self) -> f64 {
        2.0 * self.v_max / (self.nv - 1) as f64
    }

    /// Largest step allowed by the back-map window rule.
    pub fn dt_max(&self, nu: f64) -> f64 {
        0.1 / (nu * self.eta_max * self.kmax as f64).max(1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eta_zero_is_on_grid() {
        let g = Grid::new(3, 64, 8.0).unwrap();
        assert_eq!(g.eta(g.zero_index()), 0.0);
        assert_eq!(g.eta(0), -8.0);
        assert_eq!(g.eta(64), 8.0);
        assert_eq!(g.position(0.0), 32.0);
    }

    #[test]
    fn invalid_grids_rejected() {
        assert!(Grid::new(1, 64, 8.0).is_err());
        assert!(Grid::new(2, 63, 8.0).is_err());
        assert!(Grid::new(2, 64, 0.0).is_err());
    }

    #[test]
    fn spacing_constructor_rounds_window() {
        let g = Grid::with_spacing(2, 0.1, 5.05).unwrap();
        assert!((g.d_eta() - 0.1).abs() < 1e-15);
        assert!(g.eta_max >= 5.05 - 1e-12);
    }
}
