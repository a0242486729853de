use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid;

/// `h_hat(t, k, eta)` on a truncated grid, stored mode-major: row `k` holds
/// the `neta + 1` frequency samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralState {
    pub grid: Grid,
    pub time: f64,
    pub nu: f64,
    pub values: Vec<Complex64>,
}

/// Size of the violations removed by [`SpectralState::project`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ProjectionDefects {
    pub reality: f64,
    pub mass: f64,
}

impl SpectralState {
    pub fn zeros(grid: Grid, nu: f64) -> Self {
        let n = grid.n_modes() * grid.n_eta_points();
        SpectralState {
            grid,
            time: 0.0,
            nu,
            values: vec![Complex64::new(0.0, 0.0); n],
        }
    }

    /// Fill every `(k, eta)` from a closure.
    pub fn from_fn<F: Fn(i64, f64) -> Complex64>(grid: Grid, nu: f64, f: F) -> Self {
        let mut s = SpectralState::zeros(grid, nu);
        let g = s.grid.clone();
        for k in g.modes() {
            let row = s.row_mut(k);
            for (j, v) in row.iter_mut().enumerate() {
                *v = f(k, g.eta(j));
            }
        }
        s
    }

    #[inline]
    fn offset(&self, k: i64) -> usize {
        self.grid.mode_index(k) * self.grid.n_eta_points()
    }

    pub fn row(&self, k: i64) -> &[Complex64] {
        let o = self.offset(k);
        &self.values[o..o + self.grid.n_eta_points()]
    }

    pub fn row_mut(&mut self, k: i64) -> &mut [Complex64] {
        let o = self.offset(k);
        let n = self.grid.n_eta_points();
        &mut self.values[o..o + n]
    }

    pub fn rows(&self) -> impl Iterator<Item = (i64, &[Complex64])> {
        let n = self.grid.n_eta_points();
        let kmax = self.grid.kmax;
        self.values
            .chunks(n)
            .enumerate()
            .map(move |(i, r)| (i as i64 - kmax, r))
    }

    #[inline]
    pub fn get(&self, k: i64, j: usize) -> Complex64 {
        self.values[self.offset(k) + j]
    }

    #[inline]
    pub fn set(&mut self, k: i64, j: usize, v: Complex64) {
        let o = self.offset(k);
        self.values[o + j] = v;
    }

    pub fn in_range(&self, k: i64) -> bool {
        k.abs() <= self.grid.kmax
    }

    /// `h_hat(t, 0, 0)`.
    pub fn mass(&self) -> Complex64 {
        self.get(0, self.grid.zero_index())
    }

    /// Largest `|h(-k,-eta) - conj h(k,eta)|` over the grid.
    pub fn reality_defect(&self) -> f64 {
        let n = self.grid.neta;
        let mut worst = 0.0f64;
        for k in 0..=self.grid.kmax {
            for j in 0..=n {
                let a = self.get(k, j);
                let b = self.get(-k, n - j);
                worst = worst.max((a - b.conj()).norm());
            }
        }
        worst
    }

    /// Restore the reality symmetry and the zero-mass condition; returns the
    /// defects that were present beforehand.
    pub fn project(&mut self) -> ProjectionDefects {
        let reality = self.reality_defect();
        let n = self.grid.neta;
        for k in 0..=self.grid.kmax {
            for j in 0..=n {
                if k == 0 && j > n / 2 {
                    break;
                }
                let a = self.get(k, j);
                let b = self.get(-k, n - j);
                let avg = (a + b.conj()) * 0.5;
                self.set(k, j, avg);
                self.set(-k, n - j, avg.conj());
            }
        }
        let z = self.grid.zero_index();
        let mass = self.get(0, z).norm();
        self.set(0, z, Complex64::new(0.0, 0.0));
        ProjectionDefects { reality, mass }
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }

    /// First mode holding a non-finite value.
    pub fn first_non_finite_mode(&self) -> Option<i64> {
        self.rows()
            .find(|(_, r)| r.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()))
            .map(|(k, _)| k)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    /// `sum |h_hat(k, .)|^2 d_eta` for one mode, i.e. `||h_hat(k,.)||^2_{L^2_eta}`.
    pub fn mode_norm_sq(&self, k: i64) -> f64 {
        let de = self.grid.d_eta();
        let parts: Vec<f64> = self.row(k).iter().map(|v| v.norm_sqr()).collect();
        crate::numeric::pairwise_sum(&parts) * de
    }

    /// Largest relative magnitude in the outermost `width` samples of any
    /// row, compared with the largest magnitude overall.
    pub fn boundary_residual(&self, width: usize) -> f64 {
        let peak = self.max_abs();
        if peak == 0.0 {
            return 0.0;
        }
        let n = self.grid.n_eta_points();
        let w = width.min(n);
        let mut edge = 0.0f64;
        for (_, r) in self.rows() {
            for v in r[..w].iter().chain(r[n - w..].iter()) {
                edge = edge.max(v.norm());
            }
        }
        edge / peak
    }

    pub fn check_same_grid(&self, other: &SpectralState) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::Config("states live on different grids".into()));
        }
        Ok(())
    }

    /// `self + c * other` on a shared grid.
    pub fn axpy(&mut self, c: f64, other: &SpectralState) {
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += *b * c;
        }
    }
}
