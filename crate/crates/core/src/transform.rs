//! Transforms between a physical `(x, v)` sample array and the spectral
//! state, with `f_hat(k,eta) = (2 pi)^{-1} \iint f e^{-ikx - i eta v} dx dv`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::state::SpectralState;

/// Real samples `h(x_i, v_j)`, `x_i = 2 pi i / nx`, `v_j` uniform on
/// `[-v_max, v_max]` including both ends. Stored x-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhysField {
    pub nx: usize,
    pub nv: usize,
    pub v_max: f64,
    pub data: Vec<f64>,
}

impl PhysField {
    pub fn zeros(nx: usize, nv: usize, v_max: f64) -> Self {
        PhysField {
            nx,
            nv,
            v_max,
            data: vec![0.0; nx * nv],
        }
    }

    pub fn from_fn<F: Fn(f64, f64) -> f64>(grid: &Grid, f: F) -> Self {
        let mut p = PhysField::zeros(grid.nx, grid.nv, grid.v_max);
        for i in 0..grid.nx {
            for j in 0..grid.nv {
                p.data[i * grid.nv + j] = f(grid.x(i), grid.v(j));
            }
        }
        p
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.nv + j]
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    fn matches(&self, grid: &Grid) -> bool {
        self.nx == grid.nx
            && self.nv == grid.nv
            && self.v_max == grid.v_max
            && self.data.len() == self.nx * self.nv
    }
}

/// Mass found at the edge of the velocity window, relative to the peak.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationWarning {
    pub boundary_residual: f64,
}

/// Relative edge magnitude above which a warning is attached.
pub const BOUNDARY_TOLERANCE: f64 = 1e-10;

/// `exp(i (start + n*step))` for `n = 0..len`, resynchronised periodically so
/// the recurrence error stays at rounding level.
pub(crate) fn phases(start: f64, step: f64, len: usize) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(len);
    let rot = Complex64::from_polar(1.0, step);
    let mut cur = Complex64::from_polar(1.0, start);
    for n in 0..len {
        if n % 64 == 0 {
            cur = Complex64::from_polar(1.0, start + n as f64 * step);
        }
        out.push(cur);
        cur *= rot;
    }
    out
}

/// Trapezoid weights for `n` uniform samples with spacing `h`.
pub(crate) fn trapezoid_weights(n: usize, h: f64) -> Vec<f64> {
    let mut w = vec![h; n];
    if n > 1 {
        w[0] *= 0.5;
        w[n - 1] *= 0.5;
    }
    w
}

/// `h_k(v) = (2 pi)^{-1} \int h_hat(k, eta) e^{i eta v} d eta` at each `v`.
pub fn eta_to_v(row: &[Complex64], grid: &Grid, vs: &[f64]) -> Vec<Complex64> {
    let de = grid.d_eta();
    let w = trapezoid_weights(row.len(), de);
    vs.iter()
        .map(|&v| {
            let ph = phases(-grid.eta_max * v, de * v, row.len());
            let terms: Vec<Complex64> = row
                .iter()
                .zip(&ph)
                .zip(&w)
                .map(|((a, p), w)| a * p * *w)
                .collect();
            crate::numeric::pairwise_sum_c(&terms) / (2.0 * PI)
        })
        .collect()
}

/// `\int g(v) e^{-i eta v} dv` at each eta of the grid, trapezoid in `v`.
pub fn v_to_eta(samples: &[Complex64], vs: &[f64], grid: &Grid) -> Vec<Complex64> {
    let dv = if vs.len() > 1 { vs[1] - vs[0] } else { 1.0 };
    let w = trapezoid_weights(vs.len(), dv);
    let v0 = vs[0];
    let n = grid.n_eta_points();
    (0..n)
        .map(|j| {
            let eta = grid.eta(j);
            let ph = phases(-eta * v0, -eta * dv, vs.len());
            let terms: Vec<Complex64> = samples
                .iter()
                .zip(&ph)
                .zip(&w)
                .map(|((a, p), w)| a * p * *w)
                .collect();
            crate::numeric::pairwise_sum_c(&terms)
        })
        .collect()
}

/// Spectral state of a physical field. A warning carries the boundary
/// residual when the field is not negligible at `|v| = v_max`.
pub fn forward_transform(
    h: &PhysField,
    grid: &Grid,
) -> Result<(SpectralState, Option<TruncationWarning>)> {
    grid.validate()?;
    if !h.matches(grid) {
        return Err(Error::Config(format!(
            "physical field ({} x {}, v_max {}) does not match grid ({} x {}, v_max {})",
            h.nx, h.nv, h.v_max, grid.nx, grid.nv, grid.v_max
        )));
    }
    let nx = grid.nx;
    let nv = grid.nv;
    let vs: Vec<f64> = (0..nv).map(|j| grid.v(j)).collect();
    let modes: Vec<i64> = grid.modes().collect();
    let rows: Vec<Vec<Complex64>> = modes
        .par_iter()
        .map(|&k| {
            // (2 pi)^{-1} \int dx  ->  (1/nx) sum_i
            let ph = phases(0.0, -(k as f64) * 2.0 * PI / nx as f64, nx);
            let fk: Vec<Complex64> = (0..nv)
                .map(|j| {
                    let terms: Vec<Complex64> = (0..nx).map(|i| ph[i] * h.at(i, j)).collect();
                    crate::numeric::pairwise_sum_c(&terms) / nx as f64
                })
                .collect();
            v_to_eta(&fk, &vs, grid)
        })
        .collect();
    let mut state = SpectralState::zeros(grid.clone(), 0.0);
    for (k, r) in modes.iter().zip(rows) {
        state.row_mut(*k).copy_from_slice(&r);
    }
    let peak = h.max_abs();
    let mut edge = 0.0f64;
    for i in 0..nx {
        edge = edge.max(h.at(i, 0).abs()).max(h.at(i, nv - 1).abs());
    }
    let residual = if peak > 0.0 { edge / peak } else { 0.0 };
    let warning = (residual > BOUNDARY_TOLERANCE).then_some(TruncationWarning {
        boundary_residual: residual,
    });
    Ok((state, warning))
}

/// Physical samples of a spectral state on its grid's `(x, v)` lattice.
pub fn inverse_transform(state: &SpectralState) -> PhysField {
    let grid = &state.grid;
    let vs: Vec<f64> = (0..grid.nv).map(|j| grid.v(j)).collect();
    let modes: Vec<i64> = grid.modes().collect();
    let hk: Vec<Vec<Complex64>> = modes
        .par_iter()
        .map(|&k| eta_to_v(state.row(k), grid, &vs))
        .collect();
    let mut out = PhysField::zeros(grid.nx, grid.nv, grid.v_max);
    for i in 0..grid.nx {
        let x = grid.x(i);
        for j in 0..grid.nv {
            let terms: Vec<Complex64> = modes
                .iter()
                .zip(&hk)
                .map(|(&k, row)| row[j] * Complex64::from_polar(1.0, k as f64 * x))
                .collect();
            out.data[i * grid.nv + j] = crate::numeric::pairwise_sum_c(&terms).re;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Grid {
        let mut g = Grid::new(3, 400, 20.0).unwrap();
        g.nx = 16;
        g.nv = 161;
        g.v_max = 10.0;
        g
    }

    #[test]
    fn zero_field_maps_to_zero_state() {
        let g = grid();
        let (s, w) = forward_transform(&PhysField::zeros(g.nx, g.nv, g.v_max), &g).unwrap();
        assert!(w.is_none());
        assert_eq!(s.max_abs(), 0.0);
    }

    #[test]
    fn single_harmonic_stays_single() {
        let g = grid();
        let h = PhysField::from_fn(&g, |x, v| x.cos() * (-v * v / 2.0).exp());
        let (s, _) = forward_transform(&h, &g).unwrap();
        for (k, r) in s.rows() {
            let m = r.iter().fold(0.0f64, |a, v| a.max(v.norm()));
            if k.abs() == 1 {
                assert!(m > 0.1);
            } else {
                assert!(m < 1e-14, "mode {k} has {m}");
            }
        }
    }

    #[test]
    fn mismatched_field_rejected() {
        let g = grid();
        let h = PhysField::zeros(g.nx + 1, g.nv, g.v_max);
        assert!(matches!(forward_transform(&h, &g), Err(Error::Config(_))));
    }

    #[test]
    fn wide_field_warns() {
        let g = grid();
        let h = PhysField::from_fn(&g, |_, v| (-v * v / 50.0).exp());
        let (_, w) = forward_transform(&h, &g).unwrap();
        assert!(w.unwrap().boundary_residual > 1e-3);
    }
}
