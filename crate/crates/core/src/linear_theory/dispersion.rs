//! Zeros of `D(z) = 1 + K~(z,k)`: argument-principle count on a rectangle,
//! seeded Newton iteration, and a recount on a perturbed rectangle.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::laplace::{LaplaceEvaluator, PANEL_WIDTH};
use crate::error::{Error, Result};

/// Search rectangle `[-z_cut |k|, x_hi] x [-y |k|, y |k|]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RootSearch {
    pub z_cut: f64,
    pub y: f64,
    pub x_hi: f64,
    pub residual_tol: f64,
}

impl Default for RootSearch {
    fn default() -> Self {
        RootSearch {
            z_cut: 3.0,
            y: 4.0,
            x_hi: 1.0,
            residual_tol: 1e-10,
        }
    }
}

struct Dispersion {
    k: i64,
    nu: f64,
}

impl Dispersion {
    fn eval(&self, z: Complex64) -> Result<Complex64> {
        let ev = LaplaceEvaluator::new(self.k, self.nu, -z.re, 0, PANEL_WIDTH / 2.0)?;
        Ok(ev.eval(z.im) + 1.0)
    }

    fn eval_with_derivative(&self, z: Complex64) -> Result<(Complex64, Complex64)> {
        let d = self.eval(z)?;
        let ev = LaplaceEvaluator::new(self.k, self.nu, -z.re, 1, PANEL_WIDTH / 2.0)?;
        Ok((d, -ev.eval(z.im)))
    }

    /// Samples of `D` along a vertical segment, sharing one evaluator.
    fn vertical(&self, x: f64, ys: &[f64]) -> Result<Vec<Complex64>> {
        let ev = LaplaceEvaluator::new(self.k, self.nu, -x, 0, PANEL_WIDTH / 2.0)?;
        Ok(ys.iter().map(|&y| ev.eval(y) + 1.0).collect())
    }
}

fn winding_segment(d: &Dispersion, a: Complex64, b: Complex64, da: Complex64, db: Complex64, depth: u32) -> Result<f64> {
    let step = (db / da).arg();
    if step.abs() < PI / 4.0 || depth > 14 {
        if step.abs() >= PI / 4.0 {
            return Err(Error::Resolution(format!(
                "argument of 1 + K~ jumps near z = {a}; a root sits on the contour"
            )));
        }
        return Ok(step);
    }
    let m = (a + b) * 0.5;
    let dm = d.eval(m)?;
    Ok(winding_segment(d, a, m, da, dm, depth + 1)? + winding_segment(d, m, b, dm, db, depth + 1)?)
}

/// Number of zeros inside `[x_lo, x_hi] x [-y, y]`.
fn count_zeros(d: &Dispersion, x_lo: f64, x_hi: f64, y: f64) -> Result<i64> {
    let n = 240;
    let ys: Vec<f64> = (0..=n).map(|i| -y + 2.0 * y * i as f64 / n as f64).collect();
    let xs: Vec<f64> = (0..=n).map(|i| x_lo + (x_hi - x_lo) * i as f64 / n as f64).collect();
    // Counter-clockwise: bottom edge, right edge, top edge, left edge.
    let mut path: Vec<Complex64> = Vec::new();
    let mut vals: Vec<Complex64> = Vec::new();
    let bottom: Vec<Complex64> = xs.iter().map(|&x| Complex64::new(x, -y)).collect();
    let bottom_vals: Vec<Result<Complex64>> = bottom.par_iter().map(|z| d.eval(*z)).collect();
    path.extend(&bottom);
    for v in bottom_vals {
        vals.push(v?);
    }
    let right_vals = d.vertical(x_hi, &ys)?;
    path.extend(ys.iter().skip(1).map(|&yy| Complex64::new(x_hi, yy)));
    vals.extend(right_vals.into_iter().skip(1));
    let top: Vec<Complex64> = xs.iter().rev().skip(1).map(|&x| Complex64::new(x, y)).collect();
    let top_vals: Vec<Result<Complex64>> = top.par_iter().map(|z| d.eval(*z)).collect();
    path.extend(&top);
    for v in top_vals {
        vals.push(v?);
    }
    let left_ys: Vec<f64> = ys.iter().rev().skip(1).copied().collect();
    let left_vals = d.vertical(x_lo, &left_ys)?;
    path.extend(left_ys.iter().map(|&yy| Complex64::new(x_lo, yy)));
    vals.extend(left_vals);

    let mut total = 0.0;
    for i in 0..path.len() - 1 {
        total += winding_segment(d, path[i], path[i + 1], vals[i], vals[i + 1], 0)?;
    }
    let turns = total / (2.0 * PI);
    let rounded = turns.round();
    if (turns - rounded).abs() > 0.05 {
        return Err(Error::Resolution(format!("winding number {turns} is not close to an integer")));
    }
    Ok(rounded as i64)
}

fn newton(d: &Dispersion, mut z: Complex64, bounds: (f64, f64, f64)) -> Option<Complex64> {
    let (x_lo, x_hi, y) = bounds;
    for _ in 0..60 {
        let (f, fp) = d.eval_with_derivative(z).ok()?;
        if fp.norm() == 0.0 {
            return None;
        }
        let step = f / fp;
        // Damp large steps so seeds do not jump across the rectangle.
        let limit = 0.5 * (x_hi - x_lo).min(y);
        let step = if step.norm() > limit { step * (limit / step.norm()) } else { step };
        z -= step;
        if z.re < x_lo - 0.5 * (x_hi - x_lo) || z.re > x_hi + 1.0 || z.im.abs() > 1.5 * y {
            return None;
        }
        if step.norm() < 1e-13 * z.norm().max(1.0) {
            return Some(z);
        }
    }
    None
}

/// All zeros of `1 + K~(z,k)` with `Re z > -z_cut |k|` and `|Im z| < y |k|`,
/// sorted with the least-damped first. Every reported zero has residual
/// below `residual_tol`; the count must agree with the argument principle
/// on the rectangle and on a rectangle enlarged by 2%.
pub fn dispersion_roots(k: i64, nu: f64, search: &RootSearch) -> Result<Vec<Complex64>> {
    if k == 0 {
        return Err(Error::Argument("dispersion relation needs k != 0".into()));
    }
    let ka = k.unsigned_abs() as f64;
    let d = Dispersion { k, nu };
    let x_lo = -search.z_cut * ka;
    let x_hi = search.x_hi;
    let y = search.y * ka;
    let count = count_zeros(&d, x_lo, x_hi, y)?;
    let count_perturbed = count_zeros(&d, x_lo * 1.02, x_hi * 1.02, y * 1.02)?;
    if count != count_perturbed {
        return Err(Error::Resolution(format!(
            "root count changed from {count} to {count_perturbed} under a 2% enlargement of the search rectangle"
        )));
    }
    let mut roots: Vec<Complex64> = Vec::new();
    for density in [8usize, 16, 32] {
        // Seeds in the closed upper half; conjugates are added afterwards.
        let seeds: Vec<Complex64> = (0..density)
            .flat_map(|i| {
                (0..density).map(move |j| {
                    Complex64::new(
                        x_lo + (x_hi - x_lo) * (i as f64 + 0.5) / density as f64,
                        y * (j as f64 + 0.5) / density as f64,
                    )
                })
            })
            .collect();
        let found: Vec<Option<Complex64>> = seeds.par_iter().map(|s| newton(&d, *s, (x_lo, x_hi, y))).collect();
        for z in found.into_iter().flatten() {
            let z = if z.im.abs() < 1e-12 { Complex64::new(z.re, 0.0) } else { z };
            let inside = z.re > x_lo && z.re < x_hi && z.im.abs() < y;
            if !inside {
                continue;
            }
            let z = if z.im < 0.0 { z.conj() } else { z };
            if roots.iter().all(|r| (r - z).norm() > 1e-7 * z.norm().max(1.0)) {
                roots.push(z);
            }
        }
        let total: i64 = roots.iter().map(|r| if r.im == 0.0 { 1 } else { 2 }).sum();
        if total >= count {
            break;
        }
    }
    let mut all: Vec<Complex64> = Vec::new();
    for r in &roots {
        all.push(*r);
        if r.im != 0.0 {
            all.push(r.conj());
        }
    }
    if all.len() as i64 != count {
        return Err(Error::Resolution(format!(
            "argument principle counts {count} zeros but Newton found {}",
            all.len()
        )));
    }
    for r in &all {
        let res = d.eval(*r)?.norm();
        if res > search.residual_tol {
            return Err(Error::Resolution(format!("root {r} has residual {res}")));
        }
    }
    all.sort_by(|a, b| b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im)));
    Ok(all)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_mode_rejected() {
        assert!(dispersion_roots(0, 0.0, &RootSearch::default()).is_err());
    }
}
