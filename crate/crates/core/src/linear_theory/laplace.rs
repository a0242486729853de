//! Laplace transform of the kernel, `K~(z,k) = \int_0^inf K(t,k) e^{-zt} dt`.

use num_complex::Complex64;

use super::filon::{integrate_real, FilonRule, PanelSamples};
use super::kernel::kernel_unchecked;
use crate::error::{Error, Result};

/// Panel width in units of `1/|k|`.
pub const PANEL_WIDTH: f64 = 0.25;
/// Relative size below which the integrand tail is dropped.
pub const TAIL_CUTOFF: f64 = 1e-18;
const MAX_PANELS: usize = 200_000;

/// Leftmost abscissa accepted for `Re z`. The integral converges for
/// `Re z > -k^2/nu` (and everywhere when `nu = 0`), but `e^{-zt}` amplifies
/// rounding like `e^{|Re z|^2/(2k^2)}`; the `-6|k|` floor keeps the loss of
/// digits below about `e^{18}`.
pub fn admissible_abscissa(k: i64, nu: f64) -> f64 {
    let ka = k.unsigned_abs() as f64;
    let floor = -6.0 * ka;
    if nu > 0.0 {
        floor.max(-0.9 * ka * ka / nu)
    } else {
        floor
    }
}

/// Samples of `t^p K(t) e^{a t}` on Filon panels, reusable for every `z`
/// on the line `Re z = -a`.
#[derive(Debug, Clone)]
pub struct LaplaceEvaluator {
    pub k: i64,
    pub nu: f64,
    pub a: f64,
    pub power: u32,
    rule: FilonRule,
    samples: PanelSamples<f64>,
}

impl LaplaceEvaluator {
    pub fn new(k: i64, nu: f64, a: f64, power: u32, width_factor: f64) -> Result<Self> {
        if k == 0 {
            return Err(Error::Argument("the kernel is undefined for the zero mode".into()));
        }
        let admissible = admissible_abscissa(k, nu);
        if -a <= admissible {
            return Err(Error::Convergence { re_z: -a, admissible });
        }
        let rule = FilonRule::default();
        let width = width_factor / k.unsigned_abs() as f64;
        let mut values: Vec<Vec<f64>> = Vec::new();
        let mut peak = 0.0f64;
        let mut peak_panel = 0usize;
        loop {
            let p = values.len();
            if p >= MAX_PANELS {
                return Err(Error::Convergence { re_z: -a, admissible });
            }
            let c = (p as f64 + 0.5) * width;
            let vals: Vec<f64> = rule
                .nodes
                .iter()
                .map(|x| {
                    let t = c + 0.5 * width * x;
                    t.powi(power as i32) * kernel_unchecked(t, k, nu) * (a * t).exp()
                })
                .collect();
            if vals.iter().any(|v| !v.is_finite()) {
                return Err(Error::Convergence { re_z: -a, admissible });
            }
            let m = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            values.push(vals);
            if m > peak {
                peak = m;
                peak_panel = p;
            }
            if p > peak_panel + 2 && m < TAIL_CUTOFF * peak {
                break;
            }
        }
        Ok(LaplaceEvaluator {
            k,
            nu,
            a,
            power,
            rule,
            samples: PanelSamples {
                origin: 0.0,
                width,
                values,
            },
        })
    }

    /// `\int t^p K(t) e^{-zt} dt` at `z = -a + i omega`.
    pub fn eval(&self, omega: f64) -> Complex64 {
        integrate_real(&self.rule, &self.samples, -omega)
    }

    pub fn z(&self, omega: f64) -> Complex64 {
        Complex64::new(-self.a, omega)
    }

    pub fn truncation_time(&self) -> f64 {
        self.samples.end()
    }
}

fn moment(z: Complex64, k: i64, nu: f64, power: u32) -> Result<Complex64> {
    let mut width = PANEL_WIDTH;
    let mut prev = LaplaceEvaluator::new(k, nu, -z.re, power, width)?.eval(z.im);
    for _ in 0..4 {
        width /= 2.0;
        let cur = LaplaceEvaluator::new(k, nu, -z.re, power, width)?.eval(z.im);
        if (cur - prev).norm() <= 1e-8 * cur.norm().max(1e-300) || (cur - prev).norm() < 1e-15 {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::Resolution(format!(
        "Laplace transform at z = {z} did not settle under panel refinement"
    )))
}

/// `K~(z, k)` with relative accuracy about 1e-8 (checked by panel halving).
pub fn laplace_k(z: Complex64, k: i64, nu: f64) -> Result<Complex64> {
    moment(z, k, nu, 0)
}

/// `d/dz K~(z, k) = -\int t K(t) e^{-zt} dt`.
pub fn laplace_k_derivative(z: Complex64, k: i64, nu: f64) -> Result<Complex64> {
    Ok(-moment(z, k, nu, 1)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::C0;

    #[test]
    fn real_axis_value_at_origin() {
        // K~(0,k) = c0/k^2 in the collisionless case.
        for k in 1..=3 {
            let v = laplace_k(Complex64::new(0.0, 0.0), k, 0.0).unwrap();
            assert!((v.re - C0 / (k * k) as f64).abs() < 1e-13);
            assert!(v.im.abs() < 1e-15);
        }
    }

    #[test]
    fn too_negative_abscissa_is_rejected() {
        match laplace_k(Complex64::new(-7.0, 0.0), 1, 0.0) {
            Err(Error::Convergence { admissible, .. }) => assert_eq!(admissible, -6.0),
            other => panic!("expected convergence error, got {other:?}"),
        }
        assert!(laplace_k(Complex64::new(0.0, 0.0), 0, 0.0).is_err());
    }

    #[test]
    fn conjugate_symmetry() {
        let z = Complex64::new(-0.3, 1.7);
        let a = laplace_k(z, 2, 1e-3).unwrap();
        let b = laplace_k(z.conj(), 2, 1e-3).unwrap();
        assert!((a - b.conj()).norm() < 1e-14);
    }
}
