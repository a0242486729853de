//! Density equation `rho(t) = H(t) - \int_0^t rho(tau) K(t - tau) d tau`.

use num_complex::Complex64;

use super::kernel::KernelTable;
use super::resolvent::{convolve, uniform_step};
use crate::error::{Error, Result};

fn check_grid(t_grid: &[f64], h: &[Complex64], table: &KernelTable) -> Result<f64> {
    let dt = uniform_step(t_grid)?;
    if (dt - table.dt).abs() > 1e-12 * dt {
        return Err(Error::Argument(format!(
            "forcing grid step {dt} does not match kernel step {}",
            table.dt
        )));
    }
    if h.len() != t_grid.len() {
        return Err(Error::Argument(format!(
            "forcing has {} samples but the grid has {}",
            h.len(),
            t_grid.len()
        )));
    }
    if table.len() < t_grid.len() {
        return Err(Error::Argument(format!(
            "kernel table has {} samples, {} needed",
            table.len(),
            t_grid.len()
        )));
    }
    Ok(dt)
}

/// Trapezoidal product-integration march; second order in `dt`.
pub fn solve_volterra(t_grid: &[f64], h: &[Complex64], table: &KernelTable) -> Result<Vec<Complex64>> {
    let dt = check_grid(t_grid, h, table)?;
    let kv = &table.k_values;
    let n = t_grid.len();
    let mut rho = vec![Complex64::new(0.0, 0.0); n];
    rho[0] = h[0];
    let diag = 1.0 + 0.5 * dt * kv[0];
    for m in 1..n {
        let mut terms = Vec::with_capacity(m);
        terms.push(rho[0] * (0.5 * kv[m]));
        for j in 1..m {
            terms.push(rho[j] * kv[m - j]);
        }
        let s = crate::numeric::pairwise_sum_c(&terms);
        rho[m] = (h[m] - s * dt) / diag;
    }
    Ok(rho)
}

/// `rho = H - H * R` using the resolvent stored in the table.
pub fn solve_with_resolvent(t_grid: &[f64], h: &[Complex64], table: &KernelTable) -> Result<Vec<Complex64>> {
    let dt = check_grid(t_grid, h, table)?;
    let r = table
        .r_values
        .as_ref()
        .ok_or_else(|| Error::Argument("table carries no resolvent".into()))?;
    let rc: Vec<Complex64> = r[..h.len()].iter().map(|v| Complex64::new(*v, 0.0)).collect();
    let conv = convolve(h, &rc, dt);
    Ok(h.iter().zip(conv).map(|(a, b)| a - b).collect())
}

/// `max_t |rho(t) - H(t) + (rho*K)(t)|`, the discrete residual of the
/// density equation for an externally produced `rho`.
pub fn volterra_residual(t_grid: &[f64], rho: &[Complex64], h: &[Complex64], table: &KernelTable) -> Result<f64> {
    let dt = check_grid(t_grid, h, table)?;
    let kc: Vec<Complex64> = table.k_values[..h.len()]
        .iter()
        .map(|v| Complex64::new(*v, 0.0))
        .collect();
    let conv = convolve(rho, &kc, dt);
    Ok((0..h.len())
        .map(|i| (rho[i] - h[i] + conv[i]).norm())
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_kernel_returns_forcing() {
        let t: Vec<f64> = (0..11).map(|i| i as f64 * 0.1).collect();
        let h: Vec<Complex64> = t.iter().map(|t| Complex64::new(t.sin(), t.cos())).collect();
        let table = KernelTable::constant(0.0, 0.1, 11);
        assert_eq!(solve_volterra(&t, &h, &table).unwrap(), h);
    }

    #[test]
    fn mismatched_step_rejected() {
        let t: Vec<f64> = (0..11).map(|i| i as f64 * 0.1).collect();
        let h = vec![Complex64::new(1.0, 0.0); 11];
        let table = KernelTable::constant(1.0, 0.05, 11);
        assert!(matches!(solve_volterra(&t, &h, &table), Err(Error::Argument(_))));
    }
}
