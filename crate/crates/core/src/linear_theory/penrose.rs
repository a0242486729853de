//! Penrose margin `kappa = min |1 + K~(z,k)|` along `Re z = -lambda_bar |k|`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::laplace::{LaplaceEvaluator, PANEL_WIDTH};
use crate::error::{Error, Result};
use crate::numeric::logspace;

/// Scan grid: modes `k_min..=k_max` and, per mode, `Im z` in
/// `{0} U +-logspace(omega_lo |k|, omega_hi |k|, n_omega)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PenroseScan {
    pub k_min: i64,
    pub k_max: i64,
    pub n_omega: usize,
    pub omega_lo: f64,
    pub omega_hi: f64,
}

impl Default for PenroseScan {
    fn default() -> Self {
        PenroseScan {
            k_min: 1,
            k_max: crate::constants::K0,
            n_omega: 400,
            omega_lo: 1e-3,
            omega_hi: 1e3,
        }
    }
}

impl PenroseScan {
    pub fn refined(&self) -> Self {
        PenroseScan {
            n_omega: 2 * self.n_omega,
            ..*self
        }
    }

    fn omegas(&self, k: i64) -> Vec<f64> {
        let ka = k as f64;
        let mut w = vec![0.0];
        w.extend(logspace(self.omega_lo * ka, self.omega_hi * ka, self.n_omega));
        w
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PenroseReport {
    pub nu: f64,
    pub lambda_bar: f64,
    pub kappa_estimate: f64,
    /// Margin from the refined scan (twice as many frequencies).
    pub kappa_refined: f64,
    /// `|kappa_refined - kappa| / kappa`.
    pub refinement_change: f64,
    pub scan: PenroseScan,
    pub argmin_k: i64,
    pub argmin_re: f64,
    pub argmin_im: f64,
    /// `max |K~| k^2` over the scan; bounds `|K~|` for the dismissed modes.
    pub decay_constant: f64,
    /// `1 - decay_constant/(k_max+1)^2`, a lower bound for `|k| > k_max`.
    pub tail_bound: f64,
}

struct ScanResult {
    kappa: f64,
    k: i64,
    z: (f64, f64),
    decay_constant: f64,
}

fn scan_once(nu: f64, lambda_bar: f64, scan: &PenroseScan) -> Result<ScanResult> {
    let ks: Vec<i64> = (scan.k_min..=scan.k_max).collect();
    // K~ is even in k and conjugate-symmetric in Im z: the non-negative
    // half of the symmetric frequency grid carries the whole minimum.
    let per_k: Vec<Result<(f64, f64, f64)>> = ks
        .par_iter()
        .map(|&k| {
            let a = lambda_bar * k as f64;
            let ev = LaplaceEvaluator::new(k, nu, a, 0, PANEL_WIDTH)?;
            let mut best = (f64::INFINITY, 0.0);
            let mut c = 0.0f64;
            for w in scan.omegas(k) {
                let kt = ev.eval(w);
                let m = (kt + 1.0).norm();
                if m < best.0 {
                    best = (m, w);
                }
                c = c.max(kt.norm() * (k * k) as f64);
            }
            Ok((best.0, best.1, c))
        })
        .collect();
    let mut out = ScanResult {
        kappa: f64::INFINITY,
        k: 0,
        z: (0.0, 0.0),
        decay_constant: 0.0,
    };
    for (k, r) in ks.iter().zip(per_k) {
        let (m, w, c) = r?;
        if m < out.kappa {
            out.kappa = m;
            out.k = *k;
            out.z = (-lambda_bar * *k as f64, w);
        }
        out.decay_constant = out.decay_constant.max(c);
    }
    Ok(out)
}

/// Dense scan of `|1 + K~|` over the contour; fails when doubling the
/// frequency resolution moves the margin by more than 10%.
pub fn penrose_margin(nu: f64, lambda_bar: f64, scan: &PenroseScan) -> Result<PenroseReport> {
    if scan.k_min < 1 || scan.k_max < scan.k_min {
        return Err(Error::Argument(format!(
            "empty mode range {}..={} in Penrose scan",
            scan.k_min, scan.k_max
        )));
    }
    if scan.n_omega < 2 || !(scan.omega_lo > 0.0 && scan.omega_hi > scan.omega_lo) {
        return Err(Error::Argument("Penrose scan needs n_omega >= 2 and 0 < omega_lo < omega_hi".into()));
    }
    if lambda_bar < 0.0 || lambda_bar >= crate::constants::DELTA_PRIME {
        return Err(Error::Argument(format!(
            "lambda_bar = {lambda_bar} must lie in [0, delta') = [0, {})",
            crate::constants::DELTA_PRIME
        )));
    }
    let coarse = scan_once(nu, lambda_bar, scan)?;
    let fine = scan_once(nu, lambda_bar, &scan.refined())?;
    let change = (fine.kappa - coarse.kappa).abs() / coarse.kappa.max(1e-300);
    if change > 0.1 {
        return Err(Error::Resolution(format!(
            "Penrose margin moved by {:.1}% under refinement; increase n_omega",
            100.0 * change
        )));
    }
    let kk = (scan.k_max + 1) as f64;
    Ok(PenroseReport {
        nu,
        lambda_bar,
        kappa_estimate: coarse.kappa,
        kappa_refined: fine.kappa,
        refinement_change: change,
        scan: *scan,
        argmin_k: coarse.k,
        argmin_re: coarse.z.0,
        argmin_im: coarse.z.1,
        decay_constant: coarse.decay_constant.max(fine.decay_constant),
        tail_bound: 1.0 - coarse.decay_constant.max(fine.decay_constant) / (kk * kk),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_mode_range_is_an_argument_error() {
        let scan = PenroseScan {
            k_min: 3,
            k_max: 2,
            ..PenroseScan::default()
        };
        assert!(matches!(penrose_margin(0.0, 0.0, &scan), Err(Error::Argument(_))));
    }
}
