//! High-low interaction kernel `K_{k,l}(t,tau)` of the density estimate and
//! the `nu`-dependence of its time-integrated sums.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::chain::threshold_exponent;
use crate::constants::StabilityConstants;
use crate::error::{Error, Result};
use crate::fit::{fit_rate, FitModel};
use crate::gevrey::{gevrey_lambda, GevreyWeight};
use crate::linear_flow::{check_horizon, s_shorthand};
use crate::numeric::{bracket, bracket2, integrate_adaptive, phi_tilde};

/// `K_{k,l}(t,tau) = <phi~(tau)>/|l| <k-l, k phi~(t) - l phi~(tau)>^{-beta+3/2}
/// S^{1/2}(t-tau,k) e^{(lambda(phi~(t),r) - lambda(phi~(tau),r))/2}
/// e^{-delta1 nu^{1/3} t/2} e^{-nu t}` with `r = |(k, k phi~(t))|`.
pub fn kernel_kl(
    t: f64,
    tau: f64,
    k: i64,
    ell: i64,
    nu: f64,
    w: &GevreyWeight,
    c: &StabilityConstants,
) -> Result<f64> {
    if k == 0 || ell == 0 || ell == k {
        return Err(Error::Argument(format!("kernel needs k, l != 0 and l != k, got k = {k}, l = {ell}")));
    }
    if !(0.0 <= tau && tau <= t) {
        return Err(Error::Argument(format!("kernel needs 0 <= tau <= t, got tau = {tau}, t = {t}")));
    }
    check_horizon(t, nu)?;
    Ok(kernel_unchecked(t, tau, k, ell, nu, w, c))
}

fn kernel_unchecked(t: f64, tau: f64, k: i64, ell: i64, nu: f64, w: &GevreyWeight, c: &StabilityConstants) -> f64 {
    KernelAt::new(t, k, ell, nu, w, c).eval(tau)
}

/// The `tau`-independent factors of `K_{k,l}(t, .)`.
struct KernelAt<'a> {
    t: f64,
    k: i64,
    kf: f64,
    lf: f64,
    nu: f64,
    kpt: f64,
    w: &'a GevreyWeight,
    amp_rs: f64,
    r_sm1: f64,
    log_const: f64,
}

impl<'a> KernelAt<'a> {
    fn new(t: f64, k: i64, ell: i64, nu: f64, w: &'a GevreyWeight, c: &StabilityConstants) -> Self {
        let (kf, lf) = (k as f64, ell as f64);
        let pt = phi_tilde(t, nu);
        let r = kf.hypot(kf * pt);
        let rb = bracket(r);
        let lam_t = gevrey_lambda(pt, r, w);
        KernelAt {
            t,
            k,
            kf,
            lf,
            nu,
            kpt: kf * pt,
            w,
            amp_rs: (w.lambda1 - w.lambda_inf) / 8.0 * rb.powf(w.s),
            r_sm1: rb.powf(w.s - 1.0),
            log_const: 0.5 * (lam_t - w.lambda_inf) - 0.5 * c.delta1 * nu.cbrt() * t - nu * t - lf.abs().ln(),
        }
    }

    fn eval(&self, tau: f64) -> f64 {
        let ptau = phi_tilde(tau, self.nu);
        let lam_tau = self.amp_rs * ((1.0 + ptau).powf(-self.w.b) + (1.0 + ptau * self.r_sm1).powf(-self.w.b));
        let br = bracket2(self.kf - self.lf, self.kpt - self.lf * ptau).powf(1.5 - self.w.beta);
        bracket(ptau) * br * s_shorthand(self.t - tau, self.k, self.nu).sqrt() * (self.log_const - 0.5 * lam_tau).exp()
    }
}

/// `tau` at which `l phi~(tau) = k phi~(t)`, when it lies in `(0, t)`.
fn resonance(t: f64, k: i64, ell: i64, nu: f64) -> Option<f64> {
    let target = k as f64 * phi_tilde(t, nu) / ell as f64;
    if !(target > 0.0) || target >= phi_tilde(t, nu) {
        return None;
    }
    let tau = if nu * target < 1e-12 {
        target
    } else {
        -(-nu * target).ln_1p() / nu
    };
    (tau > 0.0 && tau < t).then_some(tau)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSumOptions {
    /// Largest `|k|` in the supremum.
    pub k_cap: i64,
    /// Largest `|l|` in the sum.
    pub l_cap: i64,
    /// `T_cap = t_cap_factor * nu^{-1/3}`.
    pub t_cap_factor: f64,
    /// Sampled times form the geometric sequence `t_min, t_min q, ...`
    /// up to `T_cap`, with `q = t_ratio`.
    pub t_min: f64,
    pub t_ratio: f64,
    pub rel_tol: f64,
    /// Largest relative change of `M` accepted when a cap is doubled.
    pub cap_tolerance: f64,
}

impl Default for KernelSumOptions {
    fn default() -> Self {
        KernelSumOptions {
            k_cap: 4,
            l_cap: 24,
            t_cap_factor: 5.0,
            t_min: 0.25,
            t_ratio: 1.1,
            rel_tol: 1e-6,
            cap_tolerance: 0.1,
        }
    }
}

/// `int_0^t sum_{l != 0,k; |l| <= l_cap} K_{k,l}(t,tau) d tau`.
pub fn kernel_sum_at(
    t: f64,
    k: i64,
    nu: f64,
    w: &GevreyWeight,
    c: &StabilityConstants,
    l_cap: i64,
    rel_tol: f64,
) -> Result<f64> {
    check_horizon(t, nu)?;
    if t <= 0.0 {
        return Ok(0.0);
    }
    let mut parts = Vec::new();
    for ell in -l_cap..=l_cap {
        if ell == 0 || ell == k {
            continue;
        }
        parts.push(kernel_integral(t, k, ell, nu, w, c, rel_tol));
    }
    Ok(crate::numeric::pairwise_sum(&parts))
}

/// `int_0^t K_{k,l}(t,tau) d tau`, split at the resonant time.
pub fn kernel_integral(t: f64, k: i64, ell: i64, nu: f64, w: &GevreyWeight, c: &StabilityConstants, rel_tol: f64) -> f64 {
    let kern = KernelAt::new(t, k, ell, nu, w, c);
    let f = |tau: f64| kern.eval(tau);
    let mut cuts = vec![0.0];
    if let Some(r) = resonance(t, k, ell, nu) {
        // The peak has width about 1/|l| in tau.
        let h = 1.0 / ell.abs() as f64;
        for x in [r - 4.0 * h, r, r + 4.0 * h] {
            if x > 0.0 && x < t {
                cuts.push(x);
            }
        }
    }
    cuts.push(t);
    cuts.windows(2)
        .map(|p| integrate_adaptive(f, p[0], p[1], 1e-300, rel_tol).0)
        .sum()
}

/// `int_0^t sum_{l_lo <= |l| <= l_hi} K_{k,l}`.
fn partial_sum(t: f64, k: i64, nu: f64, w: &GevreyWeight, c: &StabilityConstants, l_lo: i64, l_hi: i64, rel_tol: f64) -> f64 {
    let mut parts = Vec::new();
    for la in l_lo..=l_hi {
        for ell in [la, -la] {
            if ell != k {
                parts.push(kernel_integral(t, k, ell, nu, w, c, rel_tol));
            }
        }
    }
    crate::numeric::pairwise_sum(&parts)
}

/// Largest value over a set of `(k, t)` jobs with `l_lo <= |l| <= l_hi`.
fn table(
    jobs: &[(i64, f64)],
    nu: f64,
    w: &GevreyWeight,
    c: &StabilityConstants,
    l_lo: i64,
    l_hi: i64,
    rel_tol: f64,
) -> Vec<f64> {
    jobs.par_iter()
        .map(|&(k, t)| partial_sum(t, k, nu, w, c, l_lo, l_hi, rel_tol))
        .collect()
}

fn argmax(jobs: &[(i64, f64)], vals: &[f64]) -> (f64, i64, f64) {
    let mut best = (f64::NEG_INFINITY, 0, 0.0);
    for (&(k, t), &v) in jobs.iter().zip(vals) {
        if v > best.0 {
            best = (v, k, t);
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSupremum {
    pub nu: f64,
    /// `M(nu) = sup_{k,t} int_0^t sum_l K_{k,l}`.
    pub m: f64,
    pub argmax_k: i64,
    pub argmax_t: f64,
    /// Largest relative change of `M` when each cap is doubled in turn.
    pub cap_sensitivity: f64,
}

/// `M(nu)` with the three truncations each doubled once; a change above
/// `cap_tolerance` is a cap error.
pub fn kernel_supremum(nu: f64, w: &GevreyWeight, c: &StabilityConstants, o: &KernelSumOptions) -> Result<KernelSupremum> {
    if !(nu > 0.0) {
        return Err(Error::Argument(format!("kernel sums need nu > 0, got {nu}")));
    }
    w.validate()?;
    c.validate()?;
    if o.k_cap < 1 || o.l_cap < 1 || !(o.t_min > 0.0) || !(o.t_ratio > 1.0) {
        return Err(Error::Argument("kernel-sum caps must be positive and t_ratio > 1".into()));
    }
    let t_cap = o.t_cap_factor / nu.cbrt();
    check_horizon(2.0 * t_cap, nu)?;
    // The base times are a prefix of the doubled-range times, so each
    // doubled cap only adds new jobs.
    let mut ts = Vec::new();
    let mut tt = o.t_min.min(t_cap);
    while tt <= 2.0 * t_cap {
        ts.push(tt);
        tt *= o.t_ratio;
    }
    let n_base = ts.iter().filter(|&&x| x <= t_cap).count();
    let (ts_base, ts_ext) = ts.split_at(n_base);
    let jobs = |ks: std::ops::RangeInclusive<i64>, ts: &[f64]| -> Vec<(i64, f64)> {
        ks.flat_map(|k| ts.iter().map(move |&t| (k, t))).collect()
    };
    let base_jobs = jobs(1..=o.k_cap, ts_base);
    let base = table(&base_jobs, nu, w, c, 1, o.l_cap, o.rel_tol);
    let (m, k, t) = argmax(&base_jobs, &base);
    if !m.is_finite() || !(m > 0.0) {
        return Err(Error::Overflow {
            k,
            eta: t,
            exponent: m.ln(),
        });
    }
    let more_l = table(&base_jobs, nu, w, c, o.l_cap + 1, 2 * o.l_cap, o.rel_tol);
    let with_l: Vec<f64> = base.iter().zip(&more_l).map(|(a, b)| a + b).collect();
    let k_jobs = jobs(o.k_cap + 1..=2 * o.k_cap, ts_base);
    let with_k = table(&k_jobs, nu, w, c, 1, o.l_cap, o.rel_tol);
    let t_jobs = jobs(1..=o.k_cap, ts_ext);
    let with_t = table(&t_jobs, nu, w, c, 1, o.l_cap, o.rel_tol);
    let m_l = argmax(&base_jobs, &with_l).0;
    let m_k = m.max(argmax(&k_jobs, &with_k).0);
    let m_t = m.max(argmax(&t_jobs, &with_t).0);
    let sens = [m_l, m_k, m_t].iter().map(|v| (v - m).abs() / m).fold(0.0, f64::max);
    if sens > o.cap_tolerance {
        return Err(Error::Cap(format!(
            "kernel-sum supremum at nu = {nu} moves by {:.1}% when a cap is doubled",
            100.0 * sens
        )));
    }
    Ok(KernelSupremum {
        nu,
        m,
        argmax_k: k,
        argmax_t: t,
        cap_sensitivity: sens,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelScalingReport {
    pub s: f64,
    pub exponent: f64,
    pub sups: Vec<KernelSupremum>,
    /// Slope of `log M` against `log(1/nu)`.
    pub slope: f64,
    /// `max M / min M` over the list.
    pub spread: f64,
    /// `C` in `M(nu) <= C nu^{-exponent}`, fixed at the largest `nu` with a
    /// factor 1.5.
    pub constant: f64,
    pub bound_holds: bool,
}

pub fn kernel_sum_scaling(
    nu_list: &[f64],
    w: &GevreyWeight,
    c: &StabilityConstants,
    o: &KernelSumOptions,
) -> Result<KernelScalingReport> {
    if nu_list.len() < 2 {
        return Err(Error::Argument("scaling fit needs at least two viscosities".into()));
    }
    let exponent = threshold_exponent(w.s)?;
    let sups = nu_list
        .iter()
        .map(|&nu| kernel_supremum(nu, w, c, o))
        .collect::<Result<Vec<_>>>()?;
    // M = A (1/nu)^slope is a power law in x = 1/nu.
    let xs: Vec<f64> = sups.iter().map(|r| 1.0 / r.nu).collect();
    let ms: Vec<f64> = sups.iter().map(|r| r.m).collect();
    let fit = fit_rate(&xs, &ms, FitModel::Power, (0.0, f64::INFINITY))?;
    let slope = -fit.rate;
    let hi = ms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lo = ms.iter().cloned().fold(f64::INFINITY, f64::min);
    let top = sups.iter().max_by(|a, b| a.nu.total_cmp(&b.nu)).unwrap();
    let constant = 1.5 * top.m * top.nu.powf(exponent);
    let bound_holds = sups.iter().all(|r| r.m <= constant * r.nu.powf(-exponent));
    Ok(KernelScalingReport {
        s: w.s,
        exponent,
        sups,
        slope,
        spread: hi / lo,
        constant,
        bound_holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn weight() -> GevreyWeight {
        GevreyWeight::new(2.0, 1.0, 0.5, None, 3).unwrap()
    }

    #[test]
    fn equal_times_remove_the_lambda_difference() {
        let w = weight();
        let c = StabilityConstants::default();
        let (t, nu, k, ell) = (3.0, 1e-3, 1, 2);
        let v = kernel_kl(t, t, k, ell, nu, &w, &c).unwrap();
        let pt = phi_tilde(t, nu);
        let direct = bracket(pt) / 2.0 * bracket2(-1.0, -pt).powf(1.5 - w.beta)
            * (-0.5 * c.delta1 * nu.cbrt() * t - nu * t).exp();
        assert!((v - direct).abs() < 1e-15 * direct);
    }

    #[test]
    fn asymmetric_in_k_and_l() {
        let w = weight();
        let c = StabilityConstants::default();
        let a = kernel_kl(4.0, 2.0, 1, 2, 1e-3, &w, &c).unwrap();
        let b = kernel_kl(4.0, 2.0, 2, 1, 1e-3, &w, &c).unwrap();
        assert!((a - b).abs() > 1e-3 * a.max(b));
    }

    #[test]
    fn invalid_indices() {
        let w = weight();
        let c = StabilityConstants::default();
        assert!(kernel_kl(1.0, 0.5, 1, 1, 1e-3, &w, &c).is_err());
        assert!(kernel_kl(1.0, 0.5, 0, 1, 1e-3, &w, &c).is_err());
        assert!(kernel_kl(1.0, 2.0, 1, 2, 1e-3, &w, &c).is_err());
    }

    #[test]
    fn resonance_solves_the_phase_condition() {
        let (t, k, ell, nu) = (20.0, 2, 5, 1e-2);
        let tau = resonance(t, k, ell, nu).unwrap();
        assert!((ell as f64 * phi_tilde(tau, nu) - k as f64 * phi_tilde(t, nu)).abs() < 1e-12);
        assert!(resonance(t, 2, 1, nu).is_none());
        assert!(resonance(t, 2, -3, nu).is_none());
    }
}
