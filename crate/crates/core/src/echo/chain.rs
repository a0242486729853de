//! Echo-chain products `prod_{k=k1}^{k2} psi(k)` and their regimes.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `psi(k) = (nu^a eta / k^3) e^{-nu^{1/3} eta / k}`.
pub fn psi(k: u64, nu: f64, a: f64, eta: f64) -> f64 {
    log_psi(k, nu, a, eta).exp()
}

pub fn log_psi(k: u64, nu: f64, a: f64, eta: f64) -> f64 {
    let kf = k as f64;
    a * nu.ln() + eta.ln() - 3.0 * kf.ln() - nu.cbrt() * eta / kf
}

/// Continuous maximiser `k* = nu^{1/3} eta / 3` of `psi`.
pub fn psi_argmax(nu: f64, eta: f64) -> f64 {
    nu.cbrt() * eta / 3.0
}

/// `psi(k*) = 27 e^{-3} nu^{a-1} eta^{-2}`.
pub fn psi_max(nu: f64, a: f64, eta: f64) -> f64 {
    27.0 * (-3.0f64).exp() * nu.powf(a - 1.0) / (eta * eta)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    I,
    Ii,
    Iii,
}

impl Regime {
    /// The boundaries are tested in order, so shared endpoints go to the
    /// lower-numbered regime.
    pub fn classify(nu: f64, a: f64, eta: f64) -> Regime {
        if eta <= 3.0 / nu.cbrt() {
            Regime::I
        } else if eta <= (3.0 / std::f64::consts::E).powf(1.5) * nu.powf(-(1.0 - a) / 2.0) {
            Regime::Ii
        } else {
            Regime::Iii
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Regime::I => "i",
            Regime::Ii => "ii",
            Regime::Iii => "iii",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EchoRegimeReport {
    pub nu: f64,
    pub a: f64,
    pub eta: f64,
    pub regime: Regime,
    pub k1: u64,
    pub k2: u64,
    pub log_sup: f64,
    /// Exponent `3 (nu^a eta)^{1/3} - 2 nu^{1/3} eta`.
    pub envelope1: f64,
    /// Exponent `3 eta^{(1-3a)/(3-3a)}`.
    pub envelope2: f64,
}

impl EchoRegimeReport {
    pub fn sup_product(&self) -> f64 {
        self.log_sup.exp()
    }
}

/// Smallest admissible search cap, covering both critical scales.
pub fn min_chain_cap(nu: f64, a: f64, eta: f64) -> u64 {
    (nu.powf(a) * eta).cbrt().ceil() as u64 + (nu.cbrt() * eta).ceil() as u64
}

fn check_args(nu: f64, a: f64, eta: f64) -> Result<()> {
    if !(nu > 0.0) || !(eta > 0.0) {
        return Err(Error::Argument(format!("need nu > 0 and eta > 0, got nu = {nu}, eta = {eta}")));
    }
    if !(a < 1.0 / 3.0) {
        return Err(Error::Argument(format!("size exponent a = {a} must be below 1/3")));
    }
    Ok(())
}

/// Supremum of `prod_{k=k1}^{k2} psi(k)` over `1 <= k1 <= k2 <= k_cap`,
/// found as the maximum-sum run of `log psi` in one pass.
pub fn max_chain_product(nu: f64, a: f64, eta: f64, k_cap: u64) -> Result<EchoRegimeReport> {
    check_args(nu, a, eta)?;
    let need = min_chain_cap(nu, a, eta).max(1);
    if k_cap < need {
        return Err(Error::Argument(format!("k_cap = {k_cap} is below the required {need}")));
    }
    let mut best = (f64::NEG_INFINITY, 1u64, 1u64);
    let mut run = (f64::NEG_INFINITY, 1u64);
    for k in 1..=k_cap {
        let l = log_psi(k, nu, a, eta);
        run = if run.0 > 0.0 { (run.0 + l, run.1) } else { (l, k) };
        if run.0 > best.0 {
            best = (run.0, run.1, k);
        }
    }
    if best.2 == k_cap {
        return Err(Error::Cap(format!(
            "maximising chain [{}, {}] reaches k_cap = {k_cap}",
            best.1, best.2
        )));
    }
    let (envelope1, envelope2) = growth_envelope(nu, a, eta)?;
    Ok(EchoRegimeReport {
        nu,
        a,
        eta,
        regime: Regime::classify(nu, a, eta),
        k1: best.1,
        k2: best.2,
        log_sup: best.0,
        envelope1,
        envelope2,
    })
}

/// [`max_chain_product`] at twice the minimal cap.
pub fn chain_report(nu: f64, a: f64, eta: f64) -> Result<EchoRegimeReport> {
    max_chain_product(nu, a, eta, 2 * min_chain_cap(nu, a, eta).max(1) + 2)
}

/// Exponents `(3 (nu^a eta)^{1/3} - 2 nu^{1/3} eta, 3 eta^{(1-3a)/(3-3a)})`
/// of the echo growth and its `nu`-free majorant.
pub fn growth_envelope(nu: f64, a: f64, eta: f64) -> Result<(f64, f64)> {
    check_args(nu, a, eta)?;
    let e1 = 3.0 * (nu.powf(a) * eta).cbrt() - 2.0 * nu.cbrt() * eta;
    let e2 = 3.0 * eta.powf((1.0 - 3.0 * a) / (3.0 - 3.0 * a));
    Ok((e1, e2))
}

/// Exponent of the admissible perturbation size `nu^{(1-3s)/(3-3s)}`; zero
/// for `s >= 1/3`.
pub fn threshold_exponent(s: f64) -> Result<f64> {
    if !(s > 0.0 && s <= 1.0) {
        return Err(Error::Argument(format!("Gevrey index s = {s} must lie in (0, 1]")));
    }
    if s >= 1.0 / 3.0 {
        return Ok(0.0);
    }
    Ok((1.0 - 3.0 * s) / (3.0 - 3.0 * s))
}

/// Shape of the upper bound on `log sup prod psi` in regimes (i) and (ii),
/// without the additive constant; zero in regime (iii).
pub fn regime_log_bound(nu: f64, a: f64, eta: f64) -> f64 {
    let x = nu.powf(a) * eta;
    match Regime::classify(nu, a, eta) {
        Regime::I => 3.0 * x.cbrt() - 0.5 * x.ln(),
        Regime::Ii => 0.5 * (nu.powf(1.0 - a) * eta * eta).ln() + 3.0 * x.cbrt() - 2.0 * nu.cbrt() * eta,
        Regime::Iii => 0.0,
    }
}

/// Largest excess `log_sup - regime_log_bound` over regime (i)/(ii) points.
pub fn calibrate_log_bound(points: &[(f64, f64, f64)]) -> Result<f64> {
    let excess: Vec<Result<Option<f64>>> = points
        .par_iter()
        .map(|&(nu, a, eta)| {
            if Regime::classify(nu, a, eta) == Regime::Iii {
                return Ok(None);
            }
            let r = chain_report(nu, a, eta)?;
            Ok(Some(r.log_sup - regime_log_bound(nu, a, eta)))
        })
        .collect();
    let mut c = f64::NEG_INFINITY;
    for e in excess {
        if let Some(v) = e? {
            c = c.max(v);
        }
    }
    if !c.is_finite() {
        return Err(Error::Argument("no calibration point lies in regime (i) or (ii)".into()));
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn continuous_maximum() {
        let (nu, a, eta) = (1e-4f64, 0.2, 500.0);
        let ks = psi_argmax(nu, eta);
        let v = nu.powf(a) * eta / ks.powi(3) * (-nu.cbrt() * eta / ks).exp();
        assert!((v - psi_max(nu, a, eta)).abs() < 1e-12 * v);
    }

    #[test]
    fn threshold_values() {
        assert_eq!(threshold_exponent(1.0 / 3.0).unwrap(), 0.0);
        assert!((threshold_exponent(0.2).unwrap() - 1.0 / 6.0).abs() < 1e-15);
        assert!((threshold_exponent(1e-9).unwrap() - 1.0 / 3.0).abs() < 1e-8);
        assert!(threshold_exponent(0.0).is_err());
        assert!(threshold_exponent(1.5).is_err());
    }

    #[test]
    fn single_term_and_cap_error() {
        // Regime (iii): the best chain is the single largest factor.
        let (nu, a, eta) = (1e-3, 0.1, 1e4);
        let r = chain_report(nu, a, eta).unwrap();
        assert_eq!(r.regime, Regime::Iii);
        assert_eq!(r.k1, r.k2);
        assert!(r.log_sup <= 0.0);
        assert!((r.log_sup - log_psi(r.k1, nu, a, eta)).abs() < 1e-14);
        assert!(max_chain_product(nu, a, eta, 1).is_err());
    }

    #[test]
    fn json_fields() {
        let r = chain_report(1e-6, 0.2, 50.0).unwrap();
        let v = serde_json::to_value(r).unwrap();
        for key in ["nu", "a", "eta", "regime", "k1", "k2", "log_sup", "envelope1", "envelope2"] {
            assert!(v.get(key).is_some(), "{key}");
        }
        assert_eq!(v["regime"], "i");
    }
}
