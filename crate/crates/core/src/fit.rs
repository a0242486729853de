//! Log-linear least-squares fits of decay laws.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum FitModel {
    /// `y = A e^{-rate t}`
    Exponential,
    /// `y = A t^{-rate}`
    Power,
    /// `y = A e^{-rate t^p}`
    Stretched { p: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub model: FitModel,
    pub rate: f64,
    pub prefactor: f64,
    /// Standard errors from the linearised normal equations; `rate_se` is
    /// that of the slope, `prefactor_se` that of `A` (first order in `ln A`).
    pub rate_se: f64,
    pub prefactor_se: f64,
    pub window: (f64, f64),
    /// Euclidean norm of the log residuals.
    pub residual_norm: f64,
    /// Coefficient of determination of the log-linear fit.
    pub r_squared: f64,
    pub n_points: usize,
}

/// Fits `values` against `times` on `[window.0, window.1]` by least squares
/// on the logarithm. A non-positive value (or, for the power law, a
/// non-positive time) inside the window and fewer than two points are
/// window errors; a constant abscissa is a degenerate fit.
pub fn fit_rate(times: &[f64], values: &[f64], model: FitModel, window: (f64, f64)) -> Result<FitResult> {
    if times.len() != values.len() {
        return Err(Error::Argument(format!(
            "{} times but {} values",
            times.len(),
            values.len()
        )));
    }
    if !(window.1 > window.0) {
        return Err(Error::Window(format!("empty window [{}, {}]", window.0, window.1)));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (&t, &v) in times.iter().zip(values) {
        if t < window.0 || t > window.1 {
            continue;
        }
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::Window(format!("value {v} at t = {t} is not positive")));
        }
        let x = match model {
            FitModel::Exponential => t,
            FitModel::Power => {
                if t <= 0.0 {
                    return Err(Error::Window(format!("power-law fit needs t > 0, window contains {t}")));
                }
                t.ln()
            }
            FitModel::Stretched { p } => t.powf(p),
        };
        xs.push(x);
        ys.push(v.ln());
    }
    if xs.len() < 2 {
        return Err(Error::Window(format!(
            "{} usable points in [{}, {}]",
            xs.len(),
            window.0,
            window.1
        )));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if !(sxx > 1e-300 * n) || !(sxx > 1e-14 * xs.iter().map(|x| x * x).sum::<f64>()) {
        return Err(Error::DegenerateFit("abscissae are (numerically) constant".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let (rate_se, intercept_se) = if xs.len() > 2 {
        let s2 = rss / (n - 2.0);
        ((s2 / sxx).sqrt(), (s2 * (1.0 / n + mx * mx / sxx)).sqrt())
    } else {
        (f64::NAN, f64::NAN)
    };
    let r_squared = if syy > 0.0 { (sxy * sxy) / (sxx * syy) } else { 1.0 };
    let prefactor = intercept.exp();
    Ok(FitResult {
        model,
        rate: -slope,
        prefactor,
        rate_se,
        prefactor_se: prefactor * intercept_se,
        window,
        residual_norm: rss.sqrt(),
        r_squared,
        n_points: xs.len(),
    })
}

/// Interior local maxima `(t, y)` of a sampled signal, refined by a
/// parabola through the three neighbouring samples.
pub fn local_maxima(times: &[f64], values: &[f64]) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for i in 1..values.len().saturating_sub(1) {
        let (a, b, c) = (values[i - 1], values[i], values[i + 1]);
        if b > a && b >= c {
            let den = a - 2.0 * b + c;
            let shift = if den != 0.0 { 0.5 * (a - c) / den } else { 0.0 };
            let h = times[i + 1] - times[i];
            out.push((times[i] + shift * h, b - 0.25 * (a - c) * shift));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_exact_laws() {
        let t: Vec<f64> = (1..50).map(|i| i as f64 * 0.2).collect();
        let e: Vec<f64> = t.iter().map(|t| 3.0 * (-0.7 * t).exp()).collect();
        let f = fit_rate(&t, &e, FitModel::Exponential, (0.0, 100.0)).unwrap();
        assert!((f.rate - 0.7).abs() < 1e-12 && (f.prefactor - 3.0).abs() < 1e-10);
        assert!(f.residual_norm < 1e-12 && f.rate_se < 1e-12 && f.window == (0.0, 100.0));
        let p: Vec<f64> = t.iter().map(|t| 2.0 * t.powf(-1.5)).collect();
        let f = fit_rate(&t, &p, FitModel::Power, (0.0, 100.0)).unwrap();
        assert!((f.rate - 1.5).abs() < 1e-12);
        let s: Vec<f64> = t.iter().map(|t| (-0.4 * t.powi(3)).exp()).collect();
        let f = fit_rate(&t, &s, FitModel::Stretched { p: 3.0 }, (0.0, 100.0)).unwrap();
        assert!((f.rate - 0.4).abs() < 1e-10);
        let c: Vec<f64> = t.iter().map(|t| (-t.powi(3) / 3.0).exp()).collect();
        let f = fit_rate(&t, &c, FitModel::Stretched { p: 3.0 }, (0.0, 3.0)).unwrap();
        assert!((f.rate - 1.0 / 3.0).abs() < 1e-10);
    }

    #[test]
    fn bad_windows() {
        let t = [1.0, 2.0, 3.0];
        let y = [1.0, 0.5, 0.25];
        assert!(matches!(fit_rate(&t, &y, FitModel::Exponential, (5.0, 6.0)), Err(Error::Window(_))));
        assert!(matches!(fit_rate(&t, &y, FitModel::Exponential, (2.0, 1.0)), Err(Error::Window(_))));
        assert!(matches!(
            fit_rate(&t, &[1.0, 0.0, 0.25], FitModel::Exponential, (0.0, 4.0)),
            Err(Error::Window(_))
        ));
        assert!(matches!(fit_rate(&[0.0, 1.0], &[1.0, 1.0], FitModel::Power, (0.0, 2.0)), Err(Error::Window(_))));
        assert!(matches!(
            fit_rate(&[1.0, 1.0], &[1.0, 2.0], FitModel::Exponential, (0.0, 2.0)),
            Err(Error::DegenerateFit(_))
        ));
    }

    #[test]
    fn standard_errors_match_the_textbook_formula() {
        // y = 1 - x + noise with residuals (+d, -2d, +d) has RSS 6 d^2.
        let d = 0.01;
        let t = [0.0, 1.0, 2.0];
        let y: Vec<f64> = [(1.0 + d), (-2.0 * d), (-1.0 + d)].iter().map(|v: &f64| v.exp()).collect();
        let f = fit_rate(&t, &y, FitModel::Exponential, (0.0, 2.0)).unwrap();
        assert!((f.rate - 1.0).abs() < 1e-12);
        assert!((f.residual_norm - (6.0f64).sqrt() * d).abs() < 1e-12);
        // s^2 = 6 d^2, sxx = 2.
        assert!((f.rate_se - (3.0f64).sqrt() * d).abs() < 1e-12);
    }

    #[test]
    fn parabolic_peak_refinement() {
        let t: Vec<f64> = (0..20).map(|i| i as f64 * 0.1).collect();
        let y: Vec<f64> = t.iter().map(|t| 1.0 - (t - 0.93) * (t - 0.93)).collect();
        let m = local_maxima(&t, &y);
        assert_eq!(m.len(), 1);
        assert!((m[0].0 - 0.93).abs() < 1e-12 && (m[0].1 - 1.0).abs() < 1e-12);
    }
}
