//! Filon-type panel quadrature for `\int f(x) e^{i w x} dx`: `f` is replaced
//! by its degree-`n-1` interpolant at Gauss–Legendre nodes on each panel and
//! the interpolant is integrated against the exponential exactly (up to a
//! high-order Gauss rule whose size grows with the phase).

use num_complex::Complex64;

use crate::numeric::GaussLegendre;

/// Interpolation nodes per panel.
pub const FILON_NODES: usize = 10;

/// Panel rule with `FILON_NODES` interpolation nodes.
#[derive(Debug, Clone)]
pub struct FilonRule {
    pub nodes: Vec<f64>,
    bary: Vec<f64>,
}

impl Default for FilonRule {
    fn default() -> Self {
        FilonRule::new(FILON_NODES)
    }
}

impl FilonRule {
    pub fn new(n: usize) -> Self {
        let gl = GaussLegendre::get(n);
        let nodes = gl.nodes.clone();
        let bary = (0..n)
            .map(|i| {
                let p: f64 = (0..n).filter(|&j| j != i).map(|j| nodes[i] - nodes[j]).product();
                1.0 / p
            })
            .collect();
        FilonRule { nodes, bary }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Lagrange basis values at `x` (barycentric form).
    fn basis(&self, x: f64, out: &mut [f64]) {
        for (i, &xi) in self.nodes.iter().enumerate() {
            if x == xi {
                out.iter_mut().for_each(|v| *v = 0.0);
                out[i] = 1.0;
                return;
            }
        }
        let mut denom = 0.0;
        for i in 0..self.nodes.len() {
            let v = self.bary[i] / (x - self.nodes[i]);
            out[i] = v;
            denom += v;
        }
        out.iter_mut().for_each(|v| *v /= denom);
    }

    /// `W_i(theta) = \int_{-1}^{1} L_i(x) e^{i theta x} dx`.
    pub fn weights(&self, theta: f64) -> Vec<Complex64> {
        let m = 24 + theta.abs().ceil() as usize;
        let gl = GaussLegendre::get(m);
        let n = self.nodes.len();
        let mut w = vec![Complex64::new(0.0, 0.0); n];
        let mut l = vec![0.0; n];
        for (x, wx) in gl.nodes.iter().zip(&gl.weights) {
            self.basis(*x, &mut l);
            let e = Complex64::from_polar(*wx, theta * x);
            for i in 0..n {
                w[i] += e * l[i];
            }
        }
        w
    }
}

/// Samples of a smooth function on a sequence of equal panels starting at
/// `origin`, ready for repeated oscillatory integration.
#[derive(Debug, Clone)]
pub struct PanelSamples<T> {
    pub origin: f64,
    pub width: f64,
    pub values: Vec<Vec<T>>,
}

impl<T: Copy> PanelSamples<T> {
    pub fn panel_center(&self, p: usize) -> f64 {
        self.origin + (p as f64 + 0.5) * self.width
    }

    pub fn end(&self) -> f64 {
        self.origin + self.values.len() as f64 * self.width
    }
}

/// `\int f(x) e^{i w x} dx` over all panels for real samples.
pub fn integrate_real(rule: &FilonRule, s: &PanelSamples<f64>, w: f64) -> Complex64 {
    let half = 0.5 * s.width;
    let wt = rule.weights(w * half);
    let mut parts = Vec::with_capacity(s.values.len());
    for (p, vals) in s.values.iter().enumerate() {
        let c = s.panel_center(p);
        let mut acc = Complex64::new(0.0, 0.0);
        for (v, wi) in vals.iter().zip(&wt) {
            acc += wi * *v;
        }
        parts.push(acc * Complex64::from_polar(half, w * c));
    }
    crate::numeric::pairwise_sum_c(&parts)
}

/// `\int f(x) e^{i w x} dx` over all panels for complex samples.
pub fn integrate_complex(rule: &FilonRule, s: &PanelSamples<Complex64>, w: f64) -> Complex64 {
    let half = 0.5 * s.width;
    let wt = rule.weights(w * half);
    let mut parts = Vec::with_capacity(s.values.len());
    for (p, vals) in s.values.iter().enumerate() {
        let c = s.panel_center(p);
        let mut acc = Complex64::new(0.0, 0.0);
        for (v, wi) in vals.iter().zip(&wt) {
            acc += wi * *v;
        }
        parts.push(acc * Complex64::from_polar(half, w * c));
    }
    crate::numeric::pairwise_sum_c(&parts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_reduce_to_gauss_at_zero_phase() {
        let r = FilonRule::default();
        let w = r.weights(0.0);
        let gl = GaussLegendre::get(FILON_NODES);
        for (a, b) in w.iter().zip(&gl.weights) {
            assert!((a.re - b).abs() < 1e-13 && a.im.abs() < 1e-13);
        }
    }

    #[test]
    fn oscillatory_gaussian_integral() {
        // \int_0^inf e^{-x^2/2} e^{i w x} dx has real part sqrt(pi/2) e^{-w^2/2}.
        let r = FilonRule::default();
        let width = 0.25;
        let values: Vec<Vec<f64>> = (0..60)
            .map(|p| {
                let c = (p as f64 + 0.5) * width;
                r.nodes.iter().map(|x| (-(c + 0.5 * width * x).powi(2) / 2.0).exp()).collect()
            })
            .collect();
        let s = PanelSamples { origin: 0.0, width, values };
        for &w in &[0.0, 1.0, 7.5, 40.0] {
            let v = integrate_real(&r, &s, w);
            let exact = (std::f64::consts::PI / 2.0).sqrt() * (-w * w / 2.0).exp();
            assert!((v.re - exact).abs() < 1e-13, "w = {w}: {} vs {exact}", v.re);
        }
    }
}
