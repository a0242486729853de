//! Small numerical building blocks shared by every module: deterministic
//! reductions, Gauss–Legendre rules, adaptive Gauss–Kronrod quadrature,
//! cubic interpolation on a uniform grid and the cancellation-free series
//! for the time integrals of the characteristic flow.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;

/// Below this value of `nu * t` the `(1 - e^{-nu t})/nu` family switches to
/// a three-term Taylor expansion.
pub const TAYLOR_THRESHOLD: f64 = 1e-6;

/// Largest `nu * t` for which `e^{nu t}` is representable with margin.
pub const MAX_NU_T: f64 = 700.0;

/// `<x> = (1 + x^2)^{1/2}`.
#[inline]
pub fn bracket(x: f64) -> f64 {
    x.hypot(1.0)
}

/// `<k, eta> = (1 + k^2 + eta^2)^{1/2}`.
#[inline]
pub fn bracket2(k: f64, eta: f64) -> f64 {
    (1.0 + k * k + eta * eta).sqrt()
}

/// `(1 - e^{-nu t}) / nu`, with the `nu -> 0` limit `t`.
#[inline]
pub fn phi_tilde(t: f64, nu: f64) -> f64 {
    let x = nu * t;
    if x.abs() < TAYLOR_THRESHOLD {
        t * (1.0 - x / 2.0 + x * x / 6.0)
    } else {
        -(-x).exp_m1() / nu
    }
}

/// `(e^{nu t} - 1) / nu`, with the `nu -> 0` limit `t`.
#[inline]
pub fn phi(t: f64, nu: f64) -> f64 {
    let x = nu * t;
    if x.abs() < TAYLOR_THRESHOLD {
        t * (1.0 + x / 2.0 + x * x / 6.0)
    } else {
        x.exp_m1() / nu
    }
}

const SERIES_CUT: f64 = 0.5;
const SERIES_TERMS: usize = 30;

/// `(e^x - 1)/x = sum x^n/(n+1)!`.
pub fn e1(x: f64) -> f64 {
    if x.abs() <= SERIES_CUT {
        let mut term = 1.0;
        let mut sum = 1.0;
        for n in 1..SERIES_TERMS {
            term *= x / (n as f64 + 1.0);
            sum += term;
        }
        sum
    } else {
        x.exp_m1() / x
    }
}

/// `(E1(2x) - E1(x))/x = sum_{n>=1} (2^n - 1) x^{n-1}/(n+1)!`.
pub fn g_series(x: f64) -> f64 {
    if x.abs() <= SERIES_CUT {
        // term_n = x^{n-1}/(n+1)!, weight (2^n - 1)
        let mut pow_x = 1.0;
        let mut fact = 2.0;
        let mut two_n = 2.0;
        let mut sum = 0.0;
        for n in 1..SERIES_TERMS {
            sum += (two_n - 1.0) * pow_x / fact;
            pow_x *= x;
            fact *= n as f64 + 2.0;
            two_n *= 2.0;
        }
        sum
    } else {
        (e1(2.0 * x) - e1(x)) / x
    }
}

/// `(E1(2x) - 2 E1(x) + 1)/x^2 = sum_{n>=2} (2^n - 2) x^{n-2}/(n+1)!`.
pub fn q_series(x: f64) -> f64 {
    if x.abs() <= SERIES_CUT {
        let mut pow_x = 1.0;
        let mut fact = 6.0;
        let mut two_n = 4.0;
        let mut sum = 0.0;
        for n in 2..SERIES_TERMS + 1 {
            sum += (two_n - 2.0) * pow_x / fact;
            pow_x *= x;
            fact *= n as f64 + 2.0;
            two_n *= 2.0;
        }
        sum
    } else {
        (e1(2.0 * x) - 2.0 * e1(x) + 1.0) / (x * x)
    }
}

/// Sum with a fixed pairwise tree. The result depends only on the input
/// order, never on how work was scheduled.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        n if n <= 8 => xs.iter().sum(),
        n => {
            let (a, b) = xs.split_at(n / 2);
            pairwise_sum(a) + pairwise_sum(b)
        }
    }
}

pub fn pairwise_sum_c(xs: &[Complex64]) -> Complex64 {
    match xs.len() {
        0 => Complex64::new(0.0, 0.0),
        1 => xs[0],
        n if n <= 8 => xs.iter().sum(),
        n => {
            let (a, b) = xs.split_at(n / 2);
            pairwise_sum_c(a) + pairwise_sum_c(b)
        }
    }
}

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    fn compute(n: usize) -> Self {
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..(n + 1) / 2 {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussLegendre { nodes, weights }
    }

    /// Cached rule; rules are computed once per process.
    pub fn get(n: usize) -> Arc<GaussLegendre> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GaussLegendre>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().expect("gauss-legendre cache poisoned");
        guard
            .entry(n)
            .or_insert_with(|| Arc::new(GaussLegendre::compute(n)))
            .clone()
    }

    /// Integrate `f` over `[a, b]` with `panels` equal panels.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, panels: usize, mut f: F) -> f64 {
        let h = (b - a) / panels as f64;
        let mut parts = Vec::with_capacity(panels);
        for p in 0..panels {
            let c = a + (p as f64 + 0.5) * h;
            let s: f64 = self
                .nodes
                .iter()
                .zip(&self.weights)
                .map(|(x, w)| w * f(c + 0.5 * h * x))
                .sum();
            parts.push(0.5 * h * s);
        }
        pairwise_sum(&parts)
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

// Gauss–Kronrod 7/15 abscissae and weights.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: FnMut(f64) -> Complex64>(f: &mut F, a: f64, b: f64) -> (Complex64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let x = h * XGK[j];
        let f1 = f(c - x);
        let f2 = f(c + x);
        kron += (f1 + f2) * WGK[j];
        if j % 2 == 1 {
            gauss += (f1 + f2) * WG[j / 2];
        }
    }
    let kron = kron * h;
    let gauss = gauss * h;
    (kron, (kron - gauss).norm())
}

/// Adaptive Gauss–Kronrod integration of a complex integrand over `[a, b]`.
/// Returns `(value, error_estimate)`. Intervals are bisected until the
/// per-interval error is below `max(abs_tol, rel_tol*|I|)` scaled by length.
pub fn integrate_adaptive_c<F: FnMut(f64) -> Complex64>(
    mut f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_depth: usize,
) -> (Complex64, f64) {
    if a == b {
        return (Complex64::new(0.0, 0.0), 0.0);
    }
    // Seed with a few panels so narrow features are not missed entirely.
    let seeds = 8;
    let h = (b - a) / seeds as f64;
    let mut stack: Vec<(f64, f64, usize, Complex64, f64)> = Vec::new();
    let mut total = Complex64::new(0.0, 0.0);
    for s in 0..seeds {
        let lo = a + s as f64 * h;
        let hi = if s + 1 == seeds { b } else { lo + h };
        let (v, e) = gk15(&mut f, lo, hi);
        total += v;
        stack.push((lo, hi, 0, v, e));
    }
    let mut done_val = Vec::new();
    let mut err_total = 0.0;
    let len = (b - a).abs();
    while let Some((lo, hi, depth, v, e)) = stack.pop() {
        let tol = abs_tol.max(rel_tol * total.norm()) * ((hi - lo).abs() / len).max(1e-3);
        if e <= tol || depth >= max_depth {
            done_val.push(v);
            err_total += e;
            continue;
        }
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = gk15(&mut f, lo, mid);
        let (v2, e2) = gk15(&mut f, mid, hi);
        total += v1 + v2 - v;
        stack.push((lo, mid, depth + 1, v1, e1));
        stack.push((mid, hi, depth + 1, v2, e2));
    }
    (pairwise_sum_c(&done_val), err_total)
}

/// Real-valued wrapper around [`integrate_adaptive_c`].
pub fn integrate_adaptive<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> (f64, f64) {
    let (v, e) = integrate_adaptive_c(|x| Complex64::new(f(x), 0.0), a, b, abs_tol, rel_tol, 50);
    (v.re, e)
}

/// Four-point cubic Lagrange interpolation on a uniform grid. Positions are
/// given in index units; nodes outside `[0, len)` read as zero.
#[derive(Debug, Clone, Copy)]
pub struct CubicStencil {
    pub base: isize,
    pub weights: [f64; 4],
}

impl CubicStencil {
    pub fn at(pos: f64) -> Self {
        let i = pos.floor();
        let f = pos - i;
        let weights = [
            -f * (f - 1.0) * (f - 2.0) / 6.0,
            (f + 1.0) * (f - 1.0) * (f - 2.0) / 2.0,
            -(f + 1.0) * f * (f - 2.0) / 2.0,
            (f + 1.0) * f * (f - 1.0) / 6.0,
        ];
        CubicStencil {
            base: i as isize - 1,
            weights,
        }
    }

    #[inline]
    pub fn apply(&self, data: &[Complex64]) -> Complex64 {
        let n = data.len() as isize;
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, w) in self.weights.iter().enumerate() {
            let idx = self.base + j as isize;
            if idx >= 0 && idx < n {
                acc += data[idx as usize] * *w;
            }
        }
        acc
    }

    /// True when every stencil node is inside the data.
    pub fn inside(&self, len: usize) -> bool {
        self.base >= 0 && self.base + 3 < len as isize
    }

    /// True when every node with a nonzero weight is inside the data.
    pub fn supported_inside(&self, len: usize) -> bool {
        self.weights.iter().enumerate().all(|(j, w)| {
            let idx = self.base + j as isize;
            *w == 0.0 || (idx >= 0 && idx < len as isize)
        })
    }
}

/// Interpolate uniformly sampled data at an arbitrary position (index units).
pub fn interp_cubic(data: &[Complex64], pos: f64) -> Complex64 {
    if !pos.is_finite() || pos < -2.0 || pos > data.len() as f64 + 1.0 {
        return Complex64::new(0.0, 0.0);
    }
    CubicStencil::at(pos).apply(data)
}

/// Log-spaced samples `lo..=hi` (inclusive) with `n >= 2` points.
pub fn logspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// Uniform samples `lo..=hi` with `n >= 2` points.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn series_match_closed_forms_away_from_zero() {
        for &x in &[0.49f64, 0.51, -0.49, -0.51, 0.3, -0.2] {
            let g_closed = ((2.0 * x).exp_m1() / (2.0 * x) - x.exp_m1() / x) / x;
            let q_closed = ((2.0 * x).exp_m1() / (2.0 * x) - 2.0 * x.exp_m1() / x + 1.0) / (x * x);
            assert!((g_series(x) - g_closed).abs() < 1e-13, "g({x})");
            assert!((q_series(x) - q_closed).abs() < 1e-12, "q({x})");
        }
        assert_eq!(q_series(0.0), 1.0 / 3.0);
        assert_eq!(g_series(0.0), 0.5);
        assert_eq!(e1(0.0), 1.0);
    }

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let gl = GaussLegendre::get(10);
        let v = gl.integrate(0.0, 2.0, 1, |x| x.powi(19));
        assert!((v - 2f64.powi(20) / 20.0).abs() / v < 1e-14);
        let wsum: f64 = gl.weights.iter().sum();
        assert!((wsum - 2.0).abs() < 1e-14);
    }

    #[test]
    fn adaptive_quadrature_handles_peaks() {
        let (v, _) = integrate_adaptive(|x| (-(x - 3.0).powi(2) * 400.0).exp(), 0.0, 10.0, 1e-14, 1e-12);
        let exact = (PI / 400.0).sqrt();
        assert!((v - exact).abs() < 1e-12);
    }

    #[test]
    fn cubic_stencil_reproduces_cubics_and_nodes() {
        let data: Vec<Complex64> = (0..10)
            .map(|i| {
                let x = i as f64;
                Complex64::new(x * x * x - 2.0 * x, 0.5 * x)
            })
            .collect();
        let v = interp_cubic(&data, 4.3);
        let x: f64 = 4.3;
        assert!((v.re - (x * x * x - 2.0 * x)).abs() < 1e-11);
        assert!((v.im - 0.5 * x).abs() < 1e-12);
        assert_eq!(interp_cubic(&data, 5.0), data[5]);
    }

    #[test]
    fn pairwise_sum_matches_naive() {
        let xs: Vec<f64> = (0..1000).map(|i| (i as f64).sin()).collect();
        let naive: f64 = xs.iter().sum();
        assert!((pairwise_sum(&xs) - naive).abs() < 1e-12);
    }
}
