//! Gauss-Legendre rules and composite panels.

use num_complex::Complex64;

use crate::summation::{ComplexSum, NeumaierSum};

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            // Tricomi initial guess, then Newton on P_n.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
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
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Composite rule: `panels` equal panels on [a, b], each with the given base rule.
pub fn composite(rule: &GaussLegendre, a: f64, b: f64, panels: usize) -> (Vec<f64>, Vec<f64>) {
    let h = (b - a) / panels as f64;
    let mut xs = Vec::with_capacity(panels * rule.len());
    let mut ws = Vec::with_capacity(panels * rule.len());
    for p in 0..panels {
        let lo = a + p as f64 * h;
        let mid = lo + 0.5 * h;
        for (x, w) in rule.nodes.iter().zip(&rule.weights) {
            xs.push(mid + 0.5 * h * x);
            ws.push(0.5 * h * w);
        }
    }
    (xs, ws)
}

pub fn integrate(rule: &GaussLegendre, a: f64, b: f64, panels: usize, f: impl Fn(f64) -> f64) -> f64 {
    let (xs, ws) = composite(rule, a, b, panels);
    let mut s = NeumaierSum::new();
    for (x, w) in xs.iter().zip(&ws) {
        s.add(w * f(*x));
    }
    s.value()
}

pub fn integrate_complex(
    rule: &GaussLegendre,
    a: f64,
    b: f64,
    panels: usize,
    f: impl Fn(f64) -> Complex64,
) -> Complex64 {
    let (xs, ws) = composite(rule, a, b, panels);
    let mut s = ComplexSum::new();
    for (x, w) in xs.iter().zip(&ws) {
        s.add(f(*x) * *w);
    }
    s.value()
}

/// Doubles the panel count until two successive estimates agree to `rtol`
/// (relative to `scale` if given, else to the estimate). Returns `None` if
/// `max_panels` is exceeded.
pub fn adaptive(
    rule: &GaussLegendre,
    a: f64,
    b: f64,
    start_panels: usize,
    max_panels: usize,
    rtol: f64,
    f: impl Fn(f64) -> f64,
) -> Option<f64> {
    let mut panels = start_panels.max(1);
    let mut prev = integrate(rule, a, b, panels, &f);
    while panels < max_panels {
        panels *= 2;
        let cur = integrate(rule, a, b, panels, &f);
        if (cur - prev).abs() <= rtol * cur.abs().max(f64::MIN_POSITIVE) {
            return Some(cur);
        }
        prev = cur;
    }
    None
}
