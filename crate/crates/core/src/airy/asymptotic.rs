//! Large-argument expansions. Every sum is truncated at its smallest term.

use num_complex::Complex64;
use std::f64::consts::PI;
use std::sync::OnceLock;

const N_COEFF: usize = 80;

struct Coefficients {
    u: Vec<f64>,
    v: Vec<f64>,
}

fn coefficients() -> &'static Coefficients {
    static C: OnceLock<Coefficients> = OnceLock::new();
    C.get_or_init(|| {
        let mut u = vec![1.0; N_COEFF];
        let mut v = vec![1.0; N_COEFF];
        for k in 1..N_COEFF {
            let kf = k as f64;
            u[k] = u[k - 1] * (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0) / ((2.0 * kf - 1.0) * 216.0 * kf);
            v[k] = -(6.0 * kf + 1.0) / (6.0 * kf - 1.0) * u[k];
        }
        Coefficients { u, v }
    })
}

/// Sum of sign^k c_k z^{-k}, stopped before the terms start to grow.
fn truncated(c: &[f64], z: Complex64, alternate: bool) -> Complex64 {
    let zinv = z.inv();
    let mut pow = Complex64::new(1.0, 0.0);
    let mut sum = Complex64::new(c[0], 0.0);
    let mut last = f64::INFINITY;
    for (k, ck) in c.iter().enumerate().skip(1) {
        pow *= zinv;
        let sign = if alternate && k % 2 == 1 { -1.0 } else { 1.0 };
        let term = pow * (sign * ck);
        let mag = term.norm();
        if mag >= last {
            break;
        }
        sum += term;
        last = mag;
        if mag <= 1e-17 * sum.norm() {
            break;
        }
    }
    sum
}

fn zeta(x: f64) -> f64 {
    2.0 / 3.0 * x * x.sqrt()
}

/// Ai(x), Ai'(x) for large positive x, each written as e^{-zeta} times a
/// slowly varying factor. Returns (ai_scaled, aip_scaled, zeta).
pub(crate) fn ai_decaying_scaled(x: f64) -> (f64, f64, f64) {
    let c = coefficients();
    let z = zeta(x);
    let q = x.powf(0.25);
    let su = truncated(&c.u, Complex64::new(z, 0.0), true).re;
    let sv = truncated(&c.v, Complex64::new(z, 0.0), true).re;
    let pre = 0.5 / PI.sqrt();
    (pre * su / q, -pre * q * sv, z)
}

/// Bi(x), Bi'(x) for large positive x as e^{+zeta} times a slowly varying factor.
pub(crate) fn bi_growing_scaled(x: f64) -> (f64, f64, f64) {
    let c = coefficients();
    let z = zeta(x);
    let q = x.powf(0.25);
    let su = truncated(&c.u, Complex64::new(z, 0.0), false).re;
    let sv = truncated(&c.v, Complex64::new(z, 0.0), false).re;
    let pre = 1.0 / PI.sqrt();
    (pre * su / q, pre * q * sv, z)
}

/// Oscillatory side, omega > 0 large. Returns xi = (2/3) omega^{3/2} and the
/// correction series S, Sv so that
///   A+(omega)  = omega^{-1/4}/(2 sqrt(pi)) e^{i(xi - pi/4)} S
///   A+'(omega) = omega^{1/4}/(2 sqrt(pi)) e^{i(xi + pi/4)} Sv
pub(crate) fn a_plus_factors(omega: f64) -> (f64, Complex64, Complex64) {
    let c = coefficients();
    let xi = zeta(omega);
    let z = Complex64::new(0.0, -xi);
    (xi, truncated(&c.u, z, true), truncated(&c.v, z, true))
}
