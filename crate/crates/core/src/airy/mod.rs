//! Airy function Ai, the rotated branches A+ and A-, the phase function L
//! with its derivative, Airy zeros and the Airy-Poisson summation check.
//!
//! Conventions for real omega:
//!   A+(omega) = e^{-i pi/3} Ai(e^{-i pi/3} omega),  A-(omega) = conj(A+(omega)),
//!   Ai(-omega) = A+(omega) + A-(omega),
//!   L(omega) = pi + i log(A-(omega)/A+(omega)) = pi + 2 arg A+(omega).

mod asymptotic;
mod poisson;
mod series;
mod zeros;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use crate::error::{Error, Result};

pub use poisson::{airy_poisson_check, PoissonCheck, TestBump};
pub use zeros::{airy_zero, airy_zeros, AiryZeroTable, ZeroEntry};

/// Series and asymptotic branches meet at |x| = 8, where both agree to ~1e-13.
pub const CROSSOVER: f64 = 8.0;

/// 1/(4 pi^{3/2}), a commonly quoted leading constant for the Psi expansion
/// of A+. The true leading coefficient is `1/(2 sqrt(pi))`, larger by 2 pi.
pub const QUOTED_A0: f64 = 0.044_896_780_531_291_64; // 1/(4 pi^{3/2})

/// |A+(z)| ~ z^{-1/4} / (2 sqrt(pi)) as z -> +inf.
pub fn leading_amplitude(z: f64) -> f64 {
    0.5 / PI.sqrt() / z.powf(0.25)
}

fn check_finite(x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("non-finite argument {x}")))
    }
}

/// Ai(x) and Ai'(x).
pub fn ai_with_derivative(x: f64) -> Result<(f64, f64)> {
    check_finite(x)?;
    if x.abs() <= CROSSOVER {
        let s = series::maclaurin(x);
        return Ok((s.ai, s.aip));
    }
    if x > 0.0 {
        let (a, ap, z) = asymptotic::ai_decaying_scaled(x);
        let e = (-z).exp();
        Ok((a * e, ap * e))
    } else {
        let (ap, dap) = a_plus_osc(-x);
        Ok((2.0 * ap.re, -2.0 * dap.re))
    }
}

/// Ai(x). Relative error below 1e-10 on |x| <= 50 away from the zeros;
/// underflows to 0 past x ~ 105.
pub fn ai(x: f64) -> Result<f64> {
    ai_with_derivative(x).map(|p| p.0)
}

fn a_plus_osc(omega: f64) -> (Complex64, Complex64) {
    let (xi, s, sv) = asymptotic::a_plus_factors(omega);
    let pre = 0.5 / PI.sqrt();
    let q = omega.powf(0.25);
    let a = Complex64::from_polar(pre / q, xi - FRAC_PI_4) * s;
    let ap = Complex64::from_polar(pre * q, xi + FRAC_PI_4) * sv;
    (a, ap)
}

/// A+(omega) and dA+/domega for real omega.
///
/// On |omega| <= 8 the rotated series e^{-i pi/3} [c1 f(w) - c2 g(w)] with
/// w = e^{-i pi/3} omega is used; since w^3 = -omega^3 is real, f(w) = f(-omega)
/// and g(w) = -e^{-i pi/3} g(-omega), which collapses the series to the real
/// pair (Ai(-omega) - i Bi(-omega))/2.
pub fn a_plus_with_derivative(omega: f64) -> Result<(Complex64, Complex64)> {
    check_finite(omega)?;
    if omega > CROSSOVER {
        return Ok(a_plus_osc(omega));
    }
    let (ai, aip, bi, bip) = if omega >= -CROSSOVER {
        let s = series::maclaurin(-omega);
        (s.ai, s.aip, s.bi, s.bip)
    } else {
        let (a, ap, z) = asymptotic::ai_decaying_scaled(-omega);
        let (b, bp, _) = asymptotic::bi_growing_scaled(-omega);
        let (em, ep) = ((-z).exp(), z.exp());
        (a * em, ap * em, b * ep, bp * ep)
    };
    Ok((Complex64::new(0.5 * ai, -0.5 * bi), Complex64::new(-0.5 * aip, 0.5 * bip)))
}

/// A+, A- and Ai(-z) at a real point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AiryBranchValue {
    pub a_plus: Complex64,
    pub a_minus: Complex64,
    pub ai_of_minus_z: f64,
}

pub fn a_branches(z: f64) -> Result<AiryBranchValue> {
    let (a_plus, _) = a_plus_with_derivative(z)?;
    let a_minus = a_plus.conj();
    Ok(AiryBranchValue { a_plus, a_minus, ai_of_minus_z: (a_plus + a_minus).re })
}

/// Asymptotic form (4/3) u + pi/2 - b1/u with u = omega^{3/2}.
/// Only used to pick the 2 pi branch and as a cross-check.
pub fn l_asymptotic(omega: f64, b1: f64) -> f64 {
    let u = omega * omega.sqrt();
    4.0 / 3.0 * u + FRAC_PI_2 - b1 / u
}

/// First correction coefficient of L: L = (4/3) u + pi/2 - B(u), B(u) ~ B1/u.
pub const B1: f64 = 5.0 / 24.0;

/// Raw value pi + 2 arg A+ in (-pi, 3pi], before branch selection.
fn l_principal(omega: f64) -> Result<f64> {
    let (a, _) = a_plus_with_derivative(omega)?;
    Ok(PI + 2.0 * a.im.atan2(a.re))
}

/// L(omega), real analytic and strictly increasing, L(0) = pi/3,
/// L(-inf) = 0 and L(omega_k) = 2 pi k.
pub fn l_of_omega(omega: f64) -> Result<f64> {
    check_finite(omega)?;
    if omega > CROSSOVER {
        let (xi, s, _) = asymptotic::a_plus_factors(omega);
        return Ok(FRAC_PI_2 + 2.0 * xi + 2.0 * s.im.atan2(s.re));
    }
    if omega < -CROSSOVER {
        // pi - 2 atan2(Bi, Ai) = 2 atan(Ai/Bi); the ratio is e^{-2 zeta} times O(1).
        let (a, _, z) = asymptotic::ai_decaying_scaled(-omega);
        let (b, _, _) = asymptotic::bi_growing_scaled(-omega);
        return Ok(2.0 * (a / b * (-2.0 * z).exp()).atan());
    }
    let p = l_principal(omega)?;
    if omega < 1.0 {
        // Bi(-omega) > 0 here, so the principal value already lies in (0, pi).
        return Ok(p);
    }
    let m = ((l_asymptotic(omega, B1) - p) / (2.0 * PI)).round();
    Ok(p + 2.0 * PI * m)
}

/// L'(omega) = 2 Im(A+'/A+), from the analytic derivative of the log ratio.
pub fn l_prime(omega: f64) -> Result<f64> {
    check_finite(omega)?;
    if omega < -CROSSOVER {
        // 2 (Ai Bi' - Ai' Bi)/(Ai^2 + Bi^2) with the e^{+-zeta} factors cancelled.
        let (a, ap, z) = asymptotic::ai_decaying_scaled(-omega);
        let (b, bp, _) = asymptotic::bi_growing_scaled(-omega);
        let e2 = (-2.0 * z).exp();
        return Ok(2.0 * (a * bp - ap * b) * e2 / (e2 * e2 * a * a + b * b));
    }
    let (a, ap) = a_plus_with_derivative(omega)?;
    Ok(2.0 * (ap / a).im)
}

/// L along an increasing grid, unwrapping pi + 2 arg A+ node by node.
/// The first node is anchored by `l_of_omega`; each later node takes the
/// 2 pi branch closest to the trapezoidal prediction from L'. A residual
/// mismatch above pi/2 means the grid is too coarse to track the branch.
pub fn l_on_grid(grid: &[f64]) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(grid.len());
    let Some(&first) = grid.first() else {
        return Ok(out);
    };
    out.push(l_of_omega(first)?);
    let mut prev_d = l_prime(first)?;
    for w in grid.windows(2) {
        let (w0, w1) = (w[0], w[1]);
        if !(w1 > w0) {
            return Err(Error::Parameter(format!("grid not increasing at {w0} -> {w1}")));
        }
        let d = l_prime(w1)?;
        let last = *out.last().unwrap();
        let predicted = last + 0.5 * (prev_d + d) * (w1 - w0);
        let raw = l_principal(w1)?;
        let m = ((predicted - raw) / (2.0 * PI)).round();
        let val = raw + 2.0 * PI * m;
        let jump = (val - predicted).abs();
        if jump > FRAC_PI_2 {
            return Err(Error::Continuity { from: w0, to: w1, jump });
        }
        out.push(val);
        prev_d = d;
    }
    Ok(out)
}
