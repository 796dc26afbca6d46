//! Piecewise dispersive regime table in T = lambda^p and the resulting loss exponents.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Q = Ratio<i64>;

fn q(n: i64, d: i64) -> Q {
    Ratio::new(n, d)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Regime {
    R1,
    R2,
    R3,
    R4,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::R1 => "R1",
            Regime::R2 => "R2",
            Regime::R3 => "R3",
            Regime::R4 => "R4",
        }
    }
}

/// Upper end of R3: lambda^{29/12} (refined table, default) or lambda^3.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum R3Seam {
    #[default]
    Refined,
    Cubic,
}

impl R3Seam {
    pub fn exponent(self) -> Q {
        match self {
            R3Seam::Refined => q(29, 12),
            R3Seam::Cubic => q(3, 1),
        }
    }
}

/// Lower seams of R2, R3, R4 as powers of lambda.
pub fn seams(seam: R3Seam) -> [Q; 3] {
    [q(1, 2), q(5, 4), seam.exponent()]
}

/// Regime containing T = lambda^p (p >= 1/3); seams belong to the upper piece.
pub fn regime_at(p: f64, seam: R3Seam) -> Regime {
    let s = seams(seam).map(|x| *x.numer() as f64 / *x.denom() as f64);
    if p < s[0] {
        Regime::R1
    } else if p < s[1] {
        Regime::R2
    } else if p < s[2] {
        Regime::R3
    } else {
        Regime::R4
    }
}

/// r such that the regime bound is lambda^r at T = lambda^p.
pub fn regime_exponent(regime: Regime, p: Q) -> Q {
    match regime {
        Regime::R1 => (p - q(1, 3)) / 2,
        Regime::R2 => p / 6,
        Regime::R3 => q(5, 42) + p / 14,
        Regime::R4 => q(1, 3),
    }
}

/// Loss 1/6 + r/(1 + 3p) at t = 1, where h = 1/(lambda T^3).
pub fn loss_of(regime: Regime, p: Q) -> Q {
    q(1, 6) + regime_exponent(regime, p) / (q(1, 1) + p * 3)
}

/// The bound of one regime evaluated at (T, lambda), whichever regime T lies in.
pub fn regime_formula(regime: Regime, big_t: f64, lambda: f64) -> f64 {
    match regime {
        Regime::R1 => (big_t / lambda.cbrt()).max(1.0).sqrt(),
        Regime::R2 => big_t.powf(1.0 / 6.0),
        Regime::R3 => lambda.powf(5.0 / 42.0) * big_t.powf(1.0 / 14.0),
        Regime::R4 => lambda.cbrt(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegimeBound {
    pub regime: Regime,
    pub bound_value: f64,
    /// 1/6 + ln R / ln(lambda T^3), i.e. the loss at t = 1.
    pub loss_exponent: f64,
}

pub fn regime_bound(big_t: f64, lambda: f64, seam: R3Seam) -> Result<RegimeBound> {
    if !(lambda > 1.0) || !big_t.is_finite() {
        return Err(Error::Parameter(format!("need lambda > 1 and finite T (got {lambda}, {big_t})")));
    }
    let l3 = lambda.cbrt();
    // Relative slack so that T = lambda^{1/3} computed in floating point is accepted.
    if big_t < l3 * (1.0 - 1e-12) {
        return Err(Error::Parameter(format!("T = {big_t} below lambda^(1/3) = {l3}: outside the regime table")));
    }
    let p = big_t.ln() / lambda.ln();
    let regime = regime_at(p, seam);
    let bound_value = regime_formula(regime, big_t, lambda);
    let loss_exponent = 1.0 / 6.0 + bound_value.ln() / (lambda * big_t.powi(3)).ln();
    Ok(RegimeBound { regime, bound_value, loss_exponent })
}

/// Loss exponent e with sup |G| ~ h^{-2/3 - e'}: 1/6 + (ln R + (1/2) ln t)/ln(1/h).
/// The quadruple must satisfy T = t/sqrt(a), lambda = a^{3/2}/h for a = t^2/T^2.
pub fn dispersion_loss(big_t: f64, lambda: f64, h: f64, t: f64) -> Result<f64> {
    if !(big_t > 0.0 && lambda > 0.0 && h > 0.0 && h < 1.0 && t > 0.0) {
        return Err(Error::Parameter(format!("need T, lambda, t > 0 and 0 < h < 1 (got {big_t}, {lambda}, {h}, {t})")));
    }
    let a = (t / big_t).powi(2);
    let implied = a.powf(1.5) / h;
    if (implied - lambda).abs() > 1e-9 * lambda.max(1.0) {
        return Err(Error::Parameter(format!(
            "inconsistent quadruple: a = t^2/T^2 = {a} gives lambda = {implied}, not {lambda}"
        )));
    }
    if lambda <= 1.0 {
        return Ok(1.0 / 6.0);
    }
    let rb = regime_bound(big_t, lambda, R3Seam::Refined)?;
    Ok(1.0 / 6.0 + (rb.bound_value.ln() + 0.5 * t.ln()) / (1.0 / h).ln())
}

/// Supremum over p >= 1/3 of the t = 1 loss. Each piece is a linear
/// fractional function of p, so the supremum sits at a piece endpoint.
pub fn worst_case_loss(seam: R3Seam) -> Q {
    let s = seams(seam);
    let ends = [
        (Regime::R1, q(1, 3)),
        (Regime::R1, s[0]),
        (Regime::R2, s[0]),
        (Regime::R2, s[1]),
        (Regime::R3, s[1]),
        (Regime::R3, s[2]),
        (Regime::R4, s[2]),
    ];
    ends.iter().map(|&(r, p)| loss_of(r, p)).max().expect("non-empty")
}
