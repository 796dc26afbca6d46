//! Smooth cutoffs: the even bump phi, the annular piece psi2 and the dyadic
//! ladder that partitions phi_{eps0}.
//!
//! phi = 1 on [-1, 1] and vanishes outside [-3/2, 3/2], so that
//! psi2(u) = phi(u) - phi(2u) is supported in 1/2 <= |u| <= 3/2.

use crate::error::{Error, Result};

/// C-infinity step: 0 for x <= 0, 1 for x >= 1.
pub fn smooth_step(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let a = (-1.0 / x).exp();
    let b = (-1.0 / (1.0 - x)).exp();
    a / (a + b)
}

pub const PLATEAU: f64 = 1.0;
pub const SUPPORT: f64 = 1.5;

pub fn phi(u: f64) -> f64 {
    smooth_step((SUPPORT - u.abs()) / (SUPPORT - PLATEAU))
}

/// phi(u / s).
pub fn phi_scaled(u: f64, s: f64) -> f64 {
    phi(u / s)
}

pub fn psi2(u: f64) -> f64 {
    phi(u) - phi(2.0 * u)
}

/// Dyadic ladder gamma_j = 2^j a_nat, j = 0..=J, with gamma_J <= eps0.
///
/// The base piece phi(u / (a_nat/2)) and a top remainder
/// phi(u/eps0) - phi(u/gamma_J) complete the partition
///   phi(u/eps0) = phi(2u/a_nat) + sum_j psi2(u/gamma_j) + top(u).
#[derive(Debug, Clone, PartialEq)]
pub struct GammaLadder {
    pub a_nat: f64,
    pub eps0: f64,
    pub gammas: Vec<f64>,
}

impl GammaLadder {
    pub fn new(a_nat: f64, eps0: f64) -> Result<Self> {
        if !(a_nat > 0.0 && a_nat <= eps0) {
            return Err(Error::Parameter(format!(
                "ladder needs 0 < a_nat <= eps0, got a_nat = {a_nat}, eps0 = {eps0}"
            )));
        }
        let mut gammas = vec![a_nat];
        while gammas.last().unwrap() * 2.0 <= eps0 {
            gammas.push(gammas.last().unwrap() * 2.0);
        }
        Ok(Self { a_nat, eps0, gammas })
    }

    pub fn top(&self) -> f64 {
        *self.gammas.last().unwrap()
    }

    pub fn contains(&self, gamma: f64) -> bool {
        self.gammas.iter().any(|g| (g / gamma - 1.0).abs() < 1e-12)
    }

    /// Weight of the base piece at frequency u.
    pub fn base_weight(&self, u: f64) -> f64 {
        phi_scaled(u, 0.5 * self.a_nat)
    }

    pub fn dyadic_weight(gamma: f64, u: f64) -> f64 {
        psi2(u / gamma)
    }

    pub fn top_weight(&self, u: f64) -> f64 {
        phi_scaled(u, self.eps0) - phi_scaled(u, self.top())
    }

    /// Sum of all pieces; equals phi(u/eps0) up to rounding.
    pub fn reconstruct(&self, u: f64) -> f64 {
        let mut s = self.base_weight(u);
        for g in &self.gammas {
            s += Self::dyadic_weight(*g, u);
        }
        s + self.top_weight(u)
    }
}
