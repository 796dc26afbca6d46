use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Raw physical parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysParams {
    pub h: f64,
    pub a: f64,
    pub eps0: f64,
    pub t0: f64,
}

pub const DEFAULT_EPS0: f64 = 0.5;
pub const DEFAULT_T0: f64 = 1.0;

impl PhysParams {
    pub fn new(h: f64, a: f64, eps0: f64, t0: f64) -> Result<Self> {
        let p = Self { h, a, eps0, t0 };
        p.validate()?;
        Ok(p)
    }

    pub fn with_defaults(h: f64, a: f64) -> Result<Self> {
        Self::new(h, a, DEFAULT_EPS0, DEFAULT_T0)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.h > 0.0 && self.h < 1.0) {
            return Err(Error::Parameter(format!("h = {} not in (0, 1)", self.h)));
        }
        if !(self.a > 0.0 && self.a <= 1.0) {
            return Err(Error::Parameter(format!("a = {} not in (0, 1]", self.a)));
        }
        if !(self.eps0 > 0.0 && self.eps0 < 1.0) {
            return Err(Error::Parameter(format!("eps0 = {} not in (0, 1)", self.eps0)));
        }
        if !(self.t0 > 0.0) {
            return Err(Error::Parameter(format!("t0 = {} must be positive", self.t0)));
        }
        Ok(())
    }

    /// max(a, h^{2/3}).
    pub fn a_natural(&self) -> f64 {
        self.a.max(self.h.powf(2.0 / 3.0))
    }

    pub fn lambda(&self) -> f64 {
        self.a.powf(1.5) / self.h
    }

    pub fn lambda_gamma(&self, gamma: f64) -> f64 {
        gamma.powf(1.5) / self.h
    }

    pub fn norm(&self, t: f64, x: f64) -> NormParams {
        NormParams { lambda: self.lambda(), big_t: t / self.a.sqrt(), big_x: x / self.a }
    }

    /// Physical time for a normalized time T.
    pub fn time_of(&self, big_t: f64) -> f64 {
        big_t * self.a.sqrt()
    }
}

/// Normalized parameters lambda = a^{3/2}/h, T = t/sqrt(a), X = x/a.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormParams {
    pub lambda: f64,
    #[serde(rename = "T")]
    pub big_t: f64,
    #[serde(rename = "X")]
    pub big_x: f64,
}

impl NormParams {
    /// Phase of mode k: h t omega_k h^{-4/3} = T lambda^{1/3} omega_k.
    pub fn mode_phase(&self, omega_k: f64) -> f64 {
        self.big_t * self.lambda.cbrt() * omega_k
    }
}
