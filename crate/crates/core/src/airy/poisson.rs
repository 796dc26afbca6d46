use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

use super::{l_of_omega, AiryZeroTable};
use crate::bump::smooth_step;
use crate::error::{Error, Result};
use crate::quadrature::{composite, GaussLegendre};
use crate::summation::{ComplexSum, NeumaierSum};

/// Smooth bump supported on [lo, hi], equal to 1 on the central `plateau`
/// fraction of the interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
pub struct TestBump {
    pub lo: f64,
    pub hi: f64,
    pub plateau: f64,
}

impl TestBump {
    pub fn new(lo: f64, hi: f64, plateau: f64) -> Result<Self> {
        if !(lo < hi && (0.0..1.0).contains(&plateau)) {
            return Err(Error::Parameter(format!("bad bump [{lo}, {hi}] plateau {plateau}")));
        }
        Ok(Self { lo, hi, plateau })
    }

    pub fn eval(&self, w: f64) -> f64 {
        let c = 0.5 * (self.lo + self.hi);
        let r = 0.5 * (self.hi - self.lo);
        let u = ((w - c) / r).abs();
        smooth_step((1.0 - u) / (1.0 - self.plateau))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PoissonCheck {
    /// sum over |N| <= N_max of the oscillatory integrals.
    pub lhs: Complex64,
    /// 2 pi sum_k f(omega_k) / L'(omega_k).
    pub rhs: f64,
    pub gap: f64,
    /// gaps[n] = |partial lhs up to |N| <= n - rhs|.
    pub gaps: Vec<f64>,
    /// I_N for N = 0..=N_max (I_{-N} = conj I_N for real f).
    pub integrals: Vec<Complex64>,
    pub panels: usize,
}

const NODES_PER_PANEL: usize = 16;
const MAX_PANELS: usize = 1 << 16;
const REL_TOL: f64 = 1e-13;

fn integrals_on(rule: &GaussLegendre, f: &TestBump, n_max: usize, panels: usize) -> Result<Vec<Complex64>> {
    let (xs, ws) = composite(rule, f.lo, f.hi, panels);
    let vals: Vec<(f64, f64)> = xs
        .par_iter()
        .zip(ws.par_iter())
        .map(|(&x, &w)| Ok((l_of_omega(x)?, w * f.eval(x))))
        .collect::<Result<Vec<_>>>()?;
    Ok((0..=n_max)
        .into_par_iter()
        .map(|n| {
            let mut s = ComplexSum::new();
            for &(l, fw) in &vals {
                s.add(Complex64::from_polar(fw, -(n as f64) * l));
            }
            s.value()
        })
        .collect())
}

/// Airy-Poisson check: sum_N int e^{-iN L} f = 2 pi sum_k f(omega_k)/L'(omega_k).
pub fn airy_poisson_check(f: &TestBump, n_max: usize, table: &AiryZeroTable) -> Result<PoissonCheck> {
    table.ensure_covers(f.hi)?;
    let rule = GaussLegendre::new(NODES_PER_PANEL);
    let span = l_of_omega(f.hi)? - l_of_omega(f.lo)?;
    let cycles = span * n_max.max(1) as f64 / (2.0 * PI);
    let mut panels = (cycles / 2.0).ceil() as usize + 8;
    let mut prev = integrals_on(&rule, f, n_max, panels)?;
    let scale = {
        let mut s = NeumaierSum::new();
        let (xs, ws) = composite(&rule, f.lo, f.hi, panels);
        for (x, w) in xs.iter().zip(&ws) {
            s.add(w * f.eval(*x));
        }
        s.value().abs().max(f64::MIN_POSITIVE)
    };
    let integrals = loop {
        panels *= 2;
        if panels > MAX_PANELS {
            return Err(Error::Accuracy(format!(
                "Poisson integrals on [{}, {}] unresolved at {} panels",
                f.lo, f.hi, MAX_PANELS
            )));
        }
        let cur = integrals_on(&rule, f, n_max, panels)?;
        let change = cur.iter().zip(&prev).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        if change <= REL_TOL * scale {
            break cur;
        }
        prev = cur;
    };

    let mut rhs = NeumaierSum::new();
    for e in table.entries() {
        if e.omega_k > f.lo && e.omega_k < f.hi {
            rhs.add(2.0 * PI * f.eval(e.omega_k) / e.l_prime_k);
        }
    }
    let rhs = rhs.value();

    let mut partial = ComplexSum::new();
    let mut gaps = Vec::with_capacity(n_max + 1);
    for (n, i_n) in integrals.iter().enumerate() {
        if n == 0 {
            partial.add(*i_n);
        } else {
            partial.add(*i_n);
            partial.add(i_n.conj());
        }
        gaps.push((partial.value() - rhs).norm());
    }
    let lhs = partial.value();
    Ok(PoissonCheck { lhs, rhs, gap: (lhs - rhs).norm(), gaps, integrals, panels })
}
