//! Eigenfunction expansion of the Green function and its dyadic pieces.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

use crate::airy::{ai, AiryZeroTable};
use crate::bump::{phi_scaled, GammaLadder, SUPPORT};
use crate::error::{Error, Result};
use crate::params::PhysParams;
use crate::summation::{ComplexSum, NeumaierSum};

/// e_k(x) = sqrt(2 pi h^{-2/3} / L'(omega_k)) Ai(x h^{-2/3} - omega_k).
pub fn eigenfunction(table: &AiryZeroTable, k: usize, x: f64, h: f64) -> Result<f64> {
    let e = table.get(k)?;
    let s = h.powf(-2.0 / 3.0);
    Ok((2.0 * PI * s / e.l_prime_k).sqrt() * ai(x * s - e.omega_k)?)
}

/// Spectral weight applied to mode k through u = h^{2/3} omega_k.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cutoff {
    /// phi(u / eps0).
    Full,
    /// psi2(u / gamma), gamma on the dyadic ladder.
    Dyadic(f64),
    /// phi(u / (a_nat / 2)).
    Base,
    /// phi(u / eps0) - phi(u / gamma_top).
    Top,
}

/// Modes of one cutoff, ready for repeated evaluation.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub h: f64,
    pub omegas: Vec<f64>,
    norms: Vec<f64>,
    pub weights: Vec<f64>,
    scale: f64,
}

impl Spectrum {
    pub fn new(table: &AiryZeroTable, p: &PhysParams, cutoff: Cutoff) -> Result<Self> {
        p.validate()?;
        let ladder = GammaLadder::new(p.a_natural().min(p.eps0), p.eps0)?;
        let (reach, w): (f64, Box<dyn Fn(f64) -> f64>) = match cutoff {
            Cutoff::Full => (p.eps0, Box::new(|u| phi_scaled(u, p.eps0))),
            Cutoff::Dyadic(g) => {
                if !(p.a_natural() <= g * (1.0 + 1e-12) && g <= p.eps0 * (1.0 + 1e-12)) || !ladder.contains(g) {
                    return Err(Error::Parameter(format!(
                        "gamma = {g} is not on the dyadic ladder {:?}",
                        ladder.gammas
                    )));
                }
                (g, Box::new(move |u| GammaLadder::dyadic_weight(g, u)))
            }
            Cutoff::Base => {
                let l = ladder.clone();
                (0.5 * ladder.a_nat, Box::new(move |u| l.base_weight(u)))
            }
            Cutoff::Top => {
                let l = ladder.clone();
                (p.eps0, Box::new(move |u| l.top_weight(u)))
            }
        };
        let h23 = p.h.powf(2.0 / 3.0);
        let bound = SUPPORT * reach / h23;
        table.ensure_covers(bound)?;
        let scale = 1.0 / h23;
        let mut omegas = Vec::new();
        let mut norms = Vec::new();
        let mut weights = Vec::new();
        for e in table.entries() {
            if e.omega_k >= bound {
                break;
            }
            let wt = w(e.omega_k * h23);
            if wt != 0.0 {
                omegas.push(e.omega_k);
                norms.push((2.0 * PI * scale / e.l_prime_k).sqrt());
                weights.push(wt);
            }
        }
        Ok(Self { h: p.h, omegas, norms, weights, scale })
    }

    pub fn len(&self) -> usize {
        self.omegas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omegas.is_empty()
    }

    /// e_k(x) for every retained mode.
    pub fn modes(&self, x: f64) -> Result<Vec<f64>> {
        let y = x * self.scale;
        self.omegas.iter().zip(&self.norms).map(|(w, n)| Ok(n * ai(y - w)?)).collect()
    }

    /// Per-mode phase factors e^{i t omega_k h^{-1/3}}.
    pub fn phases(&self, t: f64) -> Vec<Complex64> {
        let c = t / self.h.cbrt();
        self.omegas.iter().map(|w| Complex64::from_polar(1.0, c * w)).collect()
    }

    /// Coefficients w_k e_k(x) e_k(a).
    pub fn coefficients(&self, ex: &[f64], ea: &[f64]) -> Vec<f64> {
        ex.iter().zip(ea).zip(&self.weights).map(|((x, a), w)| (x * a) * w).collect()
    }

    pub fn sum(coeffs: &[f64], phases: &[Complex64]) -> Complex64 {
        let mut s = ComplexSum::new();
        for (c, z) in coeffs.iter().zip(phases) {
            s.add(z * *c);
        }
        s.value()
    }

    pub fn green(&self, t: f64, x: f64, a: f64) -> Result<Complex64> {
        let c = self.coefficients(&self.modes(x)?, &self.modes(a)?);
        Ok(Self::sum(&c, &self.phases(t)))
    }

    /// sum_k w_k^2 e_k(a)^2, the squared L^2 norm of G(t, ., a) for every t.
    pub fn l2_norm_sq(&self, a: f64) -> Result<f64> {
        let ea = self.modes(a)?;
        let mut s = NeumaierSum::new();
        for (e, w) in ea.iter().zip(&self.weights) {
            s.add((e * w).powi(2));
        }
        Ok(s.value())
    }
}

/// G^{eps0}_h(t, x, a) = sum_k e^{i h t lambda_k} phi_{eps0}(omega_k h^{2/3}) e_k(x) e_k(a).
pub fn green_spectral(table: &AiryZeroTable, t: f64, x: f64, a: f64, p: &PhysParams) -> Result<Complex64> {
    Spectrum::new(table, p, Cutoff::Full)?.green(t, x, a)
}

/// G_{h,gamma}: the same sum with weight psi2(h^{2/3} omega_k / gamma).
pub fn green_dyadic(table: &AiryZeroTable, t: f64, x: f64, a: f64, gamma: f64, p: &PhysParams) -> Result<Complex64> {
    Spectrum::new(table, p, Cutoff::Dyadic(gamma))?.green(t, x, a)
}

/// Base and top pieces completing the dyadic partition.
pub fn green_base(table: &AiryZeroTable, t: f64, x: f64, a: f64, p: &PhysParams) -> Result<Complex64> {
    Spectrum::new(table, p, Cutoff::Base)?.green(t, x, a)
}

pub fn green_top(table: &AiryZeroTable, t: f64, x: f64, a: f64, p: &PhysParams) -> Result<Complex64> {
    Spectrum::new(table, p, Cutoff::Top)?.green(t, x, a)
}

/// 400 points on [0, 2a] plus 100 points on a +- 5 h^{2/3}, sorted.
pub fn default_x_grid(a: f64, h: f64) -> Vec<f64> {
    let mut xs: Vec<f64> = (0..400).map(|i| 2.0 * a * i as f64 / 399.0).collect();
    let w = 5.0 * h.powf(2.0 / 3.0);
    xs.extend((0..100).map(|i| (a - w + 2.0 * w * i as f64 / 99.0).clamp(0.0, 2.0 * a)));
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    xs
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanRow {
    pub t: f64,
    #[serde(rename = "T")]
    pub big_t: f64,
    pub sup_abs_g: f64,
    pub argmax_x: f64,
}

/// Number of local halving rounds around the coarse argmax.
pub const REFINE_ROUNDS: usize = 2;

/// sup_x |G(t, x, a)| for each t, x restricted to `x_grid`, then refined
/// around the argmax by repeated halving of the local spacing.
pub fn sup_norm_scan(spec: &Spectrum, a: f64, t_grid: &[f64], x_grid: &[f64]) -> Result<Vec<ScanRow>> {
    if t_grid.is_empty() || x_grid.is_empty() {
        return Err(Error::Parameter("empty t or x grid".into()));
    }
    let ea = spec.modes(a)?;
    let coeffs: Vec<Vec<f64>> =
        x_grid.par_iter().map(|&x| Ok(spec.coefficients(&spec.modes(x)?, &ea))).collect::<Result<_>>()?;
    let xmax = x_grid.iter().cloned().fold(f64::MIN, f64::max);
    let xmin = x_grid.iter().cloned().fold(f64::MAX, f64::min);
    t_grid
        .par_iter()
        .map(|&t| {
            let ph = spec.phases(t);
            let mut best = (0.0, x_grid[0], 0usize);
            for (i, c) in coeffs.iter().enumerate() {
                let v = Spectrum::sum(c, &ph).norm();
                if v > best.0 {
                    best = (v, x_grid[i], i);
                }
            }
            let i = best.2;
            let left = if i > 0 { x_grid[i] - x_grid[i - 1] } else { f64::INFINITY };
            let right = if i + 1 < x_grid.len() { x_grid[i + 1] - x_grid[i] } else { f64::INFINITY };
            let mut step = left.min(right);
            if !step.is_finite() {
                step = 0.0;
            }
            let (mut sup, mut xs) = (best.0, best.1);
            for _ in 0..REFINE_ROUNDS {
                step *= 0.5;
                let centre = xs;
                for x in [centre - step, centre + step] {
                    if step == 0.0 || x < xmin || x > xmax {
                        continue;
                    }
                    let v = Spectrum::sum(&spec.coefficients(&spec.modes(x)?, &ea), &ph).norm();
                    if v > sup {
                        sup = v;
                        xs = x;
                    }
                }
            }
            Ok(ScanRow { t, big_t: t / a.sqrt(), sup_abs_g: sup, argmax_x: xs })
        })
        .collect()
}

/// sup over `b_grid` of sum_{k <= L} omega_k^{-1/2} Ai(b - omega_k)^2, with
/// a golden-section refinement around the best grid point. Returns
/// (sup, sup / L^{1/3}, argmax b).
pub fn sobolev_airy_bound(table: &AiryZeroTable, l: usize, b_grid: &[f64]) -> Result<(f64, f64, f64)> {
    if l == 0 || l > table.k_max() {
        return Err(Error::Index { k: l, k_max: table.k_max() });
    }
    let entries = &table.entries()[..l];
    let eval = |b: f64| -> Result<f64> {
        let mut s = NeumaierSum::new();
        for e in entries {
            let y = b - e.omega_k;
            if y > 40.0 {
                continue;
            }
            let v = ai(y)?;
            s.add(v * v / e.omega_k.sqrt());
        }
        Ok(s.value())
    };
    let vals: Vec<f64> = b_grid.par_iter().map(|&b| eval(b)).collect::<Result<_>>()?;
    let (mut i_best, mut best) = (0usize, f64::MIN);
    for (i, v) in vals.iter().enumerate() {
        if *v > best {
            best = *v;
            i_best = i;
        }
    }
    let step = if b_grid.len() > 1 { (b_grid[1] - b_grid[0]).abs() } else { 0.0 };
    let mut b = b_grid[i_best];
    if step > 0.0 {
        // Golden-section search on the bracket around the best grid node.
        let g = 0.5 * (5f64.sqrt() - 1.0);
        let (mut lo, mut hi) = (b - step, b + step);
        let mut c = hi - g * (hi - lo);
        let mut d = lo + g * (hi - lo);
        let (mut fc, mut fd) = (eval(c)?, eval(d)?);
        while hi - lo > 1e-9 * step.max(1e-3) {
            if fc > fd {
                hi = d;
                d = c;
                fd = fc;
                c = hi - g * (hi - lo);
                fc = eval(c)?;
            } else {
                lo = c;
                c = d;
                fc = fd;
                d = lo + g * (hi - lo);
                fd = eval(d)?;
            }
        }
        for (x, v) in [(c, fc), (d, fd)] {
            if v > best {
                best = v;
                b = x;
            }
        }
    }
    Ok((best, best / (l as f64).cbrt(), b))
}

/// Uniform b grid on [omega_1 - 5, omega_L + 5].
pub fn default_b_grid(table: &AiryZeroTable, l: usize, step: f64) -> Result<Vec<f64>> {
    let lo = table.omega(1)? - 5.0;
    let hi = table.omega(l)? + 5.0;
    let n = ((hi - lo) / step).ceil() as usize;
    Ok((0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect())
}
