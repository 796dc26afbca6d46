//! Reflection form of the dyadic Green function: a sum over the number N of
//! boundary reflections of wave packets V_{N,h,gamma}.
//!
//! Units: `WavePacket::value` is V_{N,h,gamma}, normalised so that
//! G_{h,gamma} = (1/h) sum_N V_{N,h,gamma}. With lambda = lambda_gamma,
//! T = t/sqrt(gamma), X = x/gamma, A = a/gamma the exact N-th term is
//!
//!   V_N / h = gamma h^{-4/3} int e^{-iN L(lambda^{2/3} alpha)} e^{i lambda T alpha}
//!             psi2(alpha) Ai(lambda^{2/3}(X - alpha)) Ai(lambda^{2/3}(A - alpha)) d alpha,
//!
//! and writing both Airy factors as integrals over sigma and s gives the
//! prefactor gamma^2 / ((2 pi)^2 h^2) in front of the triple integral.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::ops::RangeInclusive;

use crate::airy::{ai, l_of_omega};
use crate::bump::{phi, psi2};
use crate::error::{Error, Result};
use crate::params::PhysParams;
use crate::quadrature::GaussLegendre;
use crate::summation::ComplexSum;

/// Alpha-window of psi2.
pub const ALPHA_MIN: f64 = 0.5;
pub const ALPHA_MAX: f64 = 1.5;
/// Smallest lambda_gamma for which packets are evaluated.
pub const MIN_LAMBDA_GAMMA: f64 = 10.0;

/// Cutoff chi: 1 on [-2/3, 2/3], supported in [-1, 1].
pub fn chi(u: f64) -> f64 {
    phi(1.5 * u)
}

/// Phase Phi_{N,a,gamma}(alpha, s, sigma; t, x) without the B correction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReflectionPhase {
    pub n: usize,
    pub gamma: f64,
    pub t: f64,
    pub x: f64,
    pub a: f64,
}

impl ReflectionPhase {
    pub fn value(&self, alpha: f64, s: f64, sigma: f64) -> f64 {
        let g = self.gamma;
        let g32 = g * g.sqrt();
        self.t * g * alpha
            + g32
                * (sigma.powi(3) / 3.0 + sigma * (self.x / g - alpha) + s.powi(3) / 3.0 + s * (self.a / g - alpha)
                    - 4.0 / 3.0 * self.n as f64 * alpha * alpha.sqrt())
    }

    pub fn d_sigma(&self, alpha: f64, sigma: f64) -> f64 {
        let g = self.gamma;
        g * g.sqrt() * (sigma * sigma + self.x / g - alpha)
    }

    pub fn d_s(&self, alpha: f64, s: f64) -> f64 {
        let g = self.gamma;
        g * g.sqrt() * (s * s + self.a / g - alpha)
    }

    pub fn d_alpha(&self, alpha: f64, s: f64, sigma: f64) -> f64 {
        let g = self.gamma;
        g * g.sqrt() * (self.t / g.sqrt() - (sigma + s) - 2.0 * self.n as f64 * alpha.sqrt())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaCritical {
    pub alpha: f64,
    /// alpha lies in the psi2 window [1/2, 3/2].
    pub in_window: bool,
}

/// sqrt(alpha_c) = t/(2N sqrt(gamma)) - (s + sigma)/(2N).
pub fn alpha_critical(sigma: f64, s: f64, t: f64, gamma: f64, n: usize) -> Result<AlphaCritical> {
    if n == 0 {
        return Err(Error::Parameter("alpha critical point needs N >= 1".into()));
    }
    if !(t > 0.0 && gamma > 0.0) {
        return Err(Error::Parameter(format!("need t, gamma > 0, got t = {t}, gamma = {gamma}")));
    }
    let nf = n as f64;
    let root = t / (2.0 * nf * gamma.sqrt()) - (s + sigma) / (2.0 * nf);
    if root <= 0.0 {
        return Err(Error::NoCriticalPoint(format!("sqrt(alpha) = {root} at N = {n}")));
    }
    let alpha = root * root;
    Ok(AlphaCritical { alpha, in_window: (ALPHA_MIN..=ALPHA_MAX).contains(&alpha) })
}

/// Reflection indices kept: 0..=floor(M_cut t / sqrt(gamma)).
pub fn n_window(t: f64, gamma: f64, m_cut: f64) -> RangeInclusive<usize> {
    let top = (m_cut * t / gamma.sqrt()).floor().max(0.0) as usize;
    0..=top
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RegimeTag {
    /// N = 0, free flow.
    Free,
    LargeN,
    Far,
    Near,
    Transverse,
}

impl RegimeTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            RegimeTag::Free => "free",
            RegimeTag::LargeN => "large-N",
            RegimeTag::Far => "far",
            RegimeTag::Near => "near",
            RegimeTag::Transverse => "transverse",
        }
    }
}

/// Per-packet bound with all constants set to 1, for the tangential case
/// gamma ~ a (x/a <= 1).
///
/// - N >= lambda^{1/3}: h^{1/3} / ((N/lambda^{1/3})^{1/2} + lambda^{1/6} sqrt(4N) |K-1|^{1/2})
/// - N < lambda^{1/3}, |K-1| >= 1/N^2: h^{1/3} / (1 + 2N |K-1|^{1/2})
/// - N < lambda^{1/3}, |K-1| <= 1/(4N^2): h^{1/3} / ((N/lambda^{1/3})^{1/4} + N^{1/3} |K-1|^{1/6})
/// - in between: the larger of the two small-N bounds.
pub fn packet_bound(n: usize, lambda: f64, k: f64, h: f64) -> (f64, RegimeTag) {
    assert!(n >= 1, "packet bounds are stated for N >= 1");
    let nf = n as f64;
    let h13 = h.cbrt();
    let l13 = lambda.cbrt();
    let dk = (k - 1.0).abs();
    if nf >= l13 {
        return (h13 / ((nf / l13).sqrt() + lambda.powf(1.0 / 6.0) * (4.0 * nf).sqrt() * dk.sqrt()), RegimeTag::LargeN);
    }
    let far = h13 / (1.0 + 2.0 * nf * dk.sqrt());
    let near = h13 / ((nf / l13).powf(0.25) + nf.cbrt() * dk.powf(1.0 / 6.0));
    if dk >= 1.0 / (nf * nf) {
        (far, RegimeTag::Far)
    } else if dk <= 0.25 / (nf * nf) || near >= far {
        (near, RegimeTag::Near)
    } else {
        (far, RegimeTag::Far)
    }
}

/// Transverse packets (gamma >= 4a): (gamma^2/h) (N lambda_gamma)^{-1/2} / lambda_gamma.
pub fn transverse_bound(n: usize, gamma: f64, h: f64) -> f64 {
    let lg = gamma.powf(1.5) / h;
    gamma * gamma / h / (n as f64 * lg).sqrt() / lg
}

/// N = 0: free semiclassical flow, |V_0| ~ (h/t)^{1/2}.
pub fn free_bound(t: f64, h: f64) -> f64 {
    (h / t).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PacketMethod {
    /// Leading-order stationary phase in alpha, 2D quadrature in (sigma, s).
    StationaryPhase,
    /// Triple integral by quadrature: alpha on a grid, sigma and s integrated
    /// numerically with the chi cutoffs, phase with L replaced by its
    /// asymptotic form (4/3)u + pi/2 - B(u).
    Direct,
    /// 1D alpha integral with the exact L and Airy factors (diagnostic).
    AlphaExact,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ReflectionConfig {
    pub m_cut: f64,
    /// Panels per unit length per unit of lambda_gamma (scaled by the local
    /// phase gradient); doubling it doubles the node count per axis.
    pub node_scale: f64,
    pub nodes_per_panel: usize,
    /// Coefficient of the B phase, e^{i N b1 / (lambda alpha^{3/2})}.
    pub b1: f64,
    pub method: PacketMethod,
}

impl Default for ReflectionConfig {
    fn default() -> Self {
        Self {
            m_cut: 3.0,
            node_scale: 1.0,
            nodes_per_panel: 16,
            b1: crate::airy::B1,
            method: PacketMethod::StationaryPhase,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WavePacket {
    #[serde(rename = "N")]
    pub n: usize,
    pub gamma: f64,
    /// V_{N,h,gamma}(t, x); the Green function is (1/h) sum_N value.
    pub value: Complex64,
    #[serde(rename = "K")]
    pub k: f64,
    pub bound_theory: f64,
    pub regime_tag: RegimeTag,
    /// No alpha critical point in the window anywhere in the box.
    pub empty: bool,
}

fn check(t: f64, x: f64, a: f64, gamma: f64, p: &PhysParams) -> Result<f64> {
    p.validate()?;
    let lg = p.lambda_gamma(gamma);
    if lg < MIN_LAMBDA_GAMMA {
        return Err(Error::Parameter(format!("lambda_gamma = {lg:.3} < {MIN_LAMBDA_GAMMA} for gamma = {gamma}")));
    }
    if !(t > 0.0) || x < 0.0 || a < 0.0 {
        return Err(Error::Parameter(format!("need t > 0 and x, a >= 0 (t = {t}, x = {x}, a = {a})")));
    }
    Ok(lg)
}

/// Breakpoints on [lo, hi] so that each panel spans at most `rad` radians
/// of a phase whose gradient is bounded by `grad(u)`.
fn adaptive_breaks(lo: f64, hi: f64, rad: f64, grad: impl Fn(f64) -> f64) -> Vec<f64> {
    let mut b = vec![lo];
    let mut u = lo;
    while u < hi {
        let step = (rad / grad(u).max(1e-12)).min(hi - u);
        // the bound is increasing in |u|, so re-check at the far end
        let step = (rad / grad(u + step).max(grad(u)).max(1e-12)).min(hi - u);
        u += step.max(1e-9);
        b.push(u.min(hi));
    }
    b
}

fn nodes_on(rule: &GaussLegendre, breaks: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let mut xs = Vec::new();
    let mut ws = Vec::new();
    for w in breaks.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let (m, r) = (0.5 * (lo + hi), 0.5 * (hi - lo));
        for (x, wt) in rule.nodes.iter().zip(&rule.weights) {
            xs.push(m + r * x);
            ws.push(r * wt);
        }
    }
    (xs, ws)
}

const RAD_PER_PANEL: f64 = 10.0;

#[allow(clippy::too_many_arguments)]
fn stationary_phase_packet(
    n: usize,
    big_t: f64,
    xr: f64,
    ar: f64,
    lg: f64,
    gamma: f64,
    h: f64,
    cfg: &ReflectionConfig,
) -> (Complex64, bool) {
    let nf = n as f64;
    let smax = 2.0 * ALPHA_MAX.sqrt();
    // Band where sqrt(alpha_c) is inside the window: T - sigma - s in 2N [sqrt(1/2), sqrt(3/2)].
    let band_lo = big_t - 2.0 * nf * ALPHA_MAX.sqrt();
    let band_hi = big_t - 2.0 * nf * ALPHA_MIN.sqrt();
    if band_hi <= -2.0 * smax || band_lo >= 2.0 * smax {
        return (Complex64::new(0.0, 0.0), true);
    }
    let rule = GaussLegendre::new(cfg.nodes_per_panel);
    let rad = RAD_PER_PANEL / cfg.node_scale;
    let grad = |u: f64, c: f64| lg * (u * u + c).abs().max(ALPHA_MAX);
    let (sig, wsig) = nodes_on(&rule, &adaptive_breaks(-smax, smax, rad, |u| grad(u.abs(), xr)));
    let (ss, wss) = nodes_on(&rule, &adaptive_breaks(-smax, smax, rad, |u| grad(u.abs(), ar)));
    let s_phase: Vec<Complex64> =
        ss.iter().zip(&wss).map(|(&s, &w)| Complex64::from_polar(w, lg * (s * s * s / 3.0 + s * ar))).collect();

    let rows: Vec<Complex64> = sig
        .par_iter()
        .zip(wsig.par_iter())
        .map(|(&sigma, &wsg)| {
            let mut acc = ComplexSum::new();
            let lo = band_lo - sigma;
            let hi = band_hi - sigma;
            let start = ss.partition_point(|&s| s <= lo);
            for j in start..ss.len() {
                let s = ss[j];
                if s >= hi {
                    break;
                }
                let r = (big_t - sigma - s) / (2.0 * nf);
                let alpha = r * r;
                let cut = chi(sigma / (2.0 * r)) * chi(s / (2.0 * r));
                if cut == 0.0 {
                    continue;
                }
                let amp = psi2(alpha);
                if amp == 0.0 {
                    continue;
                }
                let a32 = alpha * r;
                let mut ph = lg * (2.0 / 3.0) * nf * a32;
                if cfg.b1 != 0.0 {
                    ph += nf * cfg.b1 / (lg * a32);
                }
                acc.add(Complex64::from_polar(amp * r.sqrt() * cut, ph) * s_phase[j]);
            }
            acc.value() * Complex64::from_polar(wsg, lg * (sigma * sigma * sigma / 3.0 + sigma * xr))
        })
        .collect();
    let mut total = ComplexSum::new();
    for r in rows {
        total.add(r);
    }
    let pref = gamma * gamma / (4.0 * PI * PI * h * h) * (2.0 * PI / (lg * nf)).sqrt();
    let rot = Complex64::from_polar(1.0, -(nf * FRAC_PI_2 + FRAC_PI_4));
    (total.value() * rot * pref * h, false)
}

/// Samples of the exact alpha integrand, shared by all N at fixed (x, a).
struct AlphaSamples {
    l: Vec<f64>,
    /// weight * psi2 * Ai * Ai * gamma h^{-4/3}
    base: Vec<f64>,
    alpha: Vec<f64>,
}

/// Alpha nodes on the psi2 window. The integrand phase moves at most like
/// lambda (T + 2 (N_max + 1) sqrt(3/2)) per unit alpha.
fn alpha_nodes(big_t: f64, n_max: usize, lg: f64, cfg: &ReflectionConfig) -> (Vec<f64>, Vec<f64>) {
    let rule = GaussLegendre::new(cfg.nodes_per_panel);
    let rad = RAD_PER_PANEL / cfg.node_scale;
    let grad = lg * (big_t + 2.0 * (n_max as f64 + 1.0) * ALPHA_MAX.sqrt()).max(1.0);
    nodes_on(&rule, &adaptive_breaks(ALPHA_MIN, ALPHA_MAX, rad, |_| grad))
}

fn alpha_samples(
    xr: f64,
    ar: f64,
    lg: f64,
    gamma: f64,
    h: f64,
    (al, wal): (Vec<f64>, Vec<f64>),
) -> Result<AlphaSamples> {
    let l23 = lg.powf(2.0 / 3.0);
    let pref = gamma / (h * h.cbrt());
    let mut l = Vec::with_capacity(al.len());
    let mut base = Vec::with_capacity(al.len());
    for (&alpha, &w) in al.iter().zip(&wal) {
        l.push(l_of_omega(l23 * alpha)?);
        base.push(pref * w * psi2(alpha) * ai(l23 * (xr - alpha))? * ai(l23 * (ar - alpha))?);
    }
    Ok(AlphaSamples { l, base, alpha: al })
}

fn alpha_exact_packet(s: &AlphaSamples, n: usize, big_t: f64, lg: f64, h: f64) -> Complex64 {
    let mut acc = ComplexSum::new();
    for ((&l, &b), &alpha) in s.l.iter().zip(&s.base).zip(&s.alpha) {
        acc.add(Complex64::from_polar(b, lg * big_t * alpha - n as f64 * l));
    }
    acc.value() * h
}

#[allow(clippy::too_many_arguments)]
fn make_packet(
    n: usize,
    t: f64,
    x: f64,
    a: f64,
    gamma: f64,
    p: &PhysParams,
    value: Complex64,
    empty: bool,
) -> WavePacket {
    let lg = p.lambda_gamma(gamma);
    let big_t = t / gamma.sqrt();
    if n == 0 {
        return WavePacket {
            n,
            gamma,
            value,
            k: f64::INFINITY,
            bound_theory: free_bound(t, p.h),
            regime_tag: RegimeTag::Free,
            empty,
        };
    }
    let k = (big_t / (2.0 * n as f64)).sqrt();
    let (bound_theory, regime_tag) = if gamma >= 4.0 * a * (1.0 - 1e-12) && x <= a {
        (transverse_bound(n, gamma, p.h), RegimeTag::Transverse)
    } else {
        packet_bound(n, lg, k, p.h)
    };
    WavePacket { n, gamma, value, k, bound_theory, regime_tag, empty }
}

/// N = 0 term: exact alpha integral (no alpha critical point to expand about).
fn free_packet(t: f64, xr: f64, ar: f64, lg: f64, gamma: f64, h: f64, cfg: &ReflectionConfig) -> Result<Complex64> {
    let big_t = t / gamma.sqrt();
    let s = alpha_samples(xr, ar, lg, gamma, h, alpha_nodes(big_t, 0, lg, cfg))?;
    Ok(alpha_exact_packet(&s, 0, big_t, lg, h))
}

/// Cutoff sigma-integrals int chi(sigma/(2 sqrt(alpha))) e^{i lambda (sigma^3/3 + sigma (c - alpha))} d sigma
/// on the alpha nodes.
fn cutoff_airy_integrals(c: f64, alphas: &[f64], lg: f64, cfg: &ReflectionConfig) -> Vec<Complex64> {
    let rule = GaussLegendre::new(cfg.nodes_per_panel);
    let rad = RAD_PER_PANEL / cfg.node_scale;
    let smax = 2.0 * ALPHA_MAX.sqrt();
    let (sig, w) = nodes_on(&rule, &adaptive_breaks(-smax, smax, rad, |u| lg * (u * u + c).abs().max(ALPHA_MAX)));
    let base: Vec<Complex64> =
        sig.iter().zip(&w).map(|(&s, &w)| Complex64::from_polar(w, lg * (s * s * s / 3.0 + s * c))).collect();
    alphas
        .par_iter()
        .map(|&alpha| {
            let r2 = 2.0 * alpha.sqrt();
            let mut acc = ComplexSum::new();
            for (&s, &b) in sig.iter().zip(&base) {
                let cut = chi(s / r2);
                if cut != 0.0 {
                    acc.add(b * Complex64::from_polar(cut, -lg * s * alpha));
                }
            }
            acc.value()
        })
        .collect()
}

/// Triple-integral samples shared by all N: weight * psi2 * F_X * F_A * gamma^2/(2 pi h)^2.
struct DirectSamples {
    alpha: Vec<f64>,
    base: Vec<Complex64>,
}

fn direct_samples(
    xr: f64,
    ar: f64,
    lg: f64,
    gamma: f64,
    h: f64,
    nodes: (Vec<f64>, Vec<f64>),
    cfg: &ReflectionConfig,
) -> DirectSamples {
    let (al, wal) = nodes;
    let fx = cutoff_airy_integrals(xr, &al, lg, cfg);
    let fa = if ar == xr { fx.clone() } else { cutoff_airy_integrals(ar, &al, lg, cfg) };
    let pref = gamma * gamma / (4.0 * PI * PI * h * h);
    let base = al
        .iter()
        .zip(&wal)
        .zip(fx.iter().zip(&fa))
        .map(|((&alpha, &w), (&f1, &f2))| f1 * f2 * (pref * w * psi2(alpha)))
        .collect();
    DirectSamples { alpha: al, base }
}

fn direct_packet(s: &DirectSamples, n: usize, big_t: f64, lg: f64, h: f64, b1: f64) -> Complex64 {
    let nf = n as f64;
    let mut acc = ComplexSum::new();
    for (&alpha, &b) in s.alpha.iter().zip(&s.base) {
        if b == Complex64::new(0.0, 0.0) {
            continue;
        }
        let a32 = alpha * alpha.sqrt();
        let mut ph = lg * (big_t * alpha - 4.0 / 3.0 * nf * a32) - nf * FRAC_PI_2;
        if n > 0 && b1 != 0.0 {
            ph += nf * b1 / (lg * a32);
        }
        acc.add(b * Complex64::from_polar(1.0, ph));
    }
    acc.value() * h
}

/// V_{N,h,gamma}(t, x) with initial point a.
pub fn v_packet(
    n: usize,
    t: f64,
    x: f64,
    a: f64,
    gamma: f64,
    p: &PhysParams,
    cfg: &ReflectionConfig,
) -> Result<WavePacket> {
    let lg = check(t, x, a, gamma, p)?;
    let (xr, ar, big_t) = (x / gamma, a / gamma, t / gamma.sqrt());
    let (value, empty) = if n == 0 {
        (free_packet(t, xr, ar, lg, gamma, p.h, cfg)?, false)
    } else {
        match cfg.method {
            PacketMethod::StationaryPhase => stationary_phase_packet(n, big_t, xr, ar, lg, gamma, p.h, cfg),
            PacketMethod::AlphaExact => {
                let s = alpha_samples(xr, ar, lg, gamma, p.h, alpha_nodes(big_t, n, lg, cfg))?;
                (alpha_exact_packet(&s, n, big_t, lg, p.h), false)
            }
            PacketMethod::Direct => {
                let s = direct_samples(xr, ar, lg, gamma, p.h, alpha_nodes(big_t, n, lg, cfg), cfg);
                (direct_packet(&s, n, big_t, lg, p.h, cfg.b1), false)
            }
        }
    };
    Ok(make_packet(n, t, x, a, gamma, p, value, empty))
}

#[derive(Debug, Clone)]
pub struct ReflectionSum {
    /// (1/h) sum_N V_N, comparable with the dyadic spectral sum.
    pub green: Complex64,
    pub packets: Vec<WavePacket>,
}

/// Sum of packets over `n_window`, in ascending N.
pub fn green_reflection(
    t: f64,
    x: f64,
    a: f64,
    gamma: f64,
    p: &PhysParams,
    cfg: &ReflectionConfig,
) -> Result<ReflectionSum> {
    let lg = check(t, x, a, gamma, p)?;
    let window: Vec<usize> = n_window(t, gamma, cfg.m_cut).collect();
    let (xr, ar, big_t) = (x / gamma, a / gamma, t / gamma.sqrt());
    let n_max = *window.last().unwrap_or(&0);
    let packets: Vec<WavePacket> = match cfg.method {
        PacketMethod::Direct => {
            let s = direct_samples(xr, ar, lg, gamma, p.h, alpha_nodes(big_t, n_max, lg, cfg), cfg);
            window
                .iter()
                .map(|&n| make_packet(n, t, x, a, gamma, p, direct_packet(&s, n, big_t, lg, p.h, cfg.b1), false))
                .collect()
        }
        PacketMethod::AlphaExact => {
            let s = alpha_samples(xr, ar, lg, gamma, p.h, alpha_nodes(big_t, n_max, lg, cfg))?;
            window
                .iter()
                .map(|&n| make_packet(n, t, x, a, gamma, p, alpha_exact_packet(&s, n, big_t, lg, p.h), false))
                .collect()
        }
        PacketMethod::StationaryPhase => {
            window.iter().map(|&n| v_packet(n, t, x, a, gamma, p, cfg)).collect::<Result<_>>()?
        }
    };
    let mut acc = ComplexSum::new();
    for pk in &packets {
        acc.add(pk.value);
    }
    Ok(ReflectionSum { green: acc.value() / p.h, packets })
}
