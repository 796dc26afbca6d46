//! Exponential sums E_lambda(T, X) over k ~ lambda, their branch
//! decomposition into sums over l with phases f^eps_tau, Van der Corput
//! calculators and the regime table.

pub mod regime;
pub mod vdc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use twofloat::TwoFloat;

use crate::airy::{a_plus_with_derivative, ai, l_prime, AiryZeroTable};
use crate::error::{Error, Result};
use crate::summation::ComplexSum;

pub use regime::{dispersion_loss, regime_bound, regime_formula, worst_case_loss, R3Seam, Regime, RegimeBound};
pub use vdc::{
    abel_combine, abel_split_majorant, abel_vdc_majorant, vdc_bound, vdc_empirical_check, AbelWeights,
    DerivativeEnvelope, PhaseFamily, VdcRow, VdcTable, VdcVariant,
};

/// Largest tau for which double-double phase reduction keeps ~1e-16 absolute accuracy.
pub const MAX_TAU: f64 = 1e14;
/// Desk cap on the number of terms in one sum.
pub const MAX_TERMS: f64 = 1e7;

/// Phase branch: 0 for the A+ A- cross term, +1 / -1 for A+^2 / A-^2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Zero,
    Plus,
    Minus,
}

impl Branch {
    pub const ALL: [Branch; 3] = [Branch::Zero, Branch::Plus, Branch::Minus];

    pub fn sign(self) -> f64 {
        match self {
            Branch::Zero => 0.0,
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }
}

/// (1 + u)^{2/3} - 1 without cancellation at small u.
fn rel_growth(u: f64) -> f64 {
    (2.0 / 3.0 * u.ln_1p()).exp_m1()
}

/// Airy-side term (4/3) ((lambda + l)^{2/3} - lambda^{2/3})^{3/2}.
fn airy_term(lambda: f64, l: f64) -> f64 {
    let z = lambda.powf(2.0 / 3.0) * rel_growth(l / lambda);
    4.0 / 3.0 * z * z.sqrt()
}

/// ((lambda + l)/lambda)^{2/3} in double-double: f64 guess plus one Newton
/// step on r^3 lambda^2 = (lambda + l)^2. Only the correction term is divided,
/// so its (single-word) accuracy does not matter.
fn ratio_23_dd(lambda: f64, l: f64) -> TwoFloat {
    let big = TwoFloat::from(lambda) + TwoFloat::from(l);
    let lam2 = TwoFloat::new_mul(lambda, lambda);
    let r0 = TwoFloat::from(1.0 + rel_growth(l / lambda));
    let resid = r0 * r0 * r0 * lam2 - big * big;
    r0 - TwoFloat::from(resid.hi() / (3.0 * r0.hi() * r0.hi() * lambda * lambda))
}

/// x mod 2 pi in double-double, returned in [0, 2 pi).
fn reduce_dd(x: TwoFloat) -> f64 {
    let tau = twofloat::consts::TAU;
    let r = x - tau * (x / tau).floor();
    let v = r.hi() + r.lo();
    if v >= 2.0 * PI {
        v - 2.0 * PI
    } else if v < 0.0 {
        v + 2.0 * PI
    } else {
        v
    }
}

/// f_tau(l) = tau ((lambda + l)/lambda)^{2/3} plus eps (4/3)((lambda+l)^{2/3} - lambda^{2/3})^{3/2}.
pub fn phase_f(tau: f64, lambda: f64, l: f64, eps: Branch) -> f64 {
    let base = tau * (1.0 + rel_growth(l / lambda));
    match eps {
        Branch::Zero => base,
        _ => base + eps.sign() * airy_term(lambda, l),
    }
}

/// phase_f reduced mod 2 pi with the tau part carried in double-double.
pub fn phase_f_reduced(tau: f64, lambda: f64, l: f64, eps: Branch) -> Result<f64> {
    if tau > MAX_TAU {
        return Err(Error::Precision { tau });
    }
    let mut x = TwoFloat::from(tau) * ratio_23_dd(lambda, l);
    if eps != Branch::Zero {
        x += TwoFloat::from(eps.sign() * airy_term(lambda, l));
    }
    Ok(reduce_dd(x))
}

/// j-th derivative in l (j in {2, 3, 4}), signed. With q = 1 + l/lambda and
/// w = q^{2/3} - 1:
///   f_tau:     -(2/9), +(8/27), -(56/81) times tau lambda^{-j} q^{2/3 - j}
///   eps part:  lambda^{1-j} times
///     j = 2:  4 / (9 q^{4/3} w^{1/2})
///     j = 3:  4 (4 - 5 q^{2/3}) / (27 q^{7/3} w^{3/2})
///     j = 4:  4 (40 q^{4/3} - 65 q^{2/3} + 28) / (81 q^{10/3} w^{5/2})
pub fn phase_derivs(tau: f64, lambda: f64, l: f64, eps: Branch, j: u32) -> Result<f64> {
    let c = match j {
        2 => -2.0 / 9.0,
        3 => 8.0 / 27.0,
        4 => -56.0 / 81.0,
        _ => return Err(Error::Parameter(format!("derivative order {j} not in {{2, 3, 4}}"))),
    };
    let q = 1.0 + l / lambda;
    let base = c * tau / lambda.powi(j as i32) * q.powf(2.0 / 3.0 - j as f64);
    if eps == Branch::Zero {
        return Ok(base);
    }
    if l <= 0.0 {
        return Err(Error::Domain(format!("eps-branch derivatives need l > 0, got {l}")));
    }
    let w = rel_growth(l / lambda);
    let q23 = q.powf(2.0 / 3.0);
    let corr = match j {
        2 => 4.0 / (9.0 * q.powf(4.0 / 3.0) * w.sqrt()),
        3 => 4.0 * (4.0 - 5.0 * q23) / (27.0 * q.powf(7.0 / 3.0) * w * w.sqrt()),
        _ => 4.0 * (40.0 * q23 * q23 - 65.0 * q23 + 28.0) / (81.0 * q.powf(10.0 / 3.0) * w * w * w.sqrt()),
    };
    Ok(base + eps.sign() * corr / lambda.powi(j as i32 - 1))
}

/// Summation grid in l.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IndexGrid {
    /// l = l1, l1 + 1, ..., l2.
    Integer,
    /// l_k = (3 pi / 2)(k - 1/4) - lambda for integer k, so that
    /// (lambda + l_k)^{2/3} is the leading asymptotic of omega_k.
    Airy,
}

/// Weights psi^eps_l.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightRule {
    Constant(f64),
    /// lambda^{-1/6} / sqrt(l).
    Model,
    /// psi^+ = A+(z)^2 e^{-i (4/3) z^{3/2}} / L'(omega), psi^- = conj(psi^+),
    /// psi^0 = 2 |A+(z)|^2 / L'(omega), with omega = (lambda + l)^{2/3} and
    /// z = omega - lambda^{2/3}.
    AiryExact,
}

impl WeightRule {
    pub fn weight(&self, lambda: f64, l: f64, eps: Branch) -> Result<Complex64> {
        match *self {
            WeightRule::Constant(c) => Ok(Complex64::new(c, 0.0)),
            WeightRule::Model => {
                if l <= 0.0 {
                    return Err(Error::Domain(format!("model weight needs l > 0, got {l}")));
                }
                Ok(Complex64::new(lambda.powf(-1.0 / 6.0) / l.sqrt(), 0.0))
            }
            WeightRule::AiryExact => {
                let l23 = lambda.powf(2.0 / 3.0);
                let z = l23 * rel_growth(l / lambda);
                let omega = l23 + z;
                let (ap, _) = a_plus_with_derivative(z)?;
                let lp = l_prime(omega)?;
                Ok(match eps {
                    Branch::Zero => Complex64::new(2.0 * ap.norm_sqr() / lp, 0.0),
                    Branch::Plus => ap * ap * Complex64::from_polar(1.0 / lp, -4.0 / 3.0 * z * z.sqrt()),
                    Branch::Minus => (ap * ap).conj() * Complex64::from_polar(1.0 / lp, 4.0 / 3.0 * z * z.sqrt()),
                })
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpSumSpec {
    pub lambda: f64,
    #[serde(rename = "T")]
    pub big_t: f64,
    pub epsilon: Branch,
    pub l1: f64,
    pub l2: f64,
    pub weights: WeightRule,
    pub grid: IndexGrid,
}

impl ExpSumSpec {
    pub fn tau(&self) -> f64 {
        self.big_t * self.lambda
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.lambda > 0.0
            && self.big_t >= 0.0
            && self.l1 >= 1.0
            && self.l2 >= self.l1
            && self.l2 <= self.lambda
            && self.big_t.is_finite();
        if !ok {
            return Err(Error::Parameter(format!("need lambda > 0, T >= 0, 1 <= l1 <= l2 <= lambda (got {self:?})")));
        }
        if self.l2 - self.l1 > MAX_TERMS {
            return Err(Error::Parameter(format!("{} terms exceed the desk cap", self.l2 - self.l1)));
        }
        if self.tau() > MAX_TAU {
            return Err(Error::Precision { tau: self.tau() });
        }
        Ok(())
    }

    /// Points l of the grid inside [l1, l2], ascending.
    pub fn points(&self) -> Vec<f64> {
        match self.grid {
            IndexGrid::Integer => {
                let (a, b) = (self.l1.ceil() as u64, self.l2.floor() as u64);
                (a..=b).map(|l| l as f64).collect()
            }
            IndexGrid::Airy => {
                airy_index_range(self.lambda, self.l1, self.l2).map(|k| airy_index_l(self.lambda, k)).collect()
            }
        }
    }
}

/// l_k = (3 pi/2)(k - 1/4) - lambda.
pub fn airy_index_l(lambda: f64, k: u64) -> f64 {
    1.5 * PI * (k as f64 - 0.25) - lambda
}

/// Indices k with l_k in [l1, l2].
pub fn airy_index_range(lambda: f64, l1: f64, l2: f64) -> std::ops::RangeInclusive<u64> {
    let lo = ((lambda + l1) / (1.5 * PI) + 0.25).ceil().max(1.0) as u64;
    let hi = ((lambda + l2) / (1.5 * PI) + 0.25).floor().max(0.0) as u64;
    lo..=hi
}

/// sum_l psi^eps_l e^{i f^eps_tau(l)} with compensated accumulation in ascending l.
pub fn direct_sum(spec: &ExpSumSpec) -> Result<Complex64> {
    spec.validate()?;
    let tau = spec.tau();
    let terms: Vec<Complex64> = spec
        .points()
        .par_iter()
        .map(|&l| {
            let w = spec.weights.weight(spec.lambda, l, spec.epsilon)?;
            Ok(w * Complex64::from_polar(1.0, phase_f_reduced(tau, spec.lambda, l, spec.epsilon)?))
        })
        .collect::<Result<_>>()?;
    let mut acc = ComplexSum::new();
    for t in terms {
        acc.add(t);
    }
    Ok(acc.value())
}

/// k-range of E_lambda: (3 pi/2)(k - 1/4) in [lambda/2, 2 lambda].
pub fn e_lambda_range(lambda: f64) -> std::ops::RangeInclusive<u64> {
    airy_index_range(lambda, -0.5 * lambda, lambda)
}

fn e_lambda_terms(
    table: &AiryZeroTable,
    big_t: f64,
    x: f64,
    lambda: f64,
    ks: std::ops::RangeInclusive<u64>,
) -> Result<Complex64> {
    if !(lambda > 0.0) || !(big_t >= 0.0) || !(x >= 0.0) {
        return Err(Error::Parameter(format!("need lambda > 0, T >= 0, X >= 0 (got {lambda}, {big_t}, {x})")));
    }
    let hi = *ks.end() as usize;
    if hi > table.k_max() {
        return Err(Error::Coverage { required: hi, available: table.k_max() });
    }
    let l23 = lambda.powf(2.0 / 3.0);
    let freq = big_t * lambda.cbrt();
    if freq * table.omega(hi.max(1))? > MAX_TAU {
        return Err(Error::Precision { tau: freq * table.omega(hi.max(1))? });
    }
    let terms: Vec<Complex64> = ks
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&k| {
            let e = table.get(k as usize)?;
            let amp = ai(x * l23 - e.omega_k)? * ai(l23 - e.omega_k)? / e.l_prime_k;
            let ph = reduce_dd(TwoFloat::new_mul(freq, e.omega_k));
            Ok(Complex64::from_polar(amp, ph))
        })
        .collect::<Result<_>>()?;
    let mut acc = ComplexSum::new();
    for t in terms {
        acc.add(t);
    }
    Ok(acc.value())
}

/// E_lambda(T, X) = sum_{k ~ lambda} e^{i T lambda^{1/3} omega_k} Ai(X lambda^{2/3} - omega_k) Ai(lambda^{2/3} - omega_k) / L'(omega_k)
/// with table zeros.
pub fn e_lambda(table: &AiryZeroTable, big_t: f64, x: f64, lambda: f64) -> Result<Complex64> {
    e_lambda_terms(table, big_t, x, lambda, e_lambda_range(lambda))
}

/// E_lambda(T, 1) split as in the branch decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BranchAssembly {
    /// Exact spectral terms with l_k < lambda^{1/3} (the "O(1)" piece).
    pub small_l: Complex64,
    /// direct_sum over l_k in [lambda^{1/3}, lambda] for eps = 0, +1, -1.
    pub branches: [Complex64; 3],
    pub total: Complex64,
}

pub fn assemble_e_lambda(table: &AiryZeroTable, big_t: f64, lambda: f64) -> Result<BranchAssembly> {
    let l_split = lambda.cbrt();
    let full = e_lambda_range(lambda);
    let first_branch = *airy_index_range(lambda, l_split, lambda).start();
    let small_l = if first_branch > *full.start() {
        e_lambda_terms(table, big_t, 1.0, lambda, *full.start()..=first_branch - 1)?
    } else {
        Complex64::new(0.0, 0.0)
    };
    let mut branches = [Complex64::new(0.0, 0.0); 3];
    for (b, eps) in branches.iter_mut().zip(Branch::ALL) {
        *b = direct_sum(&ExpSumSpec {
            lambda,
            big_t,
            epsilon: eps,
            l1: l_split,
            l2: lambda,
            weights: WeightRule::AiryExact,
            grid: IndexGrid::Airy,
        })?;
    }
    let total = small_l + branches.iter().sum::<Complex64>();
    Ok(BranchAssembly { small_l, branches, total })
}
