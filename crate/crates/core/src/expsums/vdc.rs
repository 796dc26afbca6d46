//! Van der Corput derivative-test calculators (all constants set to 1),
//! empirical prefix-sum checks and the Abel-summation majorant.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::{phase_derivs, phase_f_reduced, Branch};
use crate::error::{Error, Result};
use crate::summation::ComplexSum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VdcVariant {
    Vdc2,
    /// Iterated Weyl differencing at order j >= 2.
    Generic(u32),
    Vdc3Sargos,
    Vdc4,
}

impl VdcVariant {
    pub fn order(self) -> u32 {
        match self {
            VdcVariant::Vdc2 => 2,
            VdcVariant::Generic(j) => j,
            VdcVariant::Vdc3Sargos => 3,
            VdcVariant::Vdc4 => 4,
        }
    }

    pub fn name(self) -> String {
        match self {
            VdcVariant::Vdc2 => "vdc2".into(),
            VdcVariant::Generic(j) => format!("vdc{j}-generic"),
            VdcVariant::Vdc3Sargos => "vdc3-sargos".into(),
            VdcVariant::Vdc4 => "vdc4".into(),
        }
    }
}

/// Bound on |sum_{l in I} e^{i f(l)}| for |I| = M and delta <= |f^(j)| <= gamma delta, with C = 1.
pub fn vdc_bound(variant: VdcVariant, m: f64, delta: f64) -> Result<f64> {
    if !(m >= 1.0) || !(delta > 0.0) {
        return Err(Error::Parameter(format!("need M >= 1 and delta > 0 (got M = {m}, delta = {delta})")));
    }
    Ok(match variant {
        VdcVariant::Vdc2 => m * delta.sqrt() + 1.0 / delta.sqrt(),
        VdcVariant::Generic(j) => {
            if j < 2 {
                return Err(Error::Parameter(format!("generic test needs j >= 2, got {j}")));
            }
            let e = 1.0 / (2f64.powi(j as i32) - 2.0);
            m * delta.powf(e) + m.powf(1.0 - 2f64.powi(2 - j as i32)) * delta.powf(-e)
        }
        VdcVariant::Vdc3Sargos => m * delta.powf(1.0 / 6.0) + delta.powf(-1.0 / 3.0),
        VdcVariant::Vdc4 => m * delta.powf(1.0 / 14.0) + m.powf(0.75) * delta.powf(-1.0 / 14.0),
    })
}

/// Two-sided envelope delta_j <= |f^(j)_tau| <= gamma_ratio delta_j of the eps = 0 phase on l in [0, lambda].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivativeEnvelope {
    pub j: u32,
    pub delta_j: f64,
    pub gamma_ratio: f64,
    /// Below this l the eps = +-1 corrections dominate and the envelope fails.
    pub valid_l_from: f64,
}

impl DerivativeEnvelope {
    /// |f^(j)| = |c_j| T lambda^{1-j} q^{2/3-j} with q in [1, 2], so the minimum sits at
    /// q = 2 and the ratio max/min is 2^{j - 2/3}.
    pub fn new(j: u32, big_t: f64, lambda: f64) -> Result<Self> {
        let c = match j {
            2 => 2.0 / 9.0,
            3 => 8.0 / 27.0,
            4 => 56.0 / 81.0,
            _ => return Err(Error::Parameter(format!("envelope order {j} not in {{2, 3, 4}}"))),
        };
        if !(big_t > 0.0) || !(lambda > 0.0) {
            return Err(Error::Parameter(format!("need T > 0 and lambda > 0 (got {big_t}, {lambda})")));
        }
        let spread = 2f64.powf(j as f64 - 2.0 / 3.0);
        Ok(DerivativeEnvelope {
            j,
            delta_j: c * big_t / lambda.powi(j as i32 - 1) / spread,
            gamma_ratio: spread,
            valid_l_from: lambda / big_t.powf(2.0 / (2.0 * j as f64 - 3.0)),
        })
    }
}

/// Phase families accepted by the empirical check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PhaseFamily {
    /// f^eps_tau(l) with tau = T lambda.
    FTau { big_t: f64, lambda: f64, eps: Branch },
    /// c l^p.
    Power { c: f64, p: f64 },
    /// f = 0; always rejected.
    Constant,
}

impl PhaseFamily {
    fn phase(&self, l: f64) -> Result<f64> {
        match *self {
            PhaseFamily::FTau { big_t, lambda, eps } => phase_f_reduced(big_t * lambda, lambda, l, eps),
            PhaseFamily::Power { c, p } => Ok((c * l.powf(p)).rem_euclid(2.0 * PI)),
            PhaseFamily::Constant => Ok(0.0),
        }
    }

    fn deriv(&self, l: f64, j: u32) -> Result<f64> {
        match *self {
            PhaseFamily::FTau { big_t, lambda, eps } => phase_derivs(big_t * lambda, lambda, l, eps, j),
            PhaseFamily::Power { c, p } => {
                let falling: f64 = (0..j).map(|i| p - i as f64).product();
                Ok(c * falling * l.powf(p - j as f64))
            }
            PhaseFamily::Constant => Ok(0.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VdcRow {
    #[serde(rename = "M")]
    pub m: u64,
    pub abs_sum: f64,
    pub bound: f64,
    pub ratio: f64,
    /// min |f^(j)| over the prefix.
    pub delta: f64,
    /// max / min |f^(j)| over the prefix.
    pub gamma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VdcTable {
    pub variant: String,
    pub j: u32,
    pub l1: u64,
    pub rows: Vec<VdcRow>,
    pub max_ratio: f64,
}

/// |sum_{l=l1}^{l1+M-1} e^{i f(l)}| for nested prefixes M in `ms`, against
/// vdc_bound with delta taken as the exact minimum of |f^(j)| on the prefix.
pub fn vdc_empirical_check(family: &PhaseFamily, l1: u64, ms: &[u64], variant: VdcVariant) -> Result<VdcTable> {
    let j = variant.order();
    if matches!(family, PhaseFamily::Constant) {
        return Err(Error::Parameter("constant phase has delta = 0".into()));
    }
    if let PhaseFamily::FTau { big_t, lambda, eps } = *family {
        if eps != Branch::Zero {
            let env = DerivativeEnvelope::new(j, big_t, lambda)?;
            if (l1 as f64) < env.valid_l_from {
                return Err(Error::Envelope(format!(
                    "eps = {eps:?} phase leaves the order-{j} envelope below l = {:.3}; range starts at {l1}",
                    env.valid_l_from
                )));
            }
        }
    }
    if l1 == 0 && matches!(family, PhaseFamily::Power { .. }) {
        return Err(Error::Parameter("power phase needs l1 >= 1".into()));
    }
    let mut ms = ms.to_vec();
    ms.sort_unstable();
    ms.dedup();
    let Some(&m_max) = ms.last() else {
        return Err(Error::Parameter("no prefix lengths given".into()));
    };
    if ms[0] == 0 {
        return Err(Error::Parameter("prefix lengths must be >= 1".into()));
    }
    let mut acc = ComplexSum::new();
    let (mut dmin, mut dmax) = (f64::INFINITY, 0.0f64);
    let mut rows = Vec::with_capacity(ms.len());
    let mut next = ms.iter().peekable();
    for i in 0..m_max {
        let l = (l1 + i) as f64;
        acc.add(Complex64::from_polar(1.0, family.phase(l)?));
        let d = family.deriv(l, j)?.abs();
        dmin = dmin.min(d);
        dmax = dmax.max(d);
        if next.peek() == Some(&&(i + 1)) {
            next.next();
            if !(dmin > 0.0) {
                return Err(Error::Parameter(format!("order-{j} derivative vanishes on the prefix")));
            }
            let abs_sum = acc.value().norm();
            let bound = vdc_bound(variant, (i + 1) as f64, dmin)?;
            rows.push(VdcRow { m: i + 1, abs_sum, bound, ratio: abs_sum / bound, delta: dmin, gamma: dmax / dmin });
        }
    }
    let max_ratio = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    Ok(VdcTable { variant: variant.name(), j, l1, rows, max_ratio })
}

/// Weight rules with a value and an envelope for consecutive differences.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AbelWeights {
    Constant(f64),
    /// lambda^{-1/6}/sqrt(l), differences lambda^{-1/6}/l^{3/2}.
    Model {
        lambda: f64,
    },
}

impl AbelWeights {
    pub fn value(&self, l: f64) -> f64 {
        match *self {
            AbelWeights::Constant(c) => c,
            AbelWeights::Model { lambda } => lambda.powf(-1.0 / 6.0) / l.sqrt(),
        }
    }

    pub fn diff(&self, l: f64) -> f64 {
        match *self {
            AbelWeights::Constant(_) => 0.0,
            AbelWeights::Model { lambda } => lambda.powf(-1.0 / 6.0) / (l * l.sqrt()),
        }
    }
}

/// psi(l2) B(l2) + sum_{l=l1}^{l2-1} |Delta psi_l| B(l), where B(l) bounds
/// |sum_{p=l1}^{l} e_p|.
pub fn abel_combine(weights: &AbelWeights, bound: impl Fn(u64) -> Result<f64>, l1: u64, l2: u64) -> Result<f64> {
    if l1 == 0 || l2 < l1 {
        return Err(Error::Parameter(format!("need 1 <= l1 <= l2 (got {l1}, {l2})")));
    }
    let mut total = weights.value(l2 as f64) * bound(l2)?;
    for l in l1..l2 {
        let d = weights.diff(l as f64);
        if d != 0.0 {
            total += d * bound(l)?;
        }
    }
    Ok(total)
}

/// Abel majorant of the model-weighted sum over [l1, l2] with one VdC variant
/// and the eps = 0 envelope of matching order.
pub fn abel_vdc_majorant(lambda: f64, big_t: f64, l1: u64, l2: u64, variant: VdcVariant) -> Result<f64> {
    let env = DerivativeEnvelope::new(variant.order(), big_t, lambda)?;
    abel_combine(&AbelWeights::Model { lambda }, |l| vdc_bound(variant, (l - l1 + 1) as f64, env.delta_j), l1, l2)
}

/// Second-derivative test on [lambda^{1/3}, lambda/T^{2/3}] and the third
/// beyond, up to lambda/2.
pub fn abel_split_majorant(lambda: f64, big_t: f64) -> Result<f64> {
    let l1 = lambda.cbrt().ceil() as u64;
    let end = (lambda / 2.0).floor() as u64;
    let seam = ((lambda / big_t.powf(2.0 / 3.0)).floor() as u64).clamp(l1, end);
    let mut total = abel_vdc_majorant(lambda, big_t, l1, seam, VdcVariant::Vdc2)?;
    if seam < end {
        total += abel_vdc_majorant(lambda, big_t, seam + 1, end, VdcVariant::Vdc3Sargos)?;
    }
    Ok(total)
}
