use bouncing_core::expsums::{vdc_bound, vdc_empirical_check, Branch, PhaseFamily, VdcVariant};
use bouncing_core::{Error, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::{check_ladder, csv_bytes, echo, CommandOutput};
use crate::report::{Gate, Rule};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VdcConfig {
    pub variants: Vec<VdcVariant>,
    /// (M, delta) cells for the calculator rows.
    pub calculator_cells: Vec<(f64, f64)>,
    pub optimal_m: f64,
    /// Empirical grid: f^0_tau with tau = T lambda, prefixes starting at each l1.
    pub big_ts: Vec<f64>,
    pub lambdas: Vec<f64>,
    pub l1s: Vec<u64>,
    pub ms: Vec<u64>,
    pub c_fit: f64,
    /// The c l^{3/2} cell: prefix [M, 2M] against the Sargos bound.
    pub sharpness_m: u64,
    pub sharpness_range: (f64, f64),
}

impl Default for VdcConfig {
    fn default() -> Self {
        Self {
            variants: vec![VdcVariant::Vdc2, VdcVariant::Generic(3), VdcVariant::Vdc3Sargos, VdcVariant::Vdc4],
            calculator_cells: vec![(100.0, 0.01), (1e3, 1e-3), (1e4, 1e-4)],
            optimal_m: 2500.0,
            big_ts: vec![1.0, 10.0, 100.0, 1e3, 1e4],
            lambdas: vec![1e4, 1e5],
            l1s: vec![0, 1000],
            ms: vec![10, 30, 100, 300, 1000, 3000, 10_000],
            c_fit: 3.0,
            sharpness_m: 10_000,
            sharpness_range: (0.1, 3.0),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VdcCsvRow {
    pub kind: &'static str,
    pub variant: String,
    #[serde(rename = "M")]
    pub m: f64,
    pub delta: f64,
    pub bound: f64,
    pub abs_sum: Option<f64>,
    pub ratio: Option<f64>,
    #[serde(rename = "T")]
    pub big_t: Option<f64>,
    pub lambda: Option<f64>,
    pub l1: Option<u64>,
}

impl VdcCsvRow {
    fn calculator(kind: &'static str, v: VdcVariant, m: f64, delta: f64) -> Result<Self> {
        let bound = vdc_bound(v, m, delta)?;
        Ok(Self {
            kind,
            variant: v.name(),
            m,
            delta,
            bound,
            abs_sum: None,
            ratio: None,
            big_t: None,
            lambda: None,
            l1: None,
        })
    }
}

/// Values worked out by hand from the closed forms.
fn hand_values() -> [(VdcVariant, f64, f64, f64); 3] {
    [
        (VdcVariant::Vdc2, 100.0, 0.01, 20.0),
        (VdcVariant::Vdc3Sargos, 1e3, 1e-3, 1000.0 / 10f64.sqrt() + 10.0),
        (VdcVariant::Generic(3), 1e4, 1e-4, 1e4 * 10f64.powf(-2.0 / 3.0) + 1e2 * 10f64.powf(2.0 / 3.0)),
    ]
}

pub fn run(cfg: &VdcConfig) -> Result<CommandOutput> {
    if cfg.variants.is_empty() {
        return Err(Error::Parameter("variants: empty".into()));
    }
    check_ladder("big_ts", &cfg.big_ts, None)?;
    check_ladder("lambdas", &cfg.lambdas, None)?;
    if cfg.ms.is_empty() || cfg.l1s.is_empty() {
        return Err(Error::Parameter("ms/l1s: empty".into()));
    }
    let mut rows = Vec::new();
    let mut gates = Vec::new();
    for &(m, d) in &cfg.calculator_cells {
        for &v in &cfg.variants {
            rows.push(VdcCsvRow::calculator("calculator", v, m, d)?);
        }
    }
    for (v, m, d, want) in hand_values() {
        let got = vdc_bound(v, m, d)?;
        gates.push(Gate::new(format!("hand_{}_M{m}", v.name()), Rule::Within, want, 1e-9 * want, got));
    }
    let m = cfg.optimal_m;
    let opt = VdcCsvRow::calculator("optimal-delta", VdcVariant::Vdc2, m, 1.0 / m)?;
    gates.push(Gate::new("vdc2_optimal_delta", Rule::Within, 2.0 * m.sqrt(), 1e-9 * m.sqrt(), opt.bound));
    rows.push(opt);

    let cells: Vec<(VdcVariant, f64, f64, u64)> = cfg
        .variants
        .iter()
        .flat_map(|&v| {
            cfg.big_ts.iter().flat_map(move |&t| {
                cfg.lambdas.iter().flat_map(move |&lam| cfg.l1s.iter().map(move |&l1| (v, t, lam, l1)))
            })
        })
        .collect();
    let tables: Vec<_> = cells
        .par_iter()
        .map(|&(v, t, lam, l1)| {
            let fam = PhaseFamily::FTau { big_t: t, lambda: lam, eps: Branch::Zero };
            vdc_empirical_check(&fam, l1, &cfg.ms, v).map(|tab| (v, t, lam, l1, tab))
        })
        .collect::<Result<_>>()?;
    for &v in &cfg.variants {
        let worst = tables.iter().filter(|x| x.0 == v).map(|x| x.4.max_ratio).fold(0.0, f64::max);
        gates.push(Gate::new(format!("c_fit_{}", v.name()), Rule::AtMost, cfg.c_fit, 0.0, worst));
    }
    for (v, t, lam, l1, tab) in &tables {
        rows.extend(tab.rows.iter().map(|r| VdcCsvRow {
            kind: "empirical",
            variant: v.name(),
            m: r.m as f64,
            delta: r.delta,
            bound: r.bound,
            abs_sum: Some(r.abs_sum),
            ratio: Some(r.ratio),
            big_t: Some(*t),
            lambda: Some(*lam),
            l1: Some(*l1),
        }));
    }

    let ms = cfg.sharpness_m;
    let c = 4.0 * PI / (3.0 * 3f64.sqrt());
    let tab = vdc_empirical_check(&PhaseFamily::Power { c, p: 1.5 }, ms, &[ms + 1], VdcVariant::Vdc3Sargos)?;
    let r = tab.rows[0];
    let (lo, hi) = cfg.sharpness_range;
    gates.push(Gate::in_range("sharpness_vdc3", lo, hi, r.ratio));
    rows.push(VdcCsvRow {
        kind: "sharpness",
        variant: tab.variant,
        m: r.m as f64,
        delta: r.delta,
        bound: r.bound,
        abs_sum: Some(r.abs_sum),
        ratio: Some(r.ratio),
        big_t: None,
        lambda: None,
        l1: Some(ms),
    });
    Ok(CommandOutput { config_echo: echo(cfg)?, gates, regressions: Vec::new(), csv: Some(csv_bytes(&rows)?) })
}
