use bouncing_core::regression::fit;
use bouncing_core::spectral::{default_x_grid, sup_norm_scan, Cutoff, Spectrum};
use bouncing_core::{Error, PhysParams, Result};
use serde::{Deserialize, Serialize};
use std::path::Path;

use super::{check_ladder, csv_bytes, echo, k_for_ladder, zero_table, CommandOutput};
use crate::report::{Gate, RegressionReport, Rule};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DispersionConfig {
    pub h_ladder: Vec<f64>,
    pub a: f64,
    pub eps0: f64,
    pub t0: f64,
    /// Normalized times T = t / sqrt(a).
    pub t_grid: Vec<f64>,
    pub resonant_t: f64,
    pub off_resonant_t: f64,
    pub resonant_exponent: f64,
    pub off_resonant_exponent: f64,
    pub tolerance: f64,
    /// Lower bound on |G(T_res, a, a)| / |G(T_off, a, a)| at every h.
    pub min_peak_ratio: f64,
}

impl Default for DispersionConfig {
    fn default() -> Self {
        Self {
            h_ladder: vec![1e-3, 5e-4, 2.5e-4],
            a: 0.3,
            eps0: 0.5,
            t0: 5.0,
            t_grid: (0..=20).map(|i| 1.0 + 0.1 * i as f64).collect(),
            resonant_t: 2.0,
            off_resonant_t: 2.7,
            resonant_exponent: 0.25,
            off_resonant_exponent: 1.0 / 3.0,
            tolerance: 0.05,
            min_peak_ratio: 2.0,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DispersionRow {
    pub h: f64,
    pub a: f64,
    pub lambda: f64,
    pub t: f64,
    #[serde(rename = "T")]
    pub big_t: f64,
    #[serde(rename = "sup_abs_G")]
    pub sup_abs_g: f64,
    pub argmax_x: f64,
    pub bound_quarter: f64,
    pub bound_sixth: f64,
    pub regime_label: &'static str,
}

/// "resonant" when dist(T, 2N) < 1/(4 T^2) for some N >= 1.
pub fn regime_label(big_t: f64) -> &'static str {
    let n = (big_t / 2.0).round().max(1.0);
    if (big_t - 2.0 * n).abs() < 0.25 / (big_t * big_t) {
        "resonant"
    } else {
        "off-resonant"
    }
}

impl DispersionConfig {
    fn validate(&self) -> Result<()> {
        check_ladder("h_ladder", &self.h_ladder, Some(4.0))?;
        check_ladder("t_grid", &self.t_grid, None)?;
        if self.t_grid.iter().any(|&t| t <= 0.0) {
            return Err(Error::Parameter("t_grid: times must be positive".into()));
        }
        if !(self.resonant_t > 0.0 && self.off_resonant_t > 0.0) {
            return Err(Error::Parameter("resonant_t/off_resonant_t: must be positive".into()));
        }
        if !(self.tolerance >= 0.0) {
            return Err(Error::Parameter("tolerance: must be >= 0".into()));
        }
        for &h in &self.h_ladder {
            PhysParams::new(h, self.a, self.eps0, self.t0)?;
        }
        Ok(())
    }
}

pub fn run(cfg: &DispersionConfig, cache: Option<&Path>) -> Result<CommandOutput> {
    cfg.validate()?;
    let table = zero_table(cache, k_for_ladder(&cfg.h_ladder, cfg.eps0))?;
    let mut big_ts = cfg.t_grid.clone();
    big_ts.extend([cfg.resonant_t, cfg.off_resonant_t]);
    big_ts.sort_by(f64::total_cmp);
    big_ts.dedup();

    let mut rows = Vec::new();
    let mut res_pts = Vec::new();
    let mut off_pts = Vec::new();
    let mut peak_ratios = Vec::new();
    for &h in &cfg.h_ladder {
        let p = PhysParams::new(h, cfg.a, cfg.eps0, cfg.t0)?;
        let spec = Spectrum::new(&table, &p, Cutoff::Full)?;
        let ts: Vec<f64> = big_ts.iter().map(|&bt| p.time_of(bt)).collect();
        let scan = sup_norm_scan(&spec, p.a, &ts, &default_x_grid(p.a, h))?;
        for (r, &bt) in scan.iter().zip(&big_ts) {
            rows.push(DispersionRow {
                h,
                a: p.a,
                lambda: p.lambda(),
                t: r.t,
                big_t: bt,
                sup_abs_g: r.sup_abs_g,
                argmax_x: r.argmax_x,
                bound_quarter: (h * p.a / r.t).powf(0.25) / h,
                bound_sixth: h.powf(-2.0 / 3.0),
                regime_label: regime_label(bt),
            });
            if bt == cfg.resonant_t {
                res_pts.push((h.ln(), (h * r.sup_abs_g).ln()));
            }
            if bt == cfg.off_resonant_t {
                off_pts.push((h.ln(), (h * r.sup_abs_g).ln()));
            }
        }
        let at = |bt: f64| spec.green(p.time_of(bt), p.a, p.a).map(|g| g.norm());
        peak_ratios.push(at(cfg.resonant_t)? / at(cfg.off_resonant_t)?);
    }

    let regression = |name: &str, pts: Vec<(f64, f64)>, target: f64| {
        let f = fit(&pts);
        RegressionReport {
            name: name.into(),
            fitted_exponent: f.slope,
            stderr: f.stderr,
            points: pts,
            target_exponent: target,
            tolerance: cfg.tolerance,
            pass: (f.slope - target).abs() <= cfg.tolerance,
        }
    };
    let regs = vec![
        regression("resonant_exponent", res_pts, cfg.resonant_exponent),
        regression("off_resonant_exponent", off_pts, cfg.off_resonant_exponent),
    ];
    let mut gates: Vec<Gate> = regs
        .iter()
        .map(|r| Gate::new(r.name.clone(), Rule::Within, r.target_exponent, r.tolerance, r.fitted_exponent))
        .collect();
    let min_ratio = peak_ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    gates.push(Gate::new("peak_ratio_at_x_eq_a", Rule::AtLeast, cfg.min_peak_ratio, 0.0, min_ratio));
    Ok(CommandOutput { config_echo: echo(cfg)?, gates, regressions: regs, csv: Some(csv_bytes(&rows)?) })
}
