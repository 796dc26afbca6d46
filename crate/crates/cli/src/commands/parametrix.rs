use bouncing_core::bump::SUPPORT;
use bouncing_core::reflection::{green_reflection, PacketMethod, ReflectionConfig, MIN_LAMBDA_GAMMA};
use bouncing_core::spectral::green_dyadic;
use bouncing_core::{AiryZeroTable, Complex64, Error, PhysParams, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::path::Path;

use super::{check_ladder, csv_bytes, echo, zero_table, CommandOutput};
use crate::report::{Gate, Rule};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ParametrixConfig {
    pub a: f64,
    pub lambda: f64,
    pub eps0: f64,
    pub t0: f64,
    /// Dyadic frequencies; each must lie on the ladder for (h, a, eps0).
    pub gammas: Vec<f64>,
    /// Normalized times T = t / sqrt(a).
    pub t_grid: Vec<f64>,
    /// Heights as fractions x / a.
    pub x_grid: Vec<f64>,
    pub reflection: ReflectionConfig,
    pub max_median_gap: f64,
    pub max_doubling_change: f64,
}

impl Default for ParametrixConfig {
    fn default() -> Self {
        Self {
            a: 0.3,
            lambda: 100.0,
            eps0: 0.5,
            t0: 5.0,
            gammas: vec![0.3],
            t_grid: vec![1.5, 2.0, 3.0],
            x_grid: vec![1.0],
            reflection: ReflectionConfig { method: PacketMethod::Direct, ..Default::default() },
            max_median_gap: 5e-2,
            max_doubling_change: 1e-3,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ParametrixRow {
    pub h: f64,
    pub a: f64,
    pub lambda: f64,
    pub gamma: f64,
    pub t: f64,
    #[serde(rename = "T")]
    pub big_t: f64,
    pub x: f64,
    pub spectral_re: f64,
    pub spectral_im: f64,
    pub reflection_re: f64,
    pub reflection_im: f64,
    pub rel_gap: f64,
    pub window_doubling: f64,
    pub node_doubling: f64,
    pub packets: usize,
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}

impl ParametrixConfig {
    fn params(&self) -> Result<PhysParams> {
        if !(self.lambda > 0.0) {
            return Err(Error::Parameter("lambda: must be positive".into()));
        }
        PhysParams::new(self.a.powf(1.5) / self.lambda, self.a, self.eps0, self.t0)
    }

    fn validate(&self) -> Result<PhysParams> {
        let p = self.params()?;
        check_ladder("gammas", &self.gammas, None)?;
        check_ladder("t_grid", &self.t_grid, None)?;
        check_ladder("x_grid", &self.x_grid, None)?;
        if self.t_grid.iter().any(|&t| t <= 0.0) || self.x_grid.iter().any(|&x| x <= 0.0) {
            return Err(Error::Parameter("t_grid/x_grid: entries must be positive".into()));
        }
        for &g in &self.gammas {
            let lg = p.lambda_gamma(g);
            if lg < MIN_LAMBDA_GAMMA {
                return Err(Error::Parameter(format!(
                    "gammas: lambda_gamma = {lg:.4} < {MIN_LAMBDA_GAMMA} for gamma = {g}"
                )));
            }
        }
        Ok(p)
    }
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}

fn row(
    table: &AiryZeroTable,
    p: &PhysParams,
    cfg: &ParametrixConfig,
    g: f64,
    bt: f64,
    xf: f64,
) -> Result<ParametrixRow> {
    let (t, x) = (p.time_of(bt), xf * p.a);
    let spec = green_dyadic(table, t, x, p.a, g, p)?;
    let base = green_reflection(t, x, p.a, g, p, &cfg.reflection)?;
    let wide = ReflectionConfig { m_cut: 2.0 * cfg.reflection.m_cut, ..cfg.reflection };
    let fine = ReflectionConfig { node_scale: 2.0 * cfg.reflection.node_scale, ..cfg.reflection };
    let wide = green_reflection(t, x, p.a, g, p, &wide)?.green;
    let fine = green_reflection(t, x, p.a, g, p, &fine)?.green;
    Ok(ParametrixRow {
        h: p.h,
        a: p.a,
        lambda: p.lambda(),
        gamma: g,
        t,
        big_t: bt,
        x,
        spectral_re: spec.re,
        spectral_im: spec.im,
        reflection_re: base.green.re,
        reflection_im: base.green.im,
        rel_gap: rel(base.green, spec),
        window_doubling: rel(wide, base.green),
        node_doubling: rel(fine, base.green),
        packets: base.packets.len(),
    })
}

pub fn run(cfg: &ParametrixConfig, cache: Option<&Path>) -> Result<CommandOutput> {
    let p = cfg.validate()?;
    let gmax = cfg.gammas.iter().cloned().fold(0.0, f64::max);
    let k = AiryZeroTable::k_needed_for(SUPPORT * gmax.max(p.eps0) / p.h.powf(2.0 / 3.0)) + 2;
    let table = zero_table(cache, k)?;
    let cells: Vec<(f64, f64, f64)> = cfg
        .gammas
        .iter()
        .flat_map(|&g| cfg.t_grid.iter().flat_map(move |&bt| cfg.x_grid.iter().map(move |&xf| (g, bt, xf))))
        .collect();
    let rows: Vec<ParametrixRow> =
        cells.par_iter().map(|&(g, bt, xf)| row(&table, &p, cfg, g, bt, xf)).collect::<Result<_>>()?;

    let med = median(rows.iter().map(|r| r.rel_gap).collect());
    let wmax = rows.iter().map(|r| r.window_doubling).fold(0.0, f64::max);
    let nmax = rows.iter().map(|r| r.node_doubling).fold(0.0, f64::max);
    let gates = vec![
        Gate::new("median_rel_gap", Rule::AtMost, cfg.max_median_gap, 0.0, med),
        Gate::new("window_doubling", Rule::AtMost, cfg.max_doubling_change, 0.0, wmax),
        Gate::new("node_doubling", Rule::AtMost, cfg.max_doubling_change, 0.0, nmax),
    ];
    Ok(CommandOutput { config_echo: echo(cfg)?, gates, regressions: Vec::new(), csv: Some(csv_bytes(&rows)?) })
}
