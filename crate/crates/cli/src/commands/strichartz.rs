use bouncing_core::strichartz::{fit_ladder, strichartz_point, time_window, StrichartzConfig};
use bouncing_core::{Error, PhysParams, Result};
use serde::{Deserialize, Serialize};
use std::path::Path;

use super::{check_ladder, csv_bytes, echo, k_for_ladder, zero_table, CommandOutput};
use crate::report::{Gate, RegressionReport};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StrichartzScanConfig {
    pub h_ladder: Vec<f64>,
    pub a: f64,
    pub eps0: f64,
    pub t0: f64,
    pub scan: StrichartzConfig,
    pub loss_min: f64,
    pub loss_max: f64,
    /// The ledger slope against ln ln(1/h) must lie in (0, ledger_slope_max).
    pub ledger_slope_max: f64,
}

impl Default for StrichartzScanConfig {
    fn default() -> Self {
        Self {
            h_ladder: vec![1e-3, 5e-4, 2.5e-4],
            a: 0.3,
            eps0: 0.5,
            t0: 5.0,
            scan: StrichartzConfig::default(),
            loss_min: 1.0 / 6.0 - 0.03,
            loss_max: 0.25 - 0.02,
            ledger_slope_max: 2.0,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct StrichartzRow {
    pub h: f64,
    pub lambda: f64,
    pub q: f64,
    pub norm_q: f64,
    pub window_share: f64,
    pub ledger: f64,
    pub windows: String,
    pub nodes: usize,
}

pub fn run(cfg: &StrichartzScanConfig, cache: Option<&Path>) -> Result<CommandOutput> {
    check_ladder("h_ladder", &cfg.h_ladder, Some(4.0))?;
    if !(cfg.scan.q >= 1.0) || cfg.scan.nodes_per_unit_t == 0 {
        return Err(Error::Parameter("scan: need q >= 1 and nodes_per_unit_t >= 1".into()));
    }
    let params: Vec<PhysParams> =
        cfg.h_ladder.iter().map(|&h| PhysParams::new(h, cfg.a, cfg.eps0, cfg.t0)).collect::<Result<_>>()?;
    for p in &params {
        time_window(p)?;
    }
    let table = zero_table(cache, k_for_ladder(&cfg.h_ladder, cfg.eps0))?;
    let points = params.iter().map(|p| strichartz_point(&table, p, &cfg.scan)).collect::<Result<Vec<_>>>()?;
    let fit = fit_ladder(&points)?;

    let rows: Vec<StrichartzRow> = points
        .iter()
        .map(|pt| StrichartzRow {
            h: pt.h,
            lambda: pt.lambda,
            q: pt.q,
            norm_q: pt.norm_q,
            window_share: pt.window_share,
            ledger: pt.ledger,
            windows: pt.windows.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(" "),
            nodes: pt.nodes,
        })
        .collect();
    let mid = 0.5 * (cfg.loss_min + cfg.loss_max);
    let half = 0.5 * (cfg.loss_max - cfg.loss_min);
    let regs = vec![
        RegressionReport {
            name: "loss_exponent".into(),
            fitted_exponent: fit.loss,
            stderr: fit.loss_fit.stderr,
            points: points.iter().map(|p| (p.h.ln(), p.norm_q.ln())).collect(),
            target_exponent: mid,
            tolerance: half,
            pass: (fit.loss - mid).abs() <= half,
        },
        RegressionReport {
            name: "ledger_slope".into(),
            fitted_exponent: fit.ledger_slope,
            stderr: fit.ledger_fit.stderr,
            points: points.iter().map(|p| ((1.0 / p.h).ln().ln(), p.ledger.ln())).collect(),
            target_exponent: 0.5 * cfg.ledger_slope_max,
            tolerance: 0.5 * cfg.ledger_slope_max,
            pass: fit.ledger_slope > 0.0 && fit.ledger_slope < cfg.ledger_slope_max,
        },
    ];
    let mut ledger_gate = Gate::in_range("ledger_slope", 0.0, cfg.ledger_slope_max, fit.ledger_slope);
    ledger_gate.pass = regs[1].pass;
    let gates = vec![Gate::in_range("loss_exponent", cfg.loss_min, cfg.loss_max, fit.loss), ledger_gate];
    Ok(CommandOutput { config_echo: echo(cfg)?, gates, regressions: regs, csv: Some(csv_bytes(&rows)?) })
}
