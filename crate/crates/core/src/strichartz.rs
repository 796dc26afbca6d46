//! Time-integrated sup norms of the Green function below T = lambda^{1/3}:
//! the L^q-in-time loss on an h-ladder and the resonance ledger over the
//! windows I_N = (2N - 1/N, 2N + 1/N) in T.

use serde::{Deserialize, Serialize};

use crate::airy::AiryZeroTable;
use crate::error::{Error, Result};
use crate::params::PhysParams;
use crate::regression::{fit, LinearFit};
use crate::spectral::{default_x_grid, sup_norm_scan, Cutoff, ScanRow, Spectrum};

/// Left end of the integration window in T.
pub const T_START: f64 = 1.2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct StrichartzConfig {
    pub q: f64,
    /// Uniform time nodes per unit of T.
    pub nodes_per_unit_t: usize,
    /// Extra nodes inserted inside each I_N.
    pub window_nodes: usize,
}

impl Default for StrichartzConfig {
    fn default() -> Self {
        Self { q: 4.0, nodes_per_unit_t: 200, window_nodes: 40 }
    }
}

/// I_N in T units.
pub fn resonance_window(n: usize) -> (f64, f64) {
    let n = n as f64;
    (2.0 * n - 1.0 / n, 2.0 * n + 1.0 / n)
}

/// [T_START, min(t0/sqrt(a), lambda^{1/3})] in T units.
pub fn time_window(p: &PhysParams) -> Result<(f64, f64)> {
    let hi = (p.t0 / p.a.sqrt()).min(p.lambda().cbrt());
    if hi <= T_START {
        return Err(Error::Parameter(format!(
            "empty time window: T in [{T_START}, {hi:.4}] (a = {}, h = {}, t0 = {})",
            p.a, p.h, p.t0
        )));
    }
    Ok((T_START, hi))
}

/// Indices N whose whole window I_N lies below `t_hi`.
pub fn windows_below(t_hi: f64) -> Vec<usize> {
    (1..).take_while(|&n| resonance_window(n).1 < t_hi).collect()
}

/// Uniform T grid on [lo, hi] plus `extra` nodes inside each I_N that meets it; ascending.
pub fn time_grid(lo: f64, hi: f64, cfg: &StrichartzConfig) -> Vec<f64> {
    let n = ((hi - lo) * cfg.nodes_per_unit_t as f64).ceil().max(1.0) as usize;
    let mut ts: Vec<f64> = (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect();
    for w in 1.. {
        let (a, b) = resonance_window(w);
        if a >= hi {
            break;
        }
        for i in 1..=cfg.window_nodes {
            let t = a + (b - a) * i as f64 / (cfg.window_nodes + 1) as f64;
            if t > lo && t < hi {
                ts.push(t);
            }
        }
    }
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    ts
}

fn trapezoid(rows: &[&ScanRow], f: impl Fn(f64) -> f64) -> f64 {
    rows.windows(2).map(|w| 0.5 * (w[1].t - w[0].t) * (f(w[0].sup_abs_g) + f(w[1].sup_abs_g))).sum()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrichartzPoint {
    pub h: f64,
    pub lambda: f64,
    pub q: f64,
    /// (int sup_{x <= a} |G|^q dt)^{1/q} over the window.
    pub norm_q: f64,
    /// Fraction of int sup|G|^q dt coming from the windows I_N.
    pub window_share: f64,
    /// sum_N int_{I_N} (h^{2/3} sup_{x <= a} |G|)^2 dt over the N with I_N below lambda^{1/3}.
    pub ledger: f64,
    pub windows: Vec<usize>,
    pub nodes: usize,
}

/// Scans sup_{x <= a} |G^{eps0}_h(t, x, a)| over T in [1, lambda^{1/3}]; the
/// L^q norm uses the time window, the ledger every I_N below lambda^{1/3}.
pub fn strichartz_point(table: &AiryZeroTable, p: &PhysParams, cfg: &StrichartzConfig) -> Result<StrichartzPoint> {
    if !(cfg.q >= 1.0) || cfg.nodes_per_unit_t == 0 {
        return Err(Error::Parameter(format!("need q >= 1 and a nonempty time grid (got {cfg:?})")));
    }
    let (lo, hi) = time_window(p)?;
    let spec = Spectrum::new(table, p, Cutoff::Full)?;
    let xs: Vec<f64> = default_x_grid(p.a, p.h).into_iter().filter(|&x| x <= p.a).collect();
    // The ledger needs every I_N below lambda^{1/3}, even past t0.
    let scan_hi = p.lambda().cbrt();
    let big_ts = time_grid(lo.min(1.0), scan_hi, cfg);
    let ts: Vec<f64> = big_ts.iter().map(|&bt| p.time_of(bt)).collect();
    let rows = sup_norm_scan(&spec, p.a, &ts, &xs)?;

    let in_window = |bt: f64, n: usize| {
        let (a, b) = resonance_window(n);
        bt >= a && bt <= b
    };
    let windows = windows_below(scan_hi);
    let main: Vec<&ScanRow> = rows.iter().filter(|r| r.big_t >= lo - 1e-12 && r.big_t <= hi + 1e-12).collect();
    let q = cfg.q;
    let total = trapezoid(&main, |g| g.powf(q));
    let mut resonant = 0.0;
    for n in 1.. {
        let (a, _) = resonance_window(n);
        if a >= hi {
            break;
        }
        let part: Vec<&ScanRow> = main.iter().copied().filter(|r| in_window(r.big_t, n)).collect();
        resonant += trapezoid(&part, |g| g.powf(q));
    }
    let h23 = p.h.powf(2.0 / 3.0);
    let mut ledger = 0.0;
    for &n in &windows {
        let part: Vec<&ScanRow> = rows.iter().filter(|r| in_window(r.big_t, n)).collect();
        ledger += trapezoid(&part, |g| (h23 * g).powi(2));
    }
    Ok(StrichartzPoint {
        h: p.h,
        lambda: p.lambda(),
        q,
        norm_q: total.powf(1.0 / q),
        window_share: resonant / total,
        ledger,
        windows,
        nodes: rows.len(),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct StrichartzFit {
    /// beta - 1/2 where norm_q ~ h^{-beta}; 1/2 is the free-space exponent.
    pub loss: f64,
    pub loss_fit: LinearFit,
    /// Slope of ln(ledger) against ln ln(1/h); 1 for exact ln(1/h) growth.
    pub ledger_slope: f64,
    pub ledger_fit: LinearFit,
}

pub fn fit_ladder(points: &[StrichartzPoint]) -> Result<StrichartzFit> {
    if points.len() < 2 {
        return Err(Error::Parameter("need at least two h values".into()));
    }
    let loss_fit = fit(&points.iter().map(|p| (p.h.ln(), p.norm_q.ln())).collect::<Vec<_>>());
    let ledger_fit = fit(&points.iter().map(|p| ((1.0 / p.h).ln().ln(), p.ledger.ln())).collect::<Vec<_>>());
    Ok(StrichartzFit { loss: -loss_fit.slope - 0.5, ledger_slope: ledger_fit.slope, loss_fit, ledger_fit })
}
