pub mod cache;
pub mod dispersion;
pub mod expsum;
pub mod parametrix;
pub mod strichartz;
pub mod vdc;

use bouncing_core::bump::SUPPORT;
use bouncing_core::{AiryZeroTable, Error, Result};
use serde::Serialize;
use std::path::Path;

use crate::report::{Gate, RegressionReport};

/// What a command hands back before anything touches the disk.
#[derive(Debug, Clone)]
pub struct CommandOutput {
    pub config_echo: serde_json::Value,
    pub gates: Vec<Gate>,
    pub regressions: Vec<RegressionReport>,
    pub csv: Option<Vec<u8>>,
}

pub(crate) fn echo<T: Serialize>(cfg: &T) -> Result<serde_json::Value> {
    serde_json::to_value(cfg).map_err(|e| Error::Parameter(format!("config echo: {e}")))
}

pub(crate) fn csv_bytes<R: Serialize>(rows: &[R]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    w.into_inner().map_err(|e| Error::Io(e.to_string()))
}

/// Zero table with at least `k_max` entries, from the cache if one is given.
pub(crate) fn zero_table(cache: Option<&Path>, k_max: usize) -> Result<AiryZeroTable> {
    match cache {
        Some(p) => AiryZeroTable::load_or_build(p, k_max),
        None => bouncing_core::airy::airy_zeros(k_max),
    }
}

/// k_max covering the spectral cutoff phi(h^{2/3} omega / eps0) for every h.
pub(crate) fn k_for_ladder(h_ladder: &[f64], eps0: f64) -> usize {
    let h_min = h_ladder.iter().cloned().fold(f64::INFINITY, f64::min);
    AiryZeroTable::k_needed_for(SUPPORT * eps0 / h_min.powf(2.0 / 3.0)) + 2
}

/// Non-empty, strictly monotone, and (for regressions) spanning a factor >= 4.
pub(crate) fn check_ladder(name: &str, xs: &[f64], min_span: Option<f64>) -> Result<()> {
    if xs.is_empty() {
        return Err(Error::Parameter(format!("{name}: empty")));
    }
    let inc = xs.windows(2).all(|w| w[1] > w[0]);
    let dec = xs.windows(2).all(|w| w[1] < w[0]);
    if !(inc || dec) {
        return Err(Error::Parameter(format!("{name}: not strictly ordered")));
    }
    if xs.iter().any(|x| !x.is_finite()) {
        return Err(Error::Parameter(format!("{name}: non-finite entry")));
    }
    if let Some(span) = min_span {
        let (lo, hi) = xs.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &x| (a.min(x), b.max(x)));
        if xs.len() < 2 || hi / lo < span * (1.0 - 1e-9) {
            return Err(Error::Parameter(format!("{name}: regression needs >= 2 values spanning a factor {span}")));
        }
    }
    Ok(())
}

pub(crate) fn parse<T: serde::de::DeserializeOwned + Default>(json: Option<&str>) -> Result<T> {
    match json {
        None => Ok(T::default()),
        Some(s) => serde_json::from_str(s).map_err(|e| Error::Parameter(format!("config: {e}"))),
    }
}
