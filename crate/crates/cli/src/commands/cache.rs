use bouncing_core::{Error, Result};
use serde::{Deserialize, Serialize};
use std::path::Path;

use super::{echo, zero_table, CommandOutput};
use crate::report::{Gate, Rule};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CacheConfig {
    pub k_max: usize,
}

impl Default for CacheConfig {
    fn default() -> Self {
        Self { k_max: 5000 }
    }
}

pub fn run(cfg: &CacheConfig, cache: Option<&Path>) -> Result<CommandOutput> {
    let path = cache.ok_or_else(|| Error::Parameter("build-cache needs --cache <path>".into()))?;
    if cfg.k_max == 0 {
        return Err(Error::Parameter("k_max: must be >= 1".into()));
    }
    let t = zero_table(Some(path), cfg.k_max)?;
    Ok(CommandOutput {
        config_echo: echo(cfg)?,
        gates: vec![Gate::new("k_max_covered", Rule::AtLeast, cfg.k_max as f64, 0.0, t.k_max() as f64)],
        regressions: Vec::new(),
        csv: None,
    })
}
