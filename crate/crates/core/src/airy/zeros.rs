use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::path::Path;

use super::{l_of_omega, l_prime};
use crate::error::{Error, Result};

/// One row of the zero table: Ai(-omega_k) = 0 and L'(omega_k).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroEntry {
    pub k: usize,
    pub omega_k: f64,
    #[serde(rename = "L_prime_k")]
    pub l_prime_k: f64,
}

/// Zeros omega_1 < omega_2 < ... of Ai(-omega). Read-only after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct AiryZeroTable {
    entries: Vec<ZeroEntry>,
}

pub const MAX_K: usize = 1_000_000;

/// Solves L(omega) = 2 pi k by Newton from (3 pi k/2)^{2/3}, falling back to
/// bisection on [0.8, 1.2] times the seed.
pub fn airy_zero(k: usize) -> Result<ZeroEntry> {
    if k == 0 {
        return Err(Error::Parameter("zero index starts at 1".into()));
    }
    let target = 2.0 * PI * k as f64;
    let seed = (1.5 * PI * k as f64).powf(2.0 / 3.0);
    let (mut lo, mut hi) = (0.8 * seed, 1.2 * seed);
    let f = |w: f64| l_of_omega(w).map(|l| l - target);
    if f(lo)? >= 0.0 || f(hi)? <= 0.0 {
        return Err(Error::Convergence { k });
    }
    let mut w = seed;
    let mut done = false;
    for _ in 0..200 {
        let r = f(w)?;
        if r == 0.0 {
            done = true;
            break;
        }
        if r < 0.0 {
            lo = w;
        } else {
            hi = w;
        }
        let mut next = w - r / l_prime(w)?;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        let step = (next - w).abs();
        w = next;
        if step <= 2.0 * f64::EPSILON * w || hi - lo <= 2.0 * f64::EPSILON * w {
            done = true;
            break;
        }
    }
    if !done {
        return Err(Error::Convergence { k });
    }
    Ok(ZeroEntry { k, omega_k: w, l_prime_k: l_prime(w)? })
}

pub fn airy_zeros(k_max: usize) -> Result<AiryZeroTable> {
    if !(1..=MAX_K).contains(&k_max) {
        return Err(Error::Parameter(format!("k_max = {k_max} outside [1, {MAX_K}]")));
    }
    let entries = (1..=k_max).into_par_iter().map(airy_zero).collect::<Result<Vec<_>>>()?;
    Ok(AiryZeroTable { entries })
}

impl AiryZeroTable {
    pub fn from_entries(entries: Vec<ZeroEntry>) -> Result<Self> {
        for (i, e) in entries.iter().enumerate() {
            if e.k != i + 1 {
                return Err(Error::Parameter(format!("row {i} has k = {}", e.k)));
            }
            if i > 0 && e.omega_k <= entries[i - 1].omega_k {
                return Err(Error::Parameter(format!("omega not increasing at k = {}", e.k)));
            }
        }
        Ok(Self { entries })
    }

    pub fn k_max(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[ZeroEntry] {
        &self.entries
    }

    pub fn get(&self, k: usize) -> Result<&ZeroEntry> {
        if k == 0 || k > self.entries.len() {
            return Err(Error::Index { k, k_max: self.entries.len() });
        }
        Ok(&self.entries[k - 1])
    }

    pub fn omega(&self, k: usize) -> Result<f64> {
        self.get(k).map(|e| e.omega_k)
    }

    pub fn l_prime(&self, k: usize) -> Result<f64> {
        self.get(k).map(|e| e.l_prime_k)
    }

    pub fn max_omega(&self) -> f64 {
        self.entries.last().map_or(0.0, |e| e.omega_k)
    }

    /// Smallest k with omega_k > bound, if the table reaches past it.
    pub fn first_above(&self, bound: f64) -> Option<usize> {
        let i = self.entries.partition_point(|e| e.omega_k <= bound);
        (i < self.entries.len()).then_some(i + 1)
    }

    /// Rough k needed so that omega_k exceeds `bound`.
    pub fn k_needed_for(bound: f64) -> usize {
        (bound.max(0.0).powf(1.5) / (1.5 * PI) + 2.0).ceil() as usize
    }

    /// Errors with the required k_max unless the table extends past `bound`.
    pub fn ensure_covers(&self, bound: f64) -> Result<()> {
        if self.first_above(bound).is_some() {
            Ok(())
        } else {
            Err(Error::Coverage { required: Self::k_needed_for(bound), available: self.k_max() })
        }
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        for e in &self.entries {
            w.serialize(e)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let mut r = csv::Reader::from_path(path)?;
        let entries = r.deserialize().collect::<std::result::Result<Vec<ZeroEntry>, _>>()?;
        Self::from_entries(entries)
    }

    /// Loads `path` if it holds at least `k_max` rows, otherwise builds and
    /// writes the table.
    pub fn load_or_build(path: &Path, k_max: usize) -> Result<Self> {
        if path.exists() {
            let t = Self::read_csv(path)?;
            if t.k_max() >= k_max {
                return Ok(t);
            }
        }
        let t = airy_zeros(k_max)?;
        t.write_csv(path)?;
        Ok(t)
    }

    /// Copy restricted to k <= k_max.
    pub fn truncated(&self, k_max: usize) -> Self {
        Self { entries: self.entries[..k_max.min(self.entries.len())].to_vec() }
    }
}
