//! Sieve run configuration, read from TOML.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modp::is_prime;
use crate::roots::Precision;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SieveConfig {
    pub n: usize,
    pub s: u64,
    pub t: u64,
    pub m_list: Vec<u64>,
    /// Pre-sieve bound: primes below it are tested mod p.
    #[serde(rename = "M")]
    pub big_m: u64,
    #[serde(default)]
    pub precision: Precision,
    /// Maximum number of raw candidates processed.
    pub budget: u64,
    /// Output path stem; `<out>.csv` and `<out>.jsonl` are written.
    #[serde(default)]
    pub out: Option<String>,
    /// Reduction threshold for the `a_{n-2}` guard; no guard when absent.
    #[serde(default)]
    pub rho_b: Option<f64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_shards")]
    pub shards: usize,
    /// Restricts `a_0` to a sub-range of `(s/2, s]`, for split runs.
    #[serde(default)]
    pub a0_range: Option<(u64, u64)>,
}

fn default_shards() -> usize {
    1
}

fn is_squarefree(m: u64) -> bool {
    let mut d = 2u64;
    let mut x = m;
    while d * d <= x {
        if x % (d * d) == 0 {
            return false;
        }
        if x % d == 0 {
            x /= d;
        }
        d += 1;
    }
    true
}

impl SieveConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: SieveConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.n < 3 {
            return bad(format!("degree {} below 3", self.n));
        }
        if self.s < 3 {
            return bad("s must be at least 3 so that 1 <= a_1 < s/2 is nonempty".into());
        }
        if self.t == 0 {
            return bad("t must be positive".into());
        }
        if self.big_m < 2 {
            return bad("M must be at least 2".into());
        }
        if self.m_list.is_empty() {
            return bad("m_list is empty".into());
        }
        if let Some(&m) = self.m_list.iter().find(|&&m| m == 0 || !is_squarefree(m)) {
            return bad(format!("m = {m} is not a positive squarefree integer"));
        }
        if self.shards == 0 {
            return bad("shards must be positive".into());
        }
        if let Some((lo, hi)) = self.a0_range {
            if lo > hi {
                return bad(format!("empty a0_range [{lo}, {hi}]"));
            }
        }
        if let Some(r) = self.rho_b {
            if !(r.is_finite() && r > 0.0) {
                return bad(format!("rho_b = {r} is not a positive number"));
            }
        }
        Ok(())
    }

    /// Primes below `M`.
    pub fn small_primes(&self) -> Vec<u64> {
        (2..self.big_m).filter(|&p| is_prime(p)).collect()
    }
}
