//! Sieve reports: counters, dedupe maps, weighted sums and serialisation.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::forms::BinaryForm;
use crate::reduce::CanonicalKey;

/// Weighted sums are fixed point with this many decimal digits.
pub const WEIGHT_DIGITS: u32 = 30;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Counts {
    pub candidates: u64,
    pub gcd_filtered: u64,
    pub presieved: u64,
    pub uwd: u64,
    pub reduced: u64,
    /// Candidates whose factorisation or numerics could not be completed.
    pub unresolved: u64,
}

impl Counts {
    fn add(&mut self, o: &Counts) {
        self.candidates += o.candidates;
        self.gcd_filtered += o.gcd_filtered;
        self.presieved += o.presieved;
        self.uwd += o.uwd;
        self.reduced += o.reduced;
        self.unresolved += o.unresolved;
    }
}

/// A deduped ring: one witness pair and `disc(R') = disc(f)/m^2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Representative {
    pub form: BinaryForm,
    pub l: u64,
    pub disc: BigInt,
}

impl Representative {
    fn order_key(&self) -> (&[BigInt], u64) {
        (self.form.coeffs(), self.l)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MReport {
    pub m: u64,
    pub counts: Counts,
    pub reps: BTreeMap<CanonicalKey, Representative>,
}

impl MReport {
    pub fn empty(m: u64) -> Self {
        MReport { m, counts: Counts::default(), reps: BTreeMap::new() }
    }

    /// Keeps the least `(coefficients, l)` per key so merges are order independent.
    pub fn insert(&mut self, key: CanonicalKey, rep: Representative) {
        match self.reps.get(&key) {
            Some(old) if old.order_key() <= rep.order_key() => {}
            _ => {
                self.reps.insert(key, rep);
            }
        }
    }

    pub fn merge(&mut self, other: MReport) {
        debug_assert_eq!(self.m, other.m);
        self.counts.add(&other.counts);
        for (k, r) in other.reps {
            self.insert(k, r);
        }
    }

    pub fn deduped(&self) -> u64 {
        self.reps.len() as u64
    }

    /// `sum floor(10^D / sqrt|disc(R')|)`.
    pub fn weighted_num(&self) -> BigInt {
        self.reps.values().map(|r| weight_term(&r.disc)).sum()
    }
}

/// `floor(10^D / sqrt|d|)` computed exactly as `isqrt(10^{2D} / |d|)`.
pub fn weight_term(d: &BigInt) -> BigInt {
    if d.is_zero() {
        return BigInt::zero();
    }
    let scale = num_traits::pow(BigInt::from(10u32), 2 * WEIGHT_DIGITS as usize);
    (scale / d.abs()).sqrt()
}

/// `10^D`.
pub fn weight_scale() -> BigInt {
    num_traits::pow(BigInt::from(10u32), WEIGHT_DIGITS as usize)
}

fn fixed_point(num: &BigInt) -> String {
    let scale = weight_scale();
    let (q, r) = (num / &scale, num % &scale);
    format!("{q}.{:0>width$}", r.to_string(), width = WEIGHT_DIGITS as usize)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SieveReport {
    pub n: usize,
    pub s: u64,
    pub t: u64,
    pub per_m: Vec<MReport>,
    pub truncated: bool,
    /// Raw candidates the full box would need.
    pub needed: String,
}

/// Decimal value of a report's weighted sum over all moduli.
pub fn weighted_count(report: &SieveReport) -> String {
    fixed_point(&report.per_m.iter().map(MReport::weighted_num).sum())
}

impl SieveReport {
    /// `X = s^{2n-2} t^{n(n-1)} / m^2`.
    pub fn x_value(&self, m: u64) -> BigRational {
        let n = self.n;
        let num = num_traits::pow(BigInt::from(self.s), 2 * n - 2) * num_traits::pow(BigInt::from(self.t), n * (n - 1));
        BigRational::new(num, BigInt::from(m * m))
    }

    /// Union of reports over disjoint boxes with the same `n, s, t`.
    pub fn merge(reports: Vec<SieveReport>) -> Result<SieveReport> {
        let mut it = reports.into_iter();
        let mut acc = it.next().ok_or_else(|| Error::Precondition("no reports to merge".into()))?;
        for r in it {
            if (r.n, r.s, r.t) != (acc.n, acc.s, acc.t) {
                return Err(Error::Precondition("reports have different box parameters".into()));
            }
            acc.truncated |= r.truncated;
            for mr in r.per_m {
                match acc.per_m.iter_mut().find(|x| x.m == mr.m) {
                    Some(x) => x.merge(mr),
                    None => acc.per_m.push(mr),
                }
            }
        }
        acc.per_m.sort_by_key(|x| x.m);
        Ok(acc)
    }

    pub fn csv_header() -> &'static str {
        "m,candidates,presieved,uwd,reduced,deduped,weighted_num,weighted_scale,X"
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(Self::csv_header());
        out.push('\n');
        let scale = weight_scale();
        let mut total = Counts::default();
        let mut total_dedup = 0;
        let mut total_w = BigInt::zero();
        for r in &self.per_m {
            let w = r.weighted_num();
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                r.m,
                r.counts.candidates,
                r.counts.presieved,
                r.counts.uwd,
                r.counts.reduced,
                r.deduped(),
                w,
                scale,
                self.x_value(r.m)
            )
            .unwrap();
            total.add(&r.counts);
            total_dedup += r.deduped();
            total_w += w;
        }
        writeln!(
            out,
            "all,{},{},{},{},{},{},{},",
            total.candidates, total.presieved, total.uwd, total.reduced, total_dedup, total_w, scale
        )
        .unwrap();
        out
    }

    /// One JSON object per deduped representative, by modulus then key.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for r in &self.per_m {
            for (k, rep) in &r.reps {
                let row = serde_json::json!({
                    "key": k.to_string(),
                    "disc": rep.disc.to_string(),
                    "m": r.m,
                    "l": rep.l,
                });
                out.push_str(&row.to_string());
                out.push('\n');
            }
        }
        out
    }

    /// Full counters including the gcd and unresolved stages.
    pub fn summary_json(&self) -> String {
        let per_m: Vec<_> = self
            .per_m
            .iter()
            .map(|r| {
                serde_json::json!({
                    "m": r.m,
                    "counts": r.counts,
                    "deduped": r.deduped(),
                    "weighted": fixed_point(&r.weighted_num()),
                })
            })
            .collect();
        serde_json::json!({
            "n": self.n,
            "s": self.s,
            "t": self.t,
            "truncated": self.truncated,
            "needed_candidates": self.needed,
            "weighted_total": weighted_count(self),
            "per_m": per_m,
        })
        .to_string()
    }

    /// Writes `<stem>.csv`, `<stem>.jsonl` and `<stem>.summary.json`.
    pub fn write(&self, stem: &str) -> Result<()> {
        let io = |e: std::io::Error| Error::Config(format!("writing {stem}: {e}"));
        if let Some(dir) = std::path::Path::new(stem).parent() {
            if !dir.as_os_str().is_empty() {
                std::fs::create_dir_all(dir).map_err(io)?;
            }
        }
        std::fs::write(format!("{stem}.csv"), self.to_csv()).map_err(io)?;
        std::fs::write(format!("{stem}.jsonl"), self.to_jsonl()).map_err(io)?;
        std::fs::write(format!("{stem}.summary.json"), self.summary_json() + "\n").map_err(io)?;
        Ok(())
    }
}
