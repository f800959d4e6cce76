//! Coefficient-box enumeration of weakly divisible forms, the small-prime
//! pre-sieve, UWD and reduction filters, dedupe and weighted counting.

pub mod config;
pub mod report;

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::factor::factor_integer;
use crate::forms::BinaryForm;
use crate::irreducible::is_irreducible;
use crate::modp::{profile_reduced, ProfileKind};
use crate::reduce::{canonical_key, gram_profile, is_normally_minkowski_reduced, CanonicalKey};
use crate::roots::Precision;
use crate::weakdiv::{is_uwd, WeakDivWitness};

pub use config::SieveConfig;
pub use report::{weight_term, weighted_count, Counts, MReport, Representative, SieveReport, WEIGHT_DIGITS};

/// Tables of `W_n(F_p)` are precomputed when `p^{n+1}` is at most this.
const TABLE_LIMIT: u64 = 1 << 20;

/// Membership in `W_n(F_p)`: strongly divisible, or `a_0 = a_1 = 0`.
pub fn in_w_locus(c: &[u64], p: u64) -> bool {
    (c[0] == 0 && c[1] == 0) || profile_reduced(c, p).is_strongly_divisible()
}

/// Small-prime filter for a fixed degree, modulus and bound.
pub struct Presieve {
    n: usize,
    m: u64,
    /// Primes below `M` not dividing `m`, with an optional lookup table.
    coprime: Vec<(u64, Option<Vec<bool>>)>,
    /// Prime divisors of `m`.
    divisors: Vec<u64>,
}

fn table_index(c: &[u64], p: u64) -> usize {
    c.iter().fold(0u64, |acc, &x| acc * p + x) as usize
}

impl Presieve {
    pub fn new(n: usize, m: u64, big_m: u64) -> Self {
        let divisors: Vec<u64> = (2..=m).filter(|&p| m % p == 0 && crate::modp::is_prime(p)).collect();
        let coprime = (2..big_m)
            .filter(|&p| crate::modp::is_prime(p) && m % p != 0)
            .map(|p| {
                let size = p.checked_pow((n + 1) as u32).filter(|&s| s <= TABLE_LIMIT);
                let table = size.map(|size| {
                    (0..size)
                        .map(|mut idx| {
                            let mut c = vec![0u64; n + 1];
                            for slot in c.iter_mut().rev() {
                                *slot = idx % p;
                                idx /= p;
                            }
                            in_w_locus(&c, p)
                        })
                        .collect()
                });
                (p, table)
            })
            .collect();
        Presieve { n, m, coprime, divisors }
    }

    /// True when `f` survives: outside `W_n(F_p)` for `p < M`, `p ∤ m`, and a
    /// unique affine double root at `l mod p` for every `p | m`.
    pub fn passes(&self, f: &BinaryForm, l: u64) -> bool {
        debug_assert_eq!(f.degree(), self.n);
        for (p, table) in &self.coprime {
            let c = crate::modp::reduce_coeffs(f, *p);
            let bad = match table {
                Some(t) => t[table_index(&c, *p)],
                None => in_w_locus(&c, *p),
            };
            if bad {
                return false;
            }
        }
        self.divisors.iter().all(|&p| {
            let c = crate::modp::reduce_coeffs(f, p);
            matches!(profile_reduced(&c, p).kind, ProfileKind::UniqueAffineDouble { l: r } if r == l % p)
        })
    }

    pub fn modulus(&self) -> u64 {
        self.m
    }
}

/// Presieve of a single form.
pub fn presieve(f: &BinaryForm, l: u64, m: u64, big_m: u64) -> bool {
    Presieve::new(f.degree(), m, big_m).passes(f, l)
}

/// Number of `x` in `[-h, h]` with `x ≡ c (mod q)`.
fn count_in_class(c: &BigInt, q: &BigInt, h: &BigInt) -> BigInt {
    (h - c).div_floor(q) - (-h - BigInt::one() - c).div_floor(q)
}

/// Least `x >= -h` with `x ≡ c (mod q)`.
fn first_in_class(c: &BigInt, q: &BigInt, h: &BigInt) -> BigInt {
    let lo = -h;
    &lo + (c - &lo).mod_floor(q)
}

/// The box `W(s:t:m)` restricted to one `(a_0, a_1)` prefix.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Unit {
    pub m: u64,
    pub a0: u64,
    pub a1: u64,
}

struct BoxShape {
    n: usize,
    /// Height bounds `s t^i`.
    bounds: Vec<BigInt>,
    /// Lower bound on `a_{n-2}` from the guard.
    guard: Option<BigInt>,
}

impl BoxShape {
    fn new(cfg: &SieveConfig, m: u64) -> Self {
        let n = cfg.n;
        let bounds = (0..=n).map(|i| BigInt::from(cfg.s) * num_traits::pow(BigInt::from(cfg.t), i)).collect();
        let guard = cfg.rho_b.map(|rho| {
            let g = cfg.s as f64 * rho.powi((n - 2) as i32) * m as f64;
            BigInt::from(g.ceil() as i64)
        });
        BoxShape { n, bounds, guard }
    }

    fn middle_ranges(&self) -> Vec<(BigInt, BigInt)> {
        (2..self.n - 1)
            .map(|i| {
                let mut lo = -&self.bounds[i];
                if i == self.n - 2 {
                    if let Some(g) = &self.guard {
                        lo = lo.max(g.clone());
                    }
                }
                (lo, self.bounds[i].clone())
            })
            .collect()
    }

    fn prefix_allowed(&self, a1: u64) -> bool {
        match (&self.guard, self.n) {
            (Some(g), 3) => BigInt::from(a1) >= *g,
            _ => true,
        }
    }
}

/// Calls `visit` with each middle vector `a_2..a_{n-2}` in lexicographic order.
fn for_each_middle(ranges: &[(BigInt, BigInt)], visit: &mut dyn FnMut(&[BigInt])) {
    if ranges.iter().any(|(lo, hi)| lo > hi) {
        return;
    }
    let mut cur: Vec<BigInt> = ranges.iter().map(|(lo, _)| lo.clone()).collect();
    loop {
        visit(&cur);
        let mut i = cur.len();
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if cur[i] < ranges[i].1 {
                cur[i] += 1;
                for j in i + 1..cur.len() {
                    cur[j] = ranges[j].0.clone();
                }
                break;
            }
        }
    }
}

/// `P(l)` and `P'(l)` for the part `a_0 x^n + ... + a_{n-2} x^2`.
fn head_values(head: &[BigInt], n: usize, l: &BigInt) -> (BigInt, BigInt) {
    let mut v = BigInt::zero();
    let mut d = BigInt::zero();
    for (i, a) in head.iter().enumerate() {
        let e = n - i;
        v += a * num_traits::pow(l.clone(), e);
        d += a * BigInt::from(e) * num_traits::pow(l.clone(), e - 1);
    }
    (v, d)
}

/// Visits every `(f, l)` of a unit, in a fixed order.
fn for_each_candidate(shape: &BoxShape, unit: &Unit, visit: &mut dyn FnMut(BinaryForm, u64)) {
    let n = shape.n;
    let m = BigInt::from(unit.m);
    let m2 = &m * &m;
    let h1 = &shape.bounds[n - 1];
    let h0 = &shape.bounds[n];
    for_each_middle(&shape.middle_ranges(), &mut |mid| {
        let mut head = vec![BigInt::from(unit.a0), BigInt::from(unit.a1)];
        head.extend_from_slice(mid);
        for l in 0..unit.m {
            let lb = BigInt::from(l);
            let (pv, pd) = head_values(&head, n, &lb);
            let mut a1 = first_in_class(&(-&pd), &m, h1);
            while &a1 <= h1 {
                let c = -(&pv + &a1 * &lb);
                let mut a0 = first_in_class(&c, &m2, h0);
                while &a0 <= h0 {
                    let mut coeffs = head.clone();
                    coeffs.push(a1.clone());
                    coeffs.push(a0.clone());
                    visit(BinaryForm::new(coeffs).expect("a_0 > 0"), l);
                    a0 += &m2;
                }
                a1 += &m;
            }
        }
    });
}

/// Number of `(f, l)` pairs in a unit, without building them.
fn unit_size(shape: &BoxShape, unit: &Unit) -> BigInt {
    let n = shape.n;
    let m = BigInt::from(unit.m);
    let m2 = &m * &m;
    let h1 = &shape.bounds[n - 1];
    let h0 = &shape.bounds[n];
    let mut total = BigInt::zero();
    for_each_middle(&shape.middle_ranges(), &mut |mid| {
        let mut head = vec![BigInt::from(unit.a0), BigInt::from(unit.a1)];
        head.extend_from_slice(mid);
        for l in 0..unit.m {
            let lb = BigInt::from(l);
            let (pv, pd) = head_values(&head, n, &lb);
            if unit.m == 1 {
                total += count_in_class(&BigInt::zero(), &m, h1) * count_in_class(&BigInt::zero(), &m2, h0);
                continue;
            }
            let mut a1 = first_in_class(&(-&pd), &m, h1);
            while &a1 <= h1 {
                total += count_in_class(&(-(&pv + &a1 * &lb)), &m2, h0);
                a1 += &m;
            }
        }
    });
    total
}

/// All `(f, l)` of `W(s:t:m)` for one modulus, in canonical order.
pub fn enumerate_box(cfg: &SieveConfig, m: u64) -> Vec<(BinaryForm, u64)> {
    let shape = BoxShape::new(cfg, m);
    let mut out = Vec::new();
    for unit in units(cfg, m) {
        if unit.a0.gcd(&unit.a1) != 1 {
            continue;
        }
        for_each_candidate(&shape, &unit, &mut |f, l| out.push((f, l)));
    }
    out
}

fn units(cfg: &SieveConfig, m: u64) -> Vec<Unit> {
    let shape = BoxShape::new(cfg, m);
    let (lo, hi) = cfg.a0_range.unwrap_or((0, u64::MAX));
    let mut out = Vec::new();
    for a0 in (cfg.s / 2 + 1)..=cfg.s {
        if a0 < lo || a0 > hi {
            continue;
        }
        for a1 in (1..).take_while(|&a1| 2 * a1 < cfg.s) {
            if shape.prefix_allowed(a1) {
                out.push(Unit { m, a0, a1 });
            }
        }
    }
    out
}

/// Outcome of one candidate.
enum Outcome {
    PresieveFail,
    NotUwd,
    Unresolved,
    NotReduced,
    Reduced(CanonicalKey, Representative),
}

fn process(f: BinaryForm, l: u64, m: u64, presieve: &Presieve, precision: Precision) -> Outcome {
    if !presieve.passes(&f, l) {
        return Outcome::PresieveFail;
    }
    let d = f.discriminant();
    if d.is_zero() {
        return Outcome::NotUwd;
    }
    let fac = match factor_integer(&d) {
        Ok(x) => x,
        Err(_) => return Outcome::Unresolved,
    };
    match is_uwd(&f, &fac) {
        Ok(r) if r.is_uwd => {}
        Ok(_) => return Outcome::NotUwd,
        Err(_) => return Outcome::Unresolved,
    }
    match is_irreducible(&f) {
        Ok(true) => {}
        Ok(false) => return Outcome::NotReduced,
        Err(_) => return Outcome::Unresolved,
    }
    let mb = BigInt::from(m);
    match gram_profile(&f, &mb, precision) {
        Ok(p) if is_normally_minkowski_reduced(&p) => {}
        Ok(_) => return Outcome::NotReduced,
        Err(_) => return Outcome::Unresolved,
    }
    let w = WeakDivWitness { m: mb.clone(), l: BigInt::from(l) };
    let key = canonical_key(&f, &w);
    let disc = &d / (&mb * &mb);
    Outcome::Reduced(key, Representative { form: f, l, disc })
}

fn run_unit(shape: &BoxShape, unit: &Unit, presieve: &Presieve, precision: Precision) -> MReport {
    let mut rep = MReport::empty(unit.m);
    let size = unit_size(shape, unit);
    let size = u64::try_from(size).unwrap_or(u64::MAX);
    rep.counts.candidates = size;
    if unit.a0.gcd(&unit.a1) != 1 {
        return rep;
    }
    rep.counts.gcd_filtered = size;
    for_each_candidate(shape, unit, &mut |f, l| match process(f, l, unit.m, presieve, precision) {
        Outcome::PresieveFail => {}
        Outcome::NotUwd => rep.counts.presieved += 1,
        Outcome::Unresolved => {
            rep.counts.presieved += 1;
            rep.counts.unresolved += 1;
        }
        Outcome::NotReduced => {
            rep.counts.presieved += 1;
            rep.counts.uwd += 1;
        }
        Outcome::Reduced(key, r) => {
            rep.counts.presieved += 1;
            rep.counts.uwd += 1;
            rep.counts.reduced += 1;
            rep.insert(key, r);
        }
    });
    rep
}

/// Runs the sieve over every modulus of the configuration.
pub fn run_sieve(cfg: &SieveConfig) -> Result<SieveReport> {
    cfg.validate()?;
    let mut plan: Vec<(Unit, u64)> = Vec::new();
    let mut used = 0u64;
    let mut truncated = false;
    let mut needed = BigInt::zero();
    for &m in &cfg.m_list {
        let shape = BoxShape::new(cfg, m);
        for unit in units(cfg, m) {
            let size = unit_size(&shape, &unit);
            needed += &size;
            let size = u64::try_from(size).unwrap_or(u64::MAX);
            if truncated || used.saturating_add(size) > cfg.budget {
                truncated = true;
                continue;
            }
            used += size;
            plan.push((unit, size));
        }
    }
    let mut order: Vec<usize> = (0..plan.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(cfg.seed));
    let shards: Vec<Vec<usize>> =
        (0..cfg.shards).map(|k| order.iter().copied().skip(k).step_by(cfg.shards).collect()).collect();
    let presieves: BTreeMap<u64, Presieve> =
        cfg.m_list.iter().map(|&m| (m, Presieve::new(cfg.n, m, cfg.big_m))).collect();
    let shapes: BTreeMap<u64, BoxShape> = cfg.m_list.iter().map(|&m| (m, BoxShape::new(cfg, m))).collect();
    let partial: Vec<BTreeMap<u64, MReport>> = shards
        .par_iter()
        .map(|idx| {
            let mut acc: BTreeMap<u64, MReport> = BTreeMap::new();
            for &i in idx {
                let unit = &plan[i].0;
                let r = run_unit(&shapes[&unit.m], unit, &presieves[&unit.m], cfg.precision);
                acc.entry(unit.m).or_insert_with(|| MReport::empty(unit.m)).merge(r);
            }
            acc
        })
        .collect();
    let mut per_m: BTreeMap<u64, MReport> = cfg.m_list.iter().map(|&m| (m, MReport::empty(m))).collect();
    for shard in partial {
        for (m, r) in shard {
            per_m.get_mut(&m).expect("m in list").merge(r);
        }
    }
    Ok(SieveReport {
        n: cfg.n,
        s: cfg.s,
        t: cfg.t,
        per_m: per_m.into_values().collect(),
        truncated,
        needed: needed.to_string(),
    })
}

/// Budget error for a truncated run.
pub fn budget_error(report: &SieveReport, budget: u64) -> Option<Error> {
    report.truncated.then(|| Error::Budget { needed: report.needed.clone(), budget })
}
