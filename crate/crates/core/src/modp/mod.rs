//! Factorisation of binary forms modulo a prime, double-root profiles, the
//! prime-ideal count `H(p, f)` and brute-force singular-locus densities.

pub mod poly;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::forms::BinaryForm;
use poly::{Fp, Poly};

/// Primes below this bound get an exhaustive root scan for linear factors.
const ROOT_SCAN_BOUND: u64 = 1 << 16;

pub fn is_prime(p: u64) -> bool {
    num_prime::nt_funcs::is_prime64(p)
}

fn check_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::NotPrime(p))
    }
}

/// Reduces every coefficient into `[0, p)`, leading first.
pub fn reduce_coeffs(f: &BinaryForm, p: u64) -> Vec<u64> {
    let pb = BigInt::from(p);
    f.coeffs().iter().map(|c| c.mod_floor(&pb).to_u64().unwrap()).collect()
}

/// Factorisation `f = unit * Y^k * prod f_i^{e_i}` over `F_p`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FactorModP {
    pub p: u64,
    pub n: usize,
    /// Leading coefficient of the affine part `f(x, 1)`.
    pub unit: u64,
    /// Irreducible factors as binary forms (leading first, monic in X) with multiplicities.
    pub factors: Vec<(Vec<u64>, u32)>,
    pub infinity_multiplicity: u32,
}

impl FactorModP {
    /// Multiplies the factorisation back out, as leading-first coefficients of degree `n`.
    pub fn reconstruct(&self) -> Vec<u64> {
        let fp = Fp::new(self.p);
        let mut prod: Poly = vec![self.unit];
        for (g, e) in &self.factors {
            let low: Poly = g.iter().rev().copied().collect();
            for _ in 0..*e {
                prod = fp.mul_poly(&prod, &low);
            }
        }
        let mut out: Vec<u64> = prod.iter().rev().copied().collect();
        let k = self.infinity_multiplicity as usize;
        let mut lead = vec![0u64; k];
        lead.append(&mut out);
        lead.resize(self.n + 1, 0);
        lead
    }

    /// Root of a linear factor `X - lY`.
    pub fn linear_root(&self, g: &[u64]) -> Option<u64> {
        (g.len() == 2).then(|| Fp::new(self.p).neg(g[1]))
    }
}

/// Factors the affine polynomial given lowest degree first; returns (unit, factors).
pub fn factor_poly(fp: &Fp, a: &Poly) -> (u64, Vec<(Poly, u32)>) {
    let unit = *a.last().unwrap();
    let m = fp.monic(a);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed ^ fp.p);
    let mut out: Vec<(Poly, u32)> = Vec::new();
    for (g, e) in fp.squarefree(&m) {
        let mut rest = g;
        if fp.p < ROOT_SCAN_BOUND {
            for r in fp.roots_by_scan(&rest) {
                let lin = vec![fp.neg(r), 1];
                rest = fp.div_exact(&rest, &lin);
                out.push((lin, e));
            }
        }
        if rest.len() <= 1 {
            continue;
        }
        for (h, d) in fp.distinct_degree(&rest) {
            for q in fp.equal_degree(&h, d, &mut rng) {
                out.push((q, e));
            }
        }
    }
    (unit, out)
}

/// Complete factorisation of `f` modulo `p`.
pub fn factor_modp(f: &BinaryForm, p: u64) -> Result<FactorModP> {
    check_prime(p)?;
    factor_reduced(&reduce_coeffs(f, p), p)
}

/// Factorisation of an already reduced coefficient vector (leading first).
pub fn factor_reduced(c: &[u64], p: u64) -> Result<FactorModP> {
    let n = c.len() - 1;
    let k = c.iter().take_while(|&&x| x == 0).count();
    if k == c.len() {
        return Err(Error::VanishingReduction(p));
    }
    let fp = Fp::new(p);
    let affine: Poly = c[k..].iter().rev().copied().collect();
    let (unit, facs) = factor_poly(&fp, &affine);
    let mut factors: Vec<(Vec<u64>, u32)> =
        facs.into_iter().map(|(g, e)| (g.iter().rev().copied().collect::<Vec<u64>>(), e)).collect();
    factors.sort_by(|a, b| a.0.len().cmp(&b.0.len()).then_with(|| a.0.cmp(&b.0)));
    let out = FactorModP { p, n, unit, factors, infinity_multiplicity: k as u32 };
    debug_assert_eq!(out.reconstruct(), c);
    Ok(out)
}

/// Why a form is strongly divisible.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum StrongReason {
    RationalTriple,
    TwoDoublePoints,
}

/// Classification of the multiple points of `f` on `P^1(F_p-bar)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ProfileKind {
    Smooth,
    UniqueAffineDouble { l: u64 },
    DoubleAtInfinity,
    StronglyDivisible(StrongReason),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DoubleRootProfile {
    pub p: u64,
    pub kind: ProfileKind,
}

impl DoubleRootProfile {
    pub fn is_strongly_divisible(&self) -> bool {
        matches!(self.kind, ProfileKind::StronglyDivisible(_))
    }
}

/// Profile read off a factorisation.
pub fn profile_from_factors(fm: &FactorModP) -> DoubleRootProfile {
    let k = fm.infinity_multiplicity;
    let triple = k >= 3 || fm.factors.iter().any(|(g, e)| g.len() == 2 && *e >= 3);
    let multiple: usize =
        fm.factors.iter().filter(|(_, e)| *e >= 2).map(|(g, _)| g.len() - 1).sum::<usize>() + usize::from(k >= 2);
    let kind = if triple {
        ProfileKind::StronglyDivisible(StrongReason::RationalTriple)
    } else if multiple >= 2 {
        ProfileKind::StronglyDivisible(StrongReason::TwoDoublePoints)
    } else if multiple == 1 {
        if k == 2 {
            ProfileKind::DoubleAtInfinity
        } else {
            let (g, _) = fm.factors.iter().find(|(_, e)| *e >= 2).expect("one multiple point");
            ProfileKind::UniqueAffineDouble { l: fm.linear_root(g).expect("single point is rational") }
        }
    } else {
        ProfileKind::Smooth
    };
    DoubleRootProfile { p: fm.p, kind }
}

pub fn double_root_profile(f: &BinaryForm, p: u64) -> Result<DoubleRootProfile> {
    Ok(profile_from_factors(&factor_modp(f, p)?))
}

/// Profile of a reduced coefficient vector; the zero vector counts as
/// strongly divisible (every point is a multiple point).
pub fn profile_reduced(c: &[u64], p: u64) -> DoubleRootProfile {
    match factor_reduced(c, p) {
        Ok(fm) => profile_from_factors(&fm),
        Err(_) => DoubleRootProfile { p, kind: ProfileKind::StronglyDivisible(StrongReason::RationalTriple) },
    }
}

fn mobius(mut n: u64) -> i64 {
    let mut mu = 1;
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            n /= d;
            if n % d == 0 {
                return 0;
            }
            mu = -mu;
        }
        d += 1;
    }
    if n > 1 {
        mu = -mu;
    }
    mu
}

/// `H(p, f) = (1/f) sum_{d | f} mu(f/d) p^d`, the number of monic irreducible
/// polynomials of degree `f` over `F_p`.
pub fn count_h(p: u64, f: u32) -> BigInt {
    assert!(f >= 1);
    let mut s = BigInt::zero();
    for d in 1..=f {
        if f % d == 0 {
            s += BigInt::from(mobius((f / d) as u64)) * num_traits::pow(BigInt::from(p), d as usize);
        }
    }
    s / BigInt::from(f)
}

/// Default number of points [`singular_density`] will enumerate.
pub const DENSITY_BUDGET: u64 = 100_000_000;

/// Counts of the loci `V_n(F_p)` (strongly divisible forms, including zero)
/// and `W_n(F_p) = V_n ∪ {a_0 = a_1 = 0}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Density {
    pub n: usize,
    pub p: u64,
    pub v: u64,
    pub w: u64,
    pub c_p: BigRational,
}

pub fn singular_density(n: usize, p: u64) -> Result<Density> {
    singular_density_with_budget(n, p, DENSITY_BUDGET)
}

pub fn singular_density_with_budget(n: usize, p: u64, budget: u64) -> Result<Density> {
    check_prime(p)?;
    if n < 2 {
        return Err(Error::UnsupportedDegree { n, lo: 2, hi: usize::MAX });
    }
    let total = num_traits::checked_pow(p, n + 1).filter(|&t| t <= budget).ok_or_else(|| Error::Budget {
        needed: format!("{p}^{}", n + 1),
        budget,
    })?;
    let per_lead = total / p;
    let (v, w) = (0..p)
        .into_par_iter()
        .map(|a0| {
            let mut c = vec![0u64; n + 1];
            c[0] = a0;
            let (mut v, mut w) = (0u64, 0u64);
            for idx in 0..per_lead {
                let mut t = idx;
                for slot in c[1..].iter_mut().rev() {
                    *slot = t % p;
                    t /= p;
                }
                let in_v = profile_reduced(&c, p).is_strongly_divisible();
                v += u64::from(in_v);
                w += u64::from(in_v || (c[0] == 0 && c[1] == 0));
            }
            (v, w)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    let c_p = BigRational::new(BigInt::from(total - w), BigInt::from(total));
    Ok(Density { n, p, v, w, c_p })
}

/// Strong divisibility in the lifted sense: `p^2 | disc(f + p g)` for every
/// `g` with coefficients in `[0, p)`.
pub fn strongly_divisible_by_lifts(f: &BinaryForm, p: u64) -> bool {
    let n = f.degree();
    let base = reduce_coeffs(f, p);
    let p2 = BigInt::from(p * p);
    let total = p.pow((n + 1) as u32);
    (0..total).all(|mut idx| {
        let c: Vec<BigInt> = base
            .iter()
            .map(|&b| {
                let g = idx % p;
                idx /= p;
                BigInt::from(b + p * g)
            })
            .collect();
        match BinaryForm::new(c) {
            Ok(h) => h.discriminant().is_multiple_of(&p2),
            Err(_) => true,
        }
    })
}
