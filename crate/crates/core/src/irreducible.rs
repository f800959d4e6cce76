//! Irreducibility over the rationals for binary forms.
//!
//! A mod-p degree-pattern certificate is tried first; otherwise candidate
//! factors are assembled from numeric roots and confirmed by exact division.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, Zero};
use twofloat::TwoFloat;

use crate::error::{Error, Result};
use crate::forms::BinaryForm;
use crate::modp::{factor_modp, is_prime};
use crate::roots::integer_poly_roots;

const CERT_PRIME_BOUND: u64 = 100;

/// Proper factor degrees compatible with the factorisation patterns mod small primes.
fn compatible_degrees(f: &BinaryForm) -> BTreeSet<usize> {
    let n = f.degree();
    let mut ok: BTreeSet<usize> = (1..n).collect();
    for p in (2..CERT_PRIME_BOUND).filter(|&p| is_prime(p)) {
        if (f.leading() % BigInt::from(p)).is_zero() {
            continue;
        }
        let Ok(fm) = factor_modp(f, p) else { continue };
        if fm.factors.iter().any(|&(_, e)| e > 1) {
            continue;
        }
        let mut sums: BTreeSet<usize> = BTreeSet::from([0]);
        for (g, _) in &fm.factors {
            let d = g.len() - 1;
            let next: Vec<usize> = sums.iter().map(|s| s + d).collect();
            sums.extend(next);
        }
        ok.retain(|d| sums.contains(d));
        if ok.is_empty() {
            break;
        }
    }
    ok
}

/// Whether `f` is irreducible over Q.
pub fn is_irreducible(f: &BinaryForm) -> Result<bool> {
    let n = f.degree();
    if n == 1 {
        return Ok(true);
    }
    if f.leading().is_zero() || f.coeff(n).is_zero() {
        return Ok(false);
    }
    let f = f.primitive_part();
    let degrees = compatible_degrees(&f);
    if degrees.is_empty() {
        return Ok(true);
    }
    if f.discriminant().is_zero() {
        return Ok(false);
    }
    Ok(find_factor(&f, &degrees)?.is_none())
}

/// Searches for a factor of one of the given degrees; `None` proves irreducibility
/// within the numeric error bound.
fn find_factor(f: &BinaryForm, degrees: &BTreeSet<usize>) -> Result<Option<Vec<BigInt>>> {
    let n = f.degree();
    let roots = integer_poly_roots::<TwoFloat>(f.coeffs())?;
    let lead = TwoFloat::from_bigint_value(f.leading());
    for &k in degrees.iter().filter(|&&k| 2 * k <= n) {
        for subset in subsets(n, k) {
            // lead * prod (x - r_i), complex arithmetic, lowest degree first.
            let mut re = vec![lead];
            let mut im = vec![TwoFloat::from(0.0)];
            let mut err_mag = TwoFloat::from(1.0);
            let mut mag = TwoFloat::from(1.0);
            for &i in &subset {
                let r = roots[i];
                let (rr, ri) = (r.z.re, r.z.im);
                let mut nre = vec![TwoFloat::from(0.0); re.len() + 1];
                let mut nim = vec![TwoFloat::from(0.0); re.len() + 1];
                for j in 0..re.len() {
                    nre[j + 1] += re[j];
                    nim[j + 1] += im[j];
                    nre[j] -= re[j] * rr - im[j] * ri;
                    nim[j] -= re[j] * ri + im[j] * rr;
                }
                re = nre;
                im = nim;
                let a = r.z.norm();
                err_mag *= a + r.radius;
                mag *= a;
            }
            let bound = lead.abs() * (err_mag - mag) * TwoFloat::from(2f64.powi(k as i32)) + TwoFloat::from(1e-20) * lead.abs() * err_mag;
            if bound.hi() >= 0.25 {
                return Err(Error::Precision("candidate factor coefficients not resolved".into()));
            }
            if im.iter().any(|x| x.abs().hi() > 0.5) {
                continue;
            }
            let cand: Vec<BigInt> = re.iter().rev().map(|x| round_twofloat(*x)).collect();
            if divides_exactly(&cand, f.coeffs()) {
                return Ok(Some(cand));
            }
        }
    }
    Ok(None)
}

trait FromBigIntValue {
    fn from_bigint_value(x: &BigInt) -> Self;
}

impl FromBigIntValue for TwoFloat {
    fn from_bigint_value(x: &BigInt) -> Self {
        <TwoFloat as crate::roots::Real>::from_bigint(x)
    }
}

fn round_twofloat(x: TwoFloat) -> BigInt {
    let hi = x.hi().round();
    let rest = (x - TwoFloat::from(hi)).hi().round();
    BigInt::from(hi as i128) + BigInt::from(rest as i128)
}

/// Exact divisibility of `f` by `g` over Q (both leading first).
fn divides_exactly(g: &[BigInt], f: &[BigInt]) -> bool {
    if g.iter().all(|x| x.is_zero()) || g[0].is_zero() {
        return false;
    }
    let mut r: Vec<BigRational> = f.iter().map(|x| BigRational::from_integer(x.clone())).collect();
    let dg = g.len() - 1;
    let lead = BigRational::from_integer(g[0].clone());
    for i in 0..=(f.len() - 1 - dg) {
        let q = &r[i] / &lead;
        if q.is_zero() {
            continue;
        }
        for (j, gj) in g.iter().enumerate() {
            r[i + j] = &r[i + j] - &q * BigRational::from_integer(gj.clone());
        }
    }
    r.iter().all(|x| x.is_zero())
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}
