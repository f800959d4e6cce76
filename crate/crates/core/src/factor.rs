//! Integer factorisation provider for discriminants at desk scale.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

/// Integers with absolute value below `10^FACTOR_BUDGET_DIGITS` are factored.
pub const FACTOR_BUDGET_DIGITS: u32 = 30;

/// A complete factorisation `n = sign * prod p^e`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Factorization {
    #[serde(serialize_with = "crate::ser::decimal")]
    pub n: BigInt,
    pub primes: Vec<(u64, u32)>,
}

impl Factorization {
    /// Validates that the listed prime powers multiply to `|n|`.
    pub fn new(n: BigInt, mut primes: Vec<(u64, u32)>) -> Result<Self> {
        primes.retain(|&(_, e)| e > 0);
        primes.sort_unstable();
        let prod: BigInt = primes.iter().map(|&(p, e)| num_traits::pow(BigInt::from(p), e as usize)).product();
        if n.is_zero() || prod != n.abs() {
            return Err(Error::IncompleteFactorization(format!("prime powers multiply to {prod}, expected |{n}|")));
        }
        if let Some(&(p, _)) = primes.iter().find(|&&(p, _)| !crate::modp::is_prime(p)) {
            return Err(Error::IncompleteFactorization(format!("{p} is not prime")));
        }
        Ok(Factorization { n, primes })
    }

    pub fn valuation(&self, p: u64) -> u32 {
        self.primes.iter().find(|&&(q, _)| q == p).map_or(0, |&(_, e)| e)
    }

    /// The `t` in `n = s t^2` with `s` squarefree.
    pub fn square_root_part(&self) -> BigInt {
        self.primes.iter().map(|&(p, e)| num_traits::pow(BigInt::from(p), (e / 2) as usize)).product()
    }

    /// The signed squarefree `s` in `n = s t^2`.
    pub fn squarefree_part(&self) -> BigInt {
        let s: BigInt = self.primes.iter().filter(|&&(_, e)| e % 2 == 1).map(|&(p, _)| BigInt::from(p)).product();
        if self.n.sign() == Sign::Minus {
            -s
        } else {
            s
        }
    }
}

/// Factors a nonzero integer within the default budget.
pub fn factor_integer(n: &BigInt) -> Result<Factorization> {
    factor_integer_with_budget(n, FACTOR_BUDGET_DIGITS)
}

pub fn factor_integer_with_budget(n: &BigInt, digits: u32) -> Result<Factorization> {
    if n.is_zero() {
        return Err(Error::Precondition("cannot factor zero".into()));
    }
    let a = n.abs();
    if a >= num_traits::pow(BigInt::from(10u32), digits as usize) {
        return Err(Error::FactorBudget(n.to_string()));
    }
    let v = a.to_u128().ok_or_else(|| Error::FactorBudget(n.to_string()))?;
    let mut primes = Vec::new();
    if v > 1 {
        for (p, e) in num_prime::nt_funcs::factorize128(v) {
            let p = u64::try_from(p).map_err(|_| Error::FactorBudget(format!("prime factor {p} exceeds 64 bits")))?;
            primes.push((p, e as u32));
        }
    }
    Factorization::new(n.clone(), primes)
}

/// Chinese remaindering of `x = r1 mod m1`, `x = r2 mod m2` with coprime moduli.
pub fn crt_pair(r1: &BigInt, m1: &BigInt, r2: &BigInt, m2: &BigInt) -> BigInt {
    let e = m1.extended_gcd(m2);
    debug_assert!(e.gcd.is_one());
    let m = m1 * m2;
    (r1 + m1 * ((r2 - r1) * e.x)).mod_floor(&m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factors_and_parts() {
        let f = factor_integer(&BigInt::from(-448)).unwrap();
        assert_eq!(f.primes, vec![(2, 6), (7, 1)]);
        assert_eq!(f.square_root_part(), BigInt::from(8));
        assert_eq!(f.squarefree_part(), BigInt::from(-7));
        assert!(Factorization::new(BigInt::from(12), vec![(2, 2)]).is_err());
        assert!(Factorization::new(BigInt::from(12), vec![(4, 1), (3, 1)]).is_err());
        assert!(factor_integer(&BigInt::from(1)).unwrap().primes.is_empty());
    }

    #[test]
    fn budget() {
        let big = num_traits::pow(BigInt::from(10), 31);
        assert!(matches!(factor_integer(&big), Err(Error::FactorBudget(_))));
        let semi = BigInt::from(1_000_000_007u64) * BigInt::from(998_244_353u64) * BigInt::from(1_000_000_009u64);
        assert_eq!(factor_integer(&semi).unwrap().primes.len(), 3);
    }

    #[test]
    fn crt() {
        let x = crt_pair(&BigInt::from(2), &BigInt::from(3), &BigInt::from(3), &BigInt::from(5));
        assert_eq!(x, BigInt::from(8));
    }
}
