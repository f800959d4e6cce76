//! Weak divisibility witnesses, the weakly divisible ring, ultra weak
//! divisibility and the maximal witness.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::binring::{binary_basis, ring_from_basis, BasisKind, RingOrigin, RingPresentation};
use crate::error::{Error, Result};
use crate::factor::{crt_pair, factor_integer, Factorization};
use crate::forms::BinaryForm;
use crate::modp::{factor_modp, profile_reduced, reduce_coeffs, DoubleRootProfile, ProfileKind};

/// `m^2 | f(l, 1)` and `m | f_X(l, 1)` with `0 <= l < m`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct WeakDivWitness {
    #[serde(serialize_with = "crate::ser::decimal")]
    pub m: BigInt,
    #[serde(serialize_with = "crate::ser::decimal")]
    pub l: BigInt,
}

impl WeakDivWitness {
    pub fn is_valid_for(&self, f: &BinaryForm) -> bool {
        self.m.is_positive()
            && !self.l.is_negative()
            && self.l < self.m
            && f.eval_affine(&self.l).is_multiple_of(&(&self.m * &self.m))
            && f.deriv_affine(&self.l).is_multiple_of(&self.m)
    }
}

/// Prime powers up to this size are scanned exhaustively.
pub const SCAN_LIMIT: u64 = 10_000;

/// Cap on the number of CRT combinations examined by `find_witness`.
const COMBINATION_LIMIT: usize = 1 << 20;

fn second_derivative(f: &BinaryForm, l: &BigInt) -> BigInt {
    let fx = f.deriv_x_coeffs();
    // fx is a form of degree n - 1 whose X-derivative at (l, 1) is f_XX(l, 1).
    let n1 = fx.len() - 1;
    fx[..n1].iter().enumerate().fold(BigInt::zero(), |acc, (i, c)| acc * l + c * BigInt::from(n1 - i))
}

fn satisfies(f: &BinaryForm, l: &BigInt, q: &BigInt) -> bool {
    f.deriv_affine(l).is_multiple_of(q) && f.eval_affine(l).is_multiple_of(&(q * q))
}

/// All `l mod p^e` with `p^{2e} | f(l, 1)` and `p^e | f_X(l, 1)`, ascending.
pub fn prime_power_solutions(f: &BinaryForm, p: u64, e: u32) -> Result<Vec<BigInt>> {
    if e == 0 {
        return Ok(vec![BigInt::zero()]);
    }
    let pb = BigInt::from(p);
    let q = num_traits::pow(pb.clone(), e as usize);
    if let Some(qs) = q.to_u64().filter(|&x| x <= SCAN_LIMIT) {
        return Ok((0..qs).map(BigInt::from).filter(|l| satisfies(f, l, &q)).collect());
    }
    // Level one: affine double roots mod p.
    let mut level: Vec<BigInt> = if p <= SCAN_LIMIT {
        (0..p).map(BigInt::from).filter(|l| satisfies(f, l, &pb)).collect()
    } else {
        match factor_modp(f, p) {
            Ok(fm) => fm
                .factors
                .iter()
                .filter(|(g, m)| *m >= 2 && g.len() == 2)
                .filter_map(|(g, _)| fm.linear_root(g))
                .map(BigInt::from)
                .filter(|l| satisfies(f, l, &pb))
                .collect(),
            Err(_) => return Err(Error::Budget { needed: p.to_string(), budget: SCAN_LIMIT }),
        }
    };
    let mut pj = pb.clone();
    for _ in 1..e {
        let next_q = &pj * &pb;
        let mut next = Vec::new();
        for l in &level {
            let f2 = second_derivative(f, l);
            if !f2.is_multiple_of(&pb) {
                // f_X(l + p^j t) = f_X(l) + p^j t f_XX(l) mod p^{j+1}
                let u = (f.deriv_affine(l) / &pj).mod_floor(&pb);
                let inv = f2.mod_floor(&pb).modpow(&(&pb - 2u32), &pb);
                let t = (-(u * inv)).mod_floor(&pb);
                let cand = l + &pj * t;
                if satisfies(f, &cand, &next_q) {
                    next.push(cand);
                }
            } else if p <= SCAN_LIMIT {
                for t in 0..p {
                    let cand = l + &pj * BigInt::from(t);
                    if satisfies(f, &cand, &next_q) {
                        next.push(cand);
                    }
                }
            } else {
                return Err(Error::Budget { needed: p.to_string(), budget: SCAN_LIMIT });
            }
        }
        level = next;
        pj = next_q;
    }
    level.sort();
    level.dedup();
    Ok(level)
}

/// The least witness `l` for modulus `m`, if one exists.
pub fn find_witness(f: &BinaryForm, m: &BigInt) -> Result<Option<WeakDivWitness>> {
    if !m.is_positive() {
        return Err(Error::Precondition("modulus must be positive".into()));
    }
    if m.is_one() {
        return Ok(Some(WeakDivWitness { m: m.clone(), l: BigInt::zero() }));
    }
    let fac = factor_integer(m)?;
    find_witness_factored(f, &fac)
}

pub(crate) fn find_witness_factored(f: &BinaryForm, m: &Factorization) -> Result<Option<WeakDivWitness>> {
    let mut combos: Vec<(BigInt, BigInt)> = vec![(BigInt::zero(), BigInt::one())];
    for &(p, e) in &m.primes {
        let sols = prime_power_solutions(f, p, e)?;
        if sols.is_empty() {
            return Ok(None);
        }
        if combos.len() * sols.len() > COMBINATION_LIMIT {
            return Err(Error::Budget { needed: (combos.len() * sols.len()).to_string(), budget: COMBINATION_LIMIT as u64 });
        }
        let q = num_traits::pow(BigInt::from(p), e as usize);
        let q = &q;
        combos = combos
            .iter()
            .flat_map(|(r, md)| sols.iter().map(move |s| (crt_pair(r, md, s, q), md * q)))
            .collect();
    }
    let (l, md) = combos.into_iter().min().expect("nonempty");
    let w = WeakDivWitness { m: md, l };
    debug_assert!(w.is_valid_for(f));
    Ok(Some(w))
}

/// The ring `<B_0, ..., B_{n-2}, B_{n-1}/m>` of `translate(f, l)`.
pub fn weakly_divisible_ring(f: &BinaryForm, w: &WeakDivWitness) -> Result<RingPresentation> {
    if !w.is_valid_for(f) {
        return Err(Error::Precondition(format!("({}, {}) is not a weak divisibility witness", w.m, w.l)));
    }
    let g = f.translate(&w.l);
    let n = g.degree();
    let mut basis = binary_basis(&g, false);
    let inv_m = BigRational::new(BigInt::one(), w.m.clone());
    for x in basis[n - 1].iter_mut() {
        *x *= &inv_m;
    }
    let mut names: Vec<String> = (0..n).map(|k| format!("B_{k}")).collect();
    if !w.m.is_one() {
        names[n - 1] = format!("B_{}/{}", n - 1, w.m);
    }
    let origin = RingOrigin { form: f.clone(), witness: Some(w.clone()), basis: BasisKind::WeaklyDivisible };
    let r = ring_from_basis(&g, &basis, names, origin)?;
    check_wd_rows(&r, &g, &w.m)?;
    Ok(r)
}

/// Cross-checks the last row of a weakly divisible table. With
/// `C_k = B_k + a_k` for `k < n-1`, `C_{n-1} = (B_{n-1} + a_{n-1})/m`,
/// `A_0 = a_n/m^2` and `A_1 = a_{n-1}/m`:
/// `C_{n-1}^2 = -A_0 C_{n-2} + A_1 C_{n-1}` and
/// `C_{n-1} C_{n-i} = -m A_0 C_{n-i-1} + a_{n-i} C_{n-1}` for `2 <= i <= n-2`.
fn check_wd_rows(r: &RingPresentation, g: &BinaryForm, m: &BigInt) -> Result<()> {
    let n = r.n;
    let c = g.coeffs();
    let a0 = &c[n] / (m * m);
    let a1 = &c[n - 1] / m;
    let shift = |k: usize| -> Vec<BigInt> {
        let mut v = r.unit_vector(k);
        if k > 0 {
            v[0] = if k == n - 1 { &c[k] / m } else { c[k].clone() };
        }
        v
    };
    let combo = |x: &BigInt, j: usize, y: &BigInt| -> Vec<BigInt> {
        shift(j).iter().zip(shift(n - 1)).map(|(u, v)| x * u + y * v).collect()
    };
    let last = shift(n - 1);
    if n >= 2 && r.mul(&last, &last) != combo(&-&a0, n - 2, &a1) {
        return Err(Error::Internal("weakly divisible square row fails".into()));
    }
    for i in 2..n.saturating_sub(1) {
        if r.mul(&last, &shift(n - i)) != combo(&-(m * &a0), n - i - 1, &c[n - i]) {
            return Err(Error::Internal(format!("weakly divisible row fails at i = {i}")));
        }
    }
    Ok(())
}

/// Per-prime outcome for a prime with `p^2 | disc(f)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    /// Unique affine double root lifting to a witness for `p`.
    WeaklyDivisible {
        #[serde(serialize_with = "crate::ser::decimal")]
        l: BigInt,
    },
    /// The double point is at infinity.
    ReverseWeaklyDivisible,
    StronglyDivisible,
    /// A unique affine double root with `p^2 | disc(f)` that is not a witness for `p`.
    NotWeaklyDivisible { l: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UwdReport {
    pub is_uwd: bool,
    pub per_prime: Vec<(u64, DoubleRootProfile, Verdict)>,
}

/// Ultra weak divisibility: every `p` with `p^2 | disc(f)` gives a witness for `p`.
pub fn is_uwd(f: &BinaryForm, disc_factors: &Factorization) -> Result<UwdReport> {
    let d = f.discriminant();
    if d.is_zero() {
        return Err(Error::Degenerate("zero discriminant".into()));
    }
    if disc_factors.n != d {
        return Err(Error::IncompleteFactorization(format!("factorisation is of {}, disc is {d}", disc_factors.n)));
    }
    let mut per_prime = Vec::new();
    for &(p, e) in &disc_factors.primes {
        if e < 2 {
            continue;
        }
        let prof = profile_reduced(&reduce_coeffs(f, p), p);
        let verdict = match prof.kind {
            ProfileKind::StronglyDivisible(_) => Verdict::StronglyDivisible,
            ProfileKind::DoubleAtInfinity => Verdict::ReverseWeaklyDivisible,
            ProfileKind::UniqueAffineDouble { l } => {
                let lb = BigInt::from(l);
                if satisfies(f, &lb, &BigInt::from(p)) {
                    Verdict::WeaklyDivisible { l: lb }
                } else {
                    Verdict::NotWeaklyDivisible { l }
                }
            }
            ProfileKind::Smooth => {
                return Err(Error::Internal(format!("p = {p} divides disc but f is smooth mod p")));
            }
        };
        per_prime.push((p, prof, verdict));
    }
    let is_uwd = per_prime.iter().all(|(_, _, v)| matches!(v, Verdict::WeaklyDivisible { .. }));
    Ok(UwdReport { is_uwd, per_prime })
}

/// `disc(f) = s m_f^2` with `s` squarefree and `m_f` a witness modulus at `l_f`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MaxWitness {
    #[serde(serialize_with = "crate::ser::decimal")]
    pub m_f: BigInt,
    #[serde(serialize_with = "crate::ser::decimal")]
    pub l_f: BigInt,
    #[serde(serialize_with = "crate::ser::decimal")]
    pub s: BigInt,
}

impl MaxWitness {
    pub fn witness(&self) -> WeakDivWitness {
        WeakDivWitness { m: self.m_f.clone(), l: self.l_f.clone() }
    }
}

/// The maximal witness of a UWD form.
pub fn max_witness(f: &BinaryForm, disc_factors: &Factorization) -> Result<MaxWitness> {
    let report = is_uwd(f, disc_factors)?;
    if !report.is_uwd {
        return Err(Error::Precondition("form is not ultra weakly divisible".into()));
    }
    let t = disc_factors.square_root_part();
    let tf = Factorization::new(
        t.clone(),
        disc_factors.primes.iter().map(|&(p, e)| (p, e / 2)).collect(),
    )?;
    let w = find_witness_factored(f, &tf)?
        .ok_or_else(|| Error::TheoremViolated(format!("no witness for m = {t} on a UWD form")))?;
    Ok(MaxWitness { m_f: w.m, l_f: w.l, s: disc_factors.squarefree_part() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::binring::{binary_ring_unchecked, ring_disc};
    use proptest::prelude::*;

    fn bf(c: &[i64]) -> BinaryForm {
        BinaryForm::from_i64(c).unwrap()
    }

    fn b(x: i64) -> BigInt {
        BigInt::from(x)
    }

    #[test]
    fn witness_examples() {
        let f = bf(&[1, 1, 1]);
        assert_eq!(find_witness(&f, &b(1)).unwrap(), Some(WeakDivWitness { m: b(1), l: b(0) }));
        assert_eq!(find_witness(&f, &b(2)).unwrap(), None);
        for p in [2i64, 3, 101, 10_007] {
            let g = bf(&[1, 0, 0, p * p]);
            assert_eq!(find_witness(&g, &b(p)).unwrap(), Some(WeakDivWitness { m: b(p), l: b(0) }));
        }
    }

    #[test]
    fn reducible_cubic_maximal_witness() {
        let f = bf(&[1, 1, 0, 4]);
        let d = factor_integer(&f.discriminant()).unwrap();
        let rep = is_uwd(&f, &d).unwrap();
        assert!(rep.is_uwd);
        let mw = max_witness(&f, &d).unwrap();
        assert_eq!((mw.m_f.clone(), mw.l_f.clone(), mw.s.clone()), (b(8), b(6), b(-7)));
        let r = weakly_divisible_ring(&f, &mw.witness()).unwrap();
        assert_eq!(ring_disc(&r), b(-7));
    }

    #[test]
    fn strongly_divisible_and_squarefree() {
        // X^2 Y^2 mod 3 after adding 3(...)
        let f = bf(&[3, 3, 1, 0, 9]);
        let d = factor_integer(&f.discriminant()).unwrap();
        let rep = is_uwd(&f, &d).unwrap();
        assert!(rep.per_prime.iter().any(|(p, _, v)| *p == 3 && *v == Verdict::StronglyDivisible) || !rep.is_uwd);
        // disc 8: the double root 0 mod 2 is not a witness since 4 does not divide -2.
        let g = bf(&[1, 0, -2]);
        let dg = factor_integer(&g.discriminant()).unwrap();
        let rep = is_uwd(&g, &dg).unwrap();
        assert!(!rep.is_uwd);
        assert_eq!(rep.per_prime[0].2, Verdict::NotWeaklyDivisible { l: 0 });
        let rg = is_uwd(&bf(&[1, 1, -1]), &factor_integer(&b(5)).unwrap()).unwrap();
        assert!(rg.is_uwd && rg.per_prime.is_empty());
    }

    #[test]
    fn unit_modulus_ring_matches_binary_ring() {
        let f = bf(&[2, -3, 5, 7]);
        let w = WeakDivWitness { m: b(1), l: b(0) };
        assert_eq!(weakly_divisible_ring(&f, &w).unwrap().structure, binary_ring_unchecked(&f).unwrap().structure);
    }

    #[test]
    fn large_prime_lifts() {
        let p = 1_000_003i64;
        // (X - 5)^2 (X + 1) + p^4 has a witness mod p^2 at l = 5.
        let base = [1i64, -9, 15, 25];
        let mut c: Vec<BigInt> = base.iter().map(|&x| b(x)).collect();
        c[3] += num_traits::pow(b(p), 4);
        let f = BinaryForm::new(c).unwrap();
        let sols = prime_power_solutions(&f, p as u64, 2).unwrap();
        assert_eq!(sols, vec![b(5)]);
    }

    #[test]
    fn maximal_witness_can_fail_at_two() {
        // Unique affine double root at 1 mod 2 with v_2(disc) = 5, yet no l mod 4
        // has 16 | f(l) and 4 | f_X(l).
        let f = bf(&[28, -21, 26, -13]);
        let d = factor_integer(&f.discriminant()).unwrap();
        assert_eq!(d.valuation(2), 5);
        assert!(is_uwd(&f, &d).unwrap().is_uwd);
        assert!(matches!(max_witness(&f, &d), Err(Error::TheoremViolated(_))));
    }

    proptest! {
        #[test]
        fn witness_rings_are_integral(c in prop::collection::vec(-30i64..=30, 4..=5), m in 1i64..=12) {
            let mut c = c;
            if c[0] == 0 { c[0] = 1; }
            let f = bf(&c);
            prop_assume!(!f.discriminant().is_zero());
            if let Some(w) = find_witness(&f, &b(m)).unwrap() {
                prop_assert!(w.is_valid_for(&f));
                let r = weakly_divisible_ring(&f, &w).unwrap();
                prop_assert!(r.check_axioms().is_ok());
                prop_assert_eq!(ring_disc(&r) * &w.m * &w.m, f.discriminant());
                // The least witness: nothing smaller works.
                for l in 0..w.l.to_i64().unwrap() {
                    prop_assert!(!satisfies(&f, &b(l), &b(m)));
                }
            }
        }

        #[test]
        fn uwd_valuations(c in prop::collection::vec(-40i64..=40, 4..=4)) {
            let mut c = c;
            if c[0] == 0 { c[0] = 1; }
            let f = bf(&c);
            let d = f.discriminant();
            prop_assume!(!d.is_zero());
            let fac = factor_integer(&d).unwrap();
            let rep = is_uwd(&f, &fac).unwrap();
            if rep.is_uwd {
                match max_witness(&f, &fac) {
                    Ok(mw) => {
                        let mf = factor_integer(&mw.m_f).unwrap();
                        for &(p, e) in &fac.primes {
                            prop_assert_eq!(mf.valuation(p), e / 2);
                        }
                        prop_assert_eq!(&mw.s * &mw.m_f * &mw.m_f, d);
                    }
                    Err(Error::TheoremViolated(_)) => {
                        // Only the prime 2 may obstruct; the odd part always lifts.
                        let odd: Vec<(u64, u32)> =
                            fac.primes.iter().filter(|&&(p, _)| p != 2).map(|&(p, e)| (p, e / 2)).collect();
                        let t = odd.iter().map(|&(p, e)| num_traits::pow(b(p as i64), e as usize)).product();
                        let tf = Factorization::new(t, odd).unwrap();
                        prop_assert!(find_witness_factored(&f, &tf).unwrap().is_some());
                    }
                    Err(e) => prop_assert!(false, "{e}"),
                }
            }
        }
    }
}
