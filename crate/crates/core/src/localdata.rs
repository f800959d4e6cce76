//! Local data of binary rings: Dedekind-Kummer splitting with the binary
//! Dedekind criterion, pseudo-maximal classification at a double-root
//! cluster, small-prime feasibility and restricted sudo-maximal order counts.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::factor::Factorization;
use crate::forms::BinaryForm;
use crate::modp::poly::Fp;
use crate::modp::{count_h, factor_modp, is_prime};
use crate::weakdiv::{is_uwd, Verdict, WeakDivWitness};

/// Which prime of `R_f` a part describes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum PartFactor {
    /// Monic irreducible `g(X, Y)` mod `p`, leading coefficient first.
    Affine(Vec<u64>),
    /// The factor `Y`.
    Infinity,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Part {
    pub e: u32,
    pub f: u32,
    pub locally_maximal: bool,
    /// `e` is the factor multiplicity, not a ramification index, when the part is not maximal.
    pub nominal: bool,
    pub factor: PartFactor,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SplittingProfile {
    pub p: u64,
    pub parts: Vec<Part>,
}

impl SplittingProfile {
    pub fn is_locally_maximal(&self) -> bool {
        self.parts.iter().all(|q| q.locally_maximal)
    }

    pub fn degree(&self) -> u32 {
        self.parts.iter().map(|q| q.e * q.f).sum()
    }
}

fn int_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Splitting of `p` in `R_f` read off `f mod p`, with each part tested by the
/// binary Dedekind criterion.
pub fn dedekind_kummer(f: &BinaryForm, p: u64) -> Result<SplittingProfile> {
    if !f.is_primitive() {
        return Err(Error::NotPrimitive);
    }
    let fm = factor_modp(f, p)?;
    let n = f.degree();
    let k = fm.infinity_multiplicity as usize;
    let fp = Fp::new(p);
    let pb = BigInt::from(p);

    // Lift u * Y^k * prod g_i^{e_i} to Z and form h = (f - lift) / p.
    let mut prod: Vec<BigInt> = vec![BigInt::from(fm.unit)];
    for (g, e) in &fm.factors {
        let low: Vec<BigInt> = g.iter().rev().map(|&c| BigInt::from(c)).collect();
        for _ in 0..*e {
            prod = int_mul(&prod, &low);
        }
    }
    let mut lift = vec![BigInt::zero(); k];
    lift.extend(prod.into_iter().rev());
    lift.resize(n + 1, BigInt::zero());
    let h: Vec<u64> = f
        .coeffs()
        .iter()
        .zip(&lift)
        .map(|(a, b)| {
            let d = a - b;
            debug_assert!(d.is_multiple_of(&pb));
            (d / &pb).mod_floor(&pb).to_u64().unwrap()
        })
        .collect();
    let h_affine = fp.trim(h.iter().rev().copied().collect());

    let mut parts = Vec::new();
    for (g, e) in &fm.factors {
        let divides = fp.rem(&h_affine, &fp.trim(g.iter().rev().copied().collect())).is_empty();
        let max = *e == 1 || !divides;
        parts.push(Part { e: *e, f: (g.len() - 1) as u32, locally_maximal: max, nominal: !max, factor: PartFactor::Affine(g.clone()) });
    }
    if k > 0 {
        let max = k == 1 || h[0] != 0;
        parts.push(Part { e: k as u32, f: 1, locally_maximal: max, nominal: !max, factor: PartFactor::Infinity });
    }
    Ok(SplittingProfile { p, parts })
}

/// Monic criterion: `Z[x]/(f)` fails to be maximal at `(p, g)` iff
/// `f ∈ (p^2, p g, g^2)`. Returns the factors (affine, monic) at which it fails.
pub fn monic_nonmaximal_factors(f: &BinaryForm, p: u64) -> Result<Vec<Vec<u64>>> {
    if !f.leading().is_one() {
        return Err(Error::Precondition("monic criterion needs leading coefficient 1".into()));
    }
    let fm = factor_modp(f, p)?;
    let fp = Fp::new(p);
    let pb = BigInt::from(p);
    let mut bad = Vec::new();
    for (g, e) in &fm.factors {
        if *e < 2 {
            continue;
        }
        let gl: Vec<BigInt> = g.iter().rev().map(|&c| BigInt::from(c)).collect();
        let g2 = int_mul(&gl, &gl);
        // Remainder of f by the monic g^2 over Z, low first.
        let mut r: Vec<BigInt> = f.coeffs().iter().rev().cloned().collect();
        let d = g2.len() - 1;
        for top in (d..r.len()).rev() {
            let c = r[top].clone();
            if c.is_zero() {
                continue;
            }
            for (i, gc) in g2.iter().enumerate() {
                r[top - d + i] -= &c * gc;
            }
        }
        r.truncate(d);
        if r.iter().all(|c| c.is_multiple_of(&pb)) {
            let rp: Vec<u64> = r.iter().map(|c| (c / &pb).mod_floor(&pb).to_u64().unwrap()).collect();
            let rp = fp.trim(rp);
            let gp = fp.trim(g.iter().rev().copied().collect());
            if fp.rem(&rp, &gp).is_empty() {
                bad.push(g.clone());
            }
        }
    }
    Ok(bad)
}

/// Local shape of a rank-2 cluster.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum PseudoCase {
    /// Two primes of norm `p`.
    A,
    /// One prime of norm `p^2`.
    B,
    /// One prime, ramified.
    C,
}

impl PseudoCase {
    /// `(e, f)` pairs of the maximal order at the cluster.
    pub fn parts(self) -> Vec<(u32, u32)> {
        match self {
            PseudoCase::A => vec![(1, 1), (1, 1)],
            PseudoCase::B => vec![(1, 2)],
            PseudoCase::C => vec![(2, 1)],
        }
    }

    pub fn from_parts(parts: &[(u32, u32)]) -> Result<Self> {
        let mut s = parts.to_vec();
        s.sort_unstable();
        match s.as_slice() {
            [(1, 1), (1, 1)] => Ok(PseudoCase::A),
            [(1, 2)] => Ok(PseudoCase::B),
            [(2, 1)] => Ok(PseudoCase::C),
            _ => Err(Error::Precondition(format!("parts {parts:?} do not have total ef = 2"))),
        }
    }
}

/// The quadratic factor of `f` over `Z_p` at a double root, with the index of
/// `Z_p[x]/(q)` in its maximal order (`p^r`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LocalQuadratic {
    pub p: u64,
    pub l: u64,
    pub v: u32,
    pub case: PseudoCase,
    pub r: u32,
}

fn mod_poly(a: &mut [BigInt], q: &BigInt) {
    for c in a.iter_mut() {
        *c = c.mod_floor(q);
    }
}

/// Hensel factor `x^2 + βx + γ` of `translate(f, l)` at the double root `0 mod p`.
pub fn local_quadratic(f: &BinaryForm, p: u64, l: u64) -> Result<LocalQuadratic> {
    let g = f.translate(&BigInt::from(l));
    let n = g.degree();
    let pb = BigInt::from(p);
    let big: Vec<BigInt> = g.coeffs().iter().rev().cloned().collect();
    if !big[0].is_multiple_of(&pb) || !big[1].is_multiple_of(&pb) {
        return Err(Error::Precondition(format!("{l} is not a double root mod {p}")));
    }
    if big[2].is_multiple_of(&pb) {
        return Err(Error::Precondition(format!("{l} is at least a triple root mod {p}")));
    }
    let d = g.discriminant();
    if d.is_zero() {
        return Err(Error::Degenerate("zero discriminant".into()));
    }
    let mut dd = d.clone();
    let mut big_d = 0u32;
    while dd.is_multiple_of(&pb) {
        dd /= &pb;
        big_d += 1;
    }
    let prec = big_d + 4;
    let modulus = num_traits::pow(pb.clone(), prec as usize);
    let fp = Fp::new(p);
    let red = |x: &BigInt| x.mod_floor(&pb).to_u64().unwrap();

    // u = g / x^2 mod p; t = u^{-1} mod x^2; s = (1 - t u) / x^2.
    let ubar: Vec<u64> = fp.trim(big[2..].iter().map(red).collect());
    let t0 = fp.inv(ubar[0]);
    let u1 = ubar.get(1).copied().unwrap_or(0);
    let t = vec![t0, fp.neg(fp.mul(u1, fp.mul(t0, t0)))];
    let tu = fp.mul_poly(&t, &ubar);
    let one_minus = fp.sub_poly(&vec![1], &tu);
    let s: Vec<u64> = one_minus.iter().skip(2).copied().collect();
    debug_assert!(one_minus.iter().take(2).all(|&c| c == 0));

    let mut q: Vec<BigInt> = vec![BigInt::zero(), BigInt::zero(), BigInt::one()];
    let mut u: Vec<BigInt> = big[2..].to_vec();
    let mut pj = pb.clone();
    for _ in 1..prec {
        let qu = int_mul(&q, &u);
        let err: Vec<u64> = (0..=n)
            .map(|i| {
                let diff = &big[i] - qu.get(i).cloned().unwrap_or_default();
                debug_assert!(diff.is_multiple_of(&pj));
                red(&(diff / &pj))
            })
            .collect();
        let err = fp.trim(err);
        let te = fp.mul_poly(&t, &err);
        let r: Vec<u64> = te.iter().take(2).copied().collect();
        let c: Vec<u64> = te.iter().skip(2).copied().collect();
        let du = fp.add_poly(&fp.mul_poly(&s, &err), &fp.mul_poly(&c, &ubar));
        for (i, x) in r.iter().enumerate() {
            q[i] += &pj * BigInt::from(*x);
        }
        if u.len() < du.len() {
            u.resize(du.len(), BigInt::zero());
        }
        for (i, x) in du.iter().enumerate() {
            u[i] += &pj * BigInt::from(*x);
        }
        pj *= &pb;
        mod_poly(&mut q, &modulus);
        mod_poly(&mut u, &modulus);
    }
    let disc = (&q[1] * &q[1] - BigInt::from(4) * &q[0]).mod_floor(&modulus);
    if disc.is_zero() {
        return Err(Error::Precision(format!("local discriminant vanishes mod {p}^{prec}")));
    }
    let mut v = 0u32;
    let mut unit = disc;
    while unit.is_multiple_of(&pb) {
        unit /= &pb;
        v += 1;
    }
    let (case, r) = if p == 2 {
        let u8 = unit.mod_floor(&BigInt::from(8)).to_u64().unwrap();
        if v % 2 == 1 {
            (PseudoCase::C, (v - 3) / 2)
        } else if u8 % 4 == 3 {
            (PseudoCase::C, (v - 2) / 2)
        } else if u8 == 1 {
            (PseudoCase::A, v / 2)
        } else {
            (PseudoCase::B, v / 2)
        }
    } else if v % 2 == 1 {
        (PseudoCase::C, (v - 1) / 2)
    } else {
        let um = red(&unit);
        if fp.pow(um, (p - 1) / 2) == 1 {
            (PseudoCase::A, v / 2)
        } else {
            (PseudoCase::B, v / 2)
        }
    };
    Ok(LocalQuadratic { p, l, v, case, r })
}

/// A pseudo-maximal local order: conductor exponents and index `p^index_exponent`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PseudoMaxDescriptor {
    pub case: PseudoCase,
    /// `(a, b)` for the split pair, `(a)` otherwise.
    pub conductor: Vec<u32>,
    pub index_exponent: u32,
}

/// The unique irreducible order with the given local shape and conductor
/// exponents, when one exists.
pub fn enumerate_pseudo_maximal(parts: &[(u32, u32)], conductor: &[u32]) -> Result<Option<PseudoMaxDescriptor>> {
    let case = PseudoCase::from_parts(parts)?;
    let expect = if case == PseudoCase::A { 2 } else { 1 };
    if conductor.len() != expect || conductor.contains(&0) {
        return Err(Error::Precondition(format!("case {case:?} needs {expect} positive conductor exponents")));
    }
    let index = match case {
        PseudoCase::A if conductor[0] != conductor[1] => return Ok(None),
        PseudoCase::A | PseudoCase::B => conductor[0],
        PseudoCase::C if conductor[0] % 2 == 1 => return Ok(None),
        PseudoCase::C => conductor[0] / 2,
    };
    Ok(Some(PseudoMaxDescriptor { case, conductor: conductor.to_vec(), index_exponent: index }))
}

/// The pseudo-maximal order of index `p^r` for a local shape.
pub fn order_with_index(case: PseudoCase, r: u32) -> Result<PseudoMaxDescriptor> {
    if r == 0 {
        return Err(Error::Precondition("index exponent must be positive".into()));
    }
    let conductor = match case {
        PseudoCase::A => vec![r, r],
        PseudoCase::B => vec![r],
        PseudoCase::C => vec![2 * r],
    };
    Ok(enumerate_pseudo_maximal(&case.parts(), &conductor)?.expect("index exists for every shape"))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum PrimeClass {
    Maximal,
    PseudoMaximal(PseudoMaxDescriptor),
    Other,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrderClass {
    pub per_prime: Vec<(u64, PrimeClass)>,
    pub sudo_maximal: bool,
    pub restricted_sudo_maximal: bool,
}

/// Classifies `R'_{(f, w)}` at every prime whose square divides `disc(f)`.
pub fn classify_order(f: &BinaryForm, w: &WeakDivWitness, disc_factors: &Factorization) -> Result<OrderClass> {
    if !f.is_primitive() {
        return Err(Error::NotPrimitive);
    }
    if !w.is_valid_for(f) {
        return Err(Error::Precondition("invalid witness".into()));
    }
    let report = is_uwd(f, disc_factors)?;
    let mut per_prime = Vec::new();
    for (p, _, verdict) in &report.per_prime {
        let class = match verdict {
            Verdict::WeaklyDivisible { l } => {
                let lq = local_quadratic(f, *p, l.to_u64().expect("residue below p"))?;
                let vm = {
                    let mut m = w.m.clone();
                    let mut k = 0u32;
                    while m.is_multiple_of(&BigInt::from(*p)) {
                        m /= *p;
                        k += 1;
                    }
                    k
                };
                if vm > lq.r {
                    return Err(Error::TheoremViolated(format!(
                        "witness exponent {vm} exceeds local index exponent {} at {p}",
                        lq.r
                    )));
                }
                match lq.r - vm {
                    0 => PrimeClass::Maximal,
                    r => PrimeClass::PseudoMaximal(order_with_index(lq.case, r)?),
                }
            }
            _ => PrimeClass::Other,
        };
        per_prime.push((*p, class));
    }
    let sudo = per_prime.iter().all(|(_, c)| !matches!(c, PrimeClass::Other));
    // One double-root cluster per prime gives at most one non-maximal prime above it.
    Ok(OrderClass { per_prime, sudo_maximal: sudo, restricted_sudo_maximal: sudo })
}

/// `|T(p, f)| <= H(p, 1) + 1` for `f = 1` and `|T(p, f)| <= H(p, f)` for `f >= 2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Feasibility {
    pub feasible: bool,
    /// `(f, |T(p, f)|, bound)` for the first violated inequality.
    pub violated: Option<(u32, u64, BigInt)>,
}

pub fn small_prime_feasibility(profile: &SplittingProfile) -> Feasibility {
    let mut counts: BTreeMap<u32, u64> = BTreeMap::new();
    for part in &profile.parts {
        *counts.entry(part.f).or_default() += 1;
    }
    for (&f, &c) in &counts {
        let bound = count_h(profile.p, f) + if f == 1 { BigInt::one() } else { BigInt::zero() };
        if BigInt::from(c) > bound {
            return Feasibility { feasible: false, violated: Some((f, c, bound)) };
        }
    }
    Feasibility { feasible: true, violated: None }
}

/// `C_{K,p^k}`: unordered pairs of `(1,1)` parts plus `(1,2)` and `(2,1)` parts.
pub fn local_order_count(parts: &[(u32, u32)]) -> u64 {
    let split = parts.iter().filter(|&&x| x == (1, 1)).count() as u64;
    let other = parts.iter().filter(|&&x| x == (1, 2) || x == (2, 1)).count() as u64;
    split * split.saturating_sub(1) / 2 + other
}

/// Splitting of `p` in the maximal order of a field, as `(e, f)` pairs.
pub trait ProfileSource {
    fn degree(&self) -> usize;
    fn parts(&self, p: u64) -> Result<Vec<(u32, u32)>>;
}

/// Profiles from an irreducible form: Dedekind-Kummer where `R_f` is maximal,
/// and the Hensel cluster at double roots where it is not.
pub struct FormProfiles {
    pub form: BinaryForm,
}

impl ProfileSource for FormProfiles {
    fn degree(&self) -> usize {
        self.form.degree()
    }

    fn parts(&self, p: u64) -> Result<Vec<(u32, u32)>> {
        let prof = dedekind_kummer(&self.form, p)?;
        let mut out = Vec::new();
        for part in prof.parts {
            if part.locally_maximal {
                out.push((part.e, part.f));
                continue;
            }
            match (&part.factor, part.e, part.f) {
                (PartFactor::Affine(g), 2, 1) => {
                    let l = Fp::new(p).neg(g[1]);
                    out.extend(local_quadratic(&self.form, p, l)?.case.parts());
                }
                (PartFactor::Infinity, 2, 1) => {
                    out.extend(local_quadratic(&self.form.reverse(), p, 0)?.case.parts());
                }
                _ => {
                    return Err(Error::Precondition(format!(
                        "no maximal-order profile at {p}: non-maximal part with e = {}, f = {}",
                        part.e, part.f
                    )))
                }
            }
        }
        Ok(out)
    }
}

/// Profiles read from lines `p: (e,f,max);(e,f,max);...`. A line starting
/// with `*:` supplies the profile of every prime not listed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FileProfiles {
    pub degree: usize,
    pub primes: BTreeMap<u64, Vec<(u32, u32, bool)>>,
    pub default: Option<Vec<(u32, u32, bool)>>,
}

fn parse_parts(s: &str) -> Result<Vec<(u32, u32, bool)>> {
    s.split(';')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(|item| {
            let inner = item
                .strip_prefix('(')
                .and_then(|x| x.strip_suffix(')'))
                .ok_or_else(|| Error::Parse(format!("expected (e,f,max), got {item}")))?;
            let fields: Vec<&str> = inner.split(',').map(str::trim).collect();
            if fields.len() < 2 || fields.len() > 3 {
                return Err(Error::Parse(format!("expected (e,f,max), got {item}")));
            }
            let num = |x: &str| x.parse::<u32>().map_err(|_| Error::Parse(format!("bad integer {x}")));
            let max = match fields.get(2).copied().unwrap_or("1") {
                "1" | "true" | "max" | "y" => true,
                "0" | "false" | "nonmax" | "n" => false,
                other => return Err(Error::Parse(format!("bad maximality flag {other}"))),
            };
            Ok((num(fields[0])?, num(fields[1])?, max))
        })
        .collect()
}

impl std::str::FromStr for FileProfiles {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut primes = BTreeMap::new();
        let mut default = None;
        let mut degree = None;
        for (no, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (head, rest) =
                line.split_once(':').ok_or_else(|| Error::Parse(format!("line {}: missing ':'", no + 1)))?;
            let parts = parse_parts(rest)?;
            let deg: u32 = parts.iter().map(|&(e, f, _)| e * f).sum();
            if *degree.get_or_insert(deg) != deg {
                return Err(Error::Parse(format!("line {}: total ef {deg} differs from earlier lines", no + 1)));
            }
            if head.trim() == "*" {
                default = Some(parts);
            } else {
                let p: u64 = head.trim().parse().map_err(|_| Error::Parse(format!("line {}: bad prime", no + 1)))?;
                if !is_prime(p) {
                    return Err(Error::NotPrime(p));
                }
                primes.insert(p, parts);
            }
        }
        let degree = degree.ok_or_else(|| Error::Parse("empty profile file".into()))? as usize;
        Ok(FileProfiles { degree, primes, default })
    }
}

impl ProfileSource for FileProfiles {
    fn degree(&self) -> usize {
        self.degree
    }

    fn parts(&self, p: u64) -> Result<Vec<(u32, u32)>> {
        self.primes
            .get(&p)
            .or(self.default.as_ref())
            .map(|v| v.iter().map(|&(e, f, _)| (e, f)).collect())
            .ok_or_else(|| Error::Precondition(format!("missing profile for p = {p}")))
    }
}

/// Partial sums `sum_{N <= x}` of the restricted sudo-maximal order counts and
/// of the coefficients of `ζ(s)^{C(n,2)}`, indexed by `x = 0..=X`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CountSeries {
    pub orders: Vec<u64>,
    pub zeta_power: Vec<u64>,
    pub zeta_exponent: usize,
}

fn smallest_prime_factors(x: usize) -> Vec<u32> {
    let mut spf = vec![0u32; x + 1];
    for i in 2..=x {
        if spf[i] == 0 {
            for j in (i..=x).step_by(i) {
                if spf[j] == 0 {
                    spf[j] = i as u32;
                }
            }
        }
    }
    spf
}

/// Coefficients of `ζ(s)^k` up to `x` by iterated convolution with `1`.
pub fn zeta_power_coefficients(k: usize, x: usize) -> Vec<u64> {
    let mut d = vec![0u64; x + 1];
    if x >= 1 {
        d[1] = 1;
    }
    for _ in 0..k {
        let mut next = vec![0u64; x + 1];
        for a in 1..=x {
            if d[a] == 0 {
                continue;
            }
            for b in (a..=x).step_by(a) {
                next[b] += d[a];
            }
        }
        d = next;
    }
    d
}

fn prefix_sums(a: &[u64]) -> Vec<u64> {
    let mut acc = 0u64;
    a.iter().map(|&v| {
        acc += v;
        acc
    }).collect()
}

pub fn count_restricted_sudo_maximal(src: &dyn ProfileSource, x: usize) -> Result<CountSeries> {
    let spf = smallest_prime_factors(x);
    let mut local: BTreeMap<u32, u64> = BTreeMap::new();
    for p in 2..=x {
        if spf[p] as usize == p {
            local.insert(p as u32, local_order_count(&src.parts(p as u64)?));
        }
    }
    let mut a = vec![0u64; x + 1];
    if x >= 1 {
        a[1] = 1;
    }
    for nn in 2..=x {
        let p = spf[nn] as usize;
        let mut rest = nn;
        while rest % p == 0 {
            rest /= p;
        }
        a[nn] = local[&(p as u32)] * a[rest];
    }
    let n = src.degree();
    let k = n * (n - 1) / 2;
    Ok(CountSeries { orders: prefix_sums(&a), zeta_power: prefix_sums(&zeta_power_coefficients(k, x)), zeta_exponent: k })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::factor::factor_integer;
    use proptest::prelude::*;

    fn bf(c: &[i64]) -> BinaryForm {
        BinaryForm::from_i64(c).unwrap()
    }

    #[test]
    fn quadratic_examples() {
        let g = dedekind_kummer(&bf(&[1, 0, 1]), 2).unwrap();
        assert_eq!(g.parts.len(), 1);
        assert!(g.parts[0].locally_maximal && g.parts[0].e == 2 && g.parts[0].f == 1);
        let h = dedekind_kummer(&bf(&[1, 0, 3]), 2).unwrap();
        assert!(!h.parts[0].locally_maximal && h.parts[0].nominal);
        let e = dedekind_kummer(&bf(&[1, 1, 1]), 3).unwrap();
        assert!(e.is_locally_maximal() && e.parts[0].e == 2);
    }

    #[test]
    fn infinity_part_matches_reverse() {
        for c in [[4i64, 2, 1, 1], [9, 3, 5, 7], [8, 4, 6, 3]] {
            for p in [2u64, 3] {
                let f = bf(&c);
                let a = dedekind_kummer(&f, p).unwrap();
                let b = dedekind_kummer(&f.reverse(), p).unwrap();
                assert_eq!(a.is_locally_maximal(), b.is_locally_maximal(), "{c:?} at {p}");
            }
        }
    }

    #[test]
    fn classify_examples() {
        let f = bf(&[1, 0, 3]);
        let d = factor_integer(&f.discriminant()).unwrap();
        let one = WeakDivWitness { m: BigInt::one(), l: BigInt::zero() };
        let c = classify_order(&f, &one, &d).unwrap();
        assert_eq!(
            c.per_prime,
            vec![(2, PrimeClass::PseudoMaximal(PseudoMaxDescriptor { case: PseudoCase::B, conductor: vec![1], index_exponent: 1 }))]
        );
        assert!(c.restricted_sudo_maximal);
        let two = WeakDivWitness { m: BigInt::from(2), l: BigInt::one() };
        assert_eq!(classify_order(&f, &two, &d).unwrap().per_prime, vec![(2, PrimeClass::Maximal)]);
        let sq = bf(&[1, 1, -1]);
        let c = classify_order(&sq, &one, &factor_integer(&sq.discriminant()).unwrap()).unwrap();
        assert!(c.per_prime.is_empty() && c.sudo_maximal);
    }

    #[test]
    fn feasibility_examples() {
        let part = |f| Part { e: 1, f, locally_maximal: true, nominal: false, factor: PartFactor::Infinity };
        let prof = |fs: &[u32]| SplittingProfile { p: 2, parts: fs.iter().map(|&f| part(f)).collect() };
        assert!(small_prime_feasibility(&prof(&[1, 1, 1])).feasible);
        assert_eq!(small_prime_feasibility(&prof(&[1, 1, 1, 1])).violated, Some((1, 4, BigInt::from(3))));
        assert_eq!(small_prime_feasibility(&prof(&[2, 2])).violated, Some((2, 2, BigInt::one())));
    }

    #[test]
    fn pseudo_maximal_tables() {
        let a = [(1, 1), (1, 1)];
        assert_eq!(enumerate_pseudo_maximal(&a, &[3, 3]).unwrap().unwrap().index_exponent, 3);
        assert_eq!(enumerate_pseudo_maximal(&a, &[2, 3]).unwrap(), None);
        assert_eq!(enumerate_pseudo_maximal(&[(2, 1)], &[3]).unwrap(), None);
        assert_eq!(enumerate_pseudo_maximal(&[(2, 1)], &[4]).unwrap().unwrap().index_exponent, 2);
        assert_eq!(enumerate_pseudo_maximal(&[(1, 2)], &[5]).unwrap().unwrap().index_exponent, 5);
        assert!(enumerate_pseudo_maximal(&[(1, 1)], &[1]).is_err());
    }

    #[test]
    fn local_counts() {
        assert_eq!(local_order_count(&[(1, 1); 5]), 10);
        assert_eq!(local_order_count(&[(1, 1), (1, 2), (2, 1)]), 2);
        let quad = FormProfiles { form: bf(&[1, 1, -1]) };
        let s = count_restricted_sudo_maximal(&quad, 1000).unwrap();
        assert!(s.orders.iter().enumerate().all(|(x, &c)| c == x as u64));
        assert_eq!(zeta_power_coefficients(2, 12)[12], 6);
    }

    #[test]
    fn profile_file() {
        let text = "# cubic\n2: (1,1,1);(1,2,max)\n*: (1,1);(1,1);(1,1)\n";
        let fp: FileProfiles = text.parse().unwrap();
        assert_eq!(fp.degree, 3);
        assert_eq!(fp.parts(2).unwrap(), vec![(1, 1), (1, 2)]);
        assert_eq!(fp.parts(7).unwrap(), vec![(1, 1); 3]);
        assert!("2: (1,1)\n3: (1,2)".parse::<FileProfiles>().is_err());
    }

    #[test]
    fn local_quadratic_cases() {
        // x^2 + 3: disc -12 at 2, unit -3 = 5 mod 8: inert, index 2.
        let lq = local_quadratic(&bf(&[1, 0, 3]), 2, 1).unwrap();
        assert_eq!((lq.case, lq.r), (PseudoCase::B, 1));
        // x^2 - 7 * 9 at 3: v = 2, unit 28 = 1 mod 3: split, index 3.
        let lq = local_quadratic(&bf(&[1, 0, -63]), 3, 0).unwrap();
        assert_eq!((lq.case, lq.r), (PseudoCase::A, 1));
        // x^2 - 2 * 25 at 5: v = 2, unit 8 = 3 mod 5 non-square: inert.
        let lq = local_quadratic(&bf(&[1, 0, -50]), 5, 0).unwrap();
        assert_eq!((lq.case, lq.r), (PseudoCase::B, 1));
        // x^2 - 5 * 27 at 3: ramified, index 3.
        let lq = local_quadratic(&bf(&[1, 0, -135]), 3, 0).unwrap();
        assert_eq!((lq.case, lq.r), (PseudoCase::C, 1));
    }

    proptest! {
        #[test]
        fn monic_and_binary_agree(c in prop::collection::vec(-60i64..=60, 3..=4), p in prop::sample::select(vec![2u64, 3, 5, 7])) {
            let mut coeffs = vec![1i64];
            coeffs.extend(c);
            let f = bf(&coeffs);
            prop_assume!(!f.discriminant().is_zero());
            let prof = dedekind_kummer(&f, p).unwrap();
            let bad = monic_nonmaximal_factors(&f, p).unwrap();
            for part in &prof.parts {
                if let PartFactor::Affine(g) = &part.factor {
                    prop_assert_eq!(!part.locally_maximal, bad.contains(g));
                }
            }
            prop_assert_eq!(prof.degree() as usize, f.degree());
            prop_assert!(small_prime_feasibility(&prof).feasible);
        }

        #[test]
        fn uwd_forms_are_restricted_sudo_maximal(c in prop::collection::vec(-40i64..=40, 4..=4)) {
            let mut c = c;
            if c[0] == 0 { c[0] = 1; }
            let f = bf(&c);
            prop_assume!(f.is_primitive() && !f.discriminant().is_zero());
            let d = factor_integer(&f.discriminant()).unwrap();
            prop_assume!(is_uwd(&f, &d).unwrap().is_uwd);
            let one = WeakDivWitness { m: BigInt::one(), l: BigInt::zero() };
            prop_assert!(classify_order(&f, &one, &d).unwrap().restricted_sudo_maximal);
            for (p, _, v) in is_uwd(&f, &d).unwrap().per_prime {
                if let Verdict::WeaklyDivisible { l } = v {
                    let lq = local_quadratic(&f, p, l.to_u64().unwrap()).unwrap();
                    // The cluster carries the whole p-part of disc(f).
                    prop_assert_eq!(lq.v, d.valuation(p));
                    if p > 2 {
                        prop_assert_eq!(lq.r, d.valuation(p) / 2);
                    }
                }
            }
        }
    }
}
