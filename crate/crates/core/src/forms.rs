//! Integral binary forms `a_0 X^n + a_1 X^{n-1} Y + ... + a_n Y^n`.
//!
//! Coefficients are stored leading-first. Modules that follow the opposite
//! convention (`a_n` leading) re-index with `i -> n - i` at their boundary.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::{binomial, Integer};
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg::det_bareiss;
use crate::mpoly::{det_minor_expansion, MPoly, Monomial};

/// A nonzero binary form of degree `n >= 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BinaryForm {
    coeffs: Vec<BigInt>,
}

impl BinaryForm {
    /// Builds a form from its `n + 1` coefficients, leading first.
    pub fn new(coeffs: Vec<BigInt>) -> Result<Self> {
        if coeffs.len() < 2 {
            return Err(Error::Degenerate("a binary form needs at least two coefficients".into()));
        }
        if coeffs.iter().all(Zero::is_zero) {
            return Err(Error::ZeroForm);
        }
        Ok(BinaryForm { coeffs })
    }

    pub fn from_i64(coeffs: &[i64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> &BigInt {
        &self.coeffs[i]
    }

    pub fn leading(&self) -> &BigInt {
        &self.coeffs[0]
    }

    /// `f(x, y)`.
    pub fn eval(&self, x: &BigInt, y: &BigInt) -> BigInt {
        let n = self.degree();
        let mut s = BigInt::zero();
        let mut xp = BigInt::one();
        let mut ypows = vec![BigInt::one(); n + 1];
        for i in 1..=n {
            ypows[i] = &ypows[i - 1] * y;
        }
        for i in (0..=n).rev() {
            s += &self.coeffs[i] * &xp * &ypows[i];
            xp *= x;
        }
        s
    }

    /// `f(l, 1)` by Horner's rule.
    pub fn eval_affine(&self, l: &BigInt) -> BigInt {
        self.coeffs.iter().fold(BigInt::zero(), |acc, c| acc * l + c)
    }

    /// `(df/dX)(l, 1)`.
    pub fn deriv_affine(&self, l: &BigInt) -> BigInt {
        let n = self.degree();
        self.coeffs[..n]
            .iter()
            .enumerate()
            .fold(BigInt::zero(), |acc, (i, c)| acc * l + c * BigInt::from(n - i))
    }

    /// Coefficients of `df/dX` as a form of degree `n - 1` (may vanish).
    pub fn deriv_x_coeffs(&self) -> Vec<BigInt> {
        let n = self.degree();
        (0..n).map(|i| &self.coeffs[i] * BigInt::from(n - i)).collect()
    }

    /// `f(X + lY, Y)`.
    pub fn translate(&self, l: &BigInt) -> BinaryForm {
        let n = self.degree();
        let mut lp = vec![BigInt::one(); n + 1];
        for i in 1..=n {
            lp[i] = &lp[i - 1] * l;
        }
        let b = (0..=n)
            .map(|k| {
                (0..=k).fold(BigInt::zero(), |acc, i| {
                    acc + binomial(BigInt::from(n - i), BigInt::from(n - k)) * &self.coeffs[i] * &lp[k - i]
                })
            })
            .collect();
        BinaryForm { coeffs: b }
    }

    pub fn translate_i64(&self, l: i64) -> BinaryForm {
        self.translate(&BigInt::from(l))
    }

    /// Swap of X and Y: coefficients reversed.
    pub fn reverse(&self) -> BinaryForm {
        BinaryForm { coeffs: self.coeffs.iter().rev().cloned().collect() }
    }

    /// `f(X, Y + kX)`.
    pub fn shear_y(&self, k: &BigInt) -> BinaryForm {
        self.reverse().translate(k).reverse()
    }

    /// `(-1)^n f(-X, Y)`, which keeps the leading coefficient.
    pub fn flip(&self) -> BinaryForm {
        let n = self.degree();
        BinaryForm {
            coeffs: self.coeffs.iter().enumerate().map(|(i, c)| if i % 2 == 1 { -c } else { c.clone() }).collect::<Vec<_>>(),
        }
        .with_degree_check(n)
    }

    fn with_degree_check(self, n: usize) -> BinaryForm {
        debug_assert_eq!(self.degree(), n);
        self
    }

    pub fn scale(&self, c: &BigInt) -> Result<BinaryForm> {
        BinaryForm::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn neg(&self) -> BinaryForm {
        BinaryForm { coeffs: self.coeffs.iter().map(|a| -a).collect() }
    }

    pub fn content(&self) -> BigInt {
        content_of(&self.coeffs).expect("nonzero form")
    }

    pub fn primitive_part(&self) -> BinaryForm {
        let c = self.content();
        BinaryForm { coeffs: self.coeffs.iter().map(|a| a / &c).collect() }
    }

    pub fn is_primitive(&self) -> bool {
        self.content().is_one()
    }

    /// Discriminant `((-1)^{n(n-1)/2} / a_0) Res(f, df/dX)`.
    ///
    /// When `a_0 = 0` the value is taken from an `SL_2(Z)`-equivalent form
    /// with nonzero leading coefficient.
    pub fn discriminant(&self) -> BigInt {
        if !self.coeffs[0].is_zero() {
            return disc_leading_nonzero(&self.coeffs);
        }
        let n = self.degree();
        if !self.coeffs[n].is_zero() {
            return disc_leading_nonzero(&self.reverse().coeffs);
        }
        let mut k = BigInt::one();
        loop {
            let g = self.shear_y(&k);
            if !g.coeffs[0].is_zero() {
                return disc_leading_nonzero(&g.coeffs);
            }
            k += 1;
        }
    }
}

/// Discriminant of a form, as a free function.
pub fn discriminant(f: &BinaryForm) -> BigInt {
    f.discriminant()
}

/// Resultant of two nonzero binary forms via their Sylvester matrix.
pub fn resultant(f: &BinaryForm, g: &BinaryForm) -> BigInt {
    resultant_coeffs(f.coeffs(), g.coeffs())
}

/// Homogeneous resultant of coefficient vectors (degrees read from lengths).
pub fn resultant_coeffs(f: &[BigInt], g: &[BigInt]) -> BigInt {
    det_bareiss(&sylvester(f, g, BigInt::zero()))
}

fn sylvester<T: Clone>(f: &[T], g: &[T], zero: T) -> Vec<Vec<T>> {
    let n = f.len() - 1;
    let m = g.len() - 1;
    let size = n + m;
    let mut rows = Vec::with_capacity(size);
    for i in 0..m {
        let mut r = vec![zero.clone(); size];
        r[i..i + n + 1].clone_from_slice(f);
        rows.push(r);
    }
    for i in 0..n {
        let mut r = vec![zero.clone(); size];
        r[i..i + m + 1].clone_from_slice(g);
        rows.push(r);
    }
    rows
}

fn disc_sign(n: usize) -> bool {
    (n * (n - 1) / 2) % 2 == 1
}

fn disc_leading_nonzero(a: &[BigInt]) -> BigInt {
    let n = a.len() - 1;
    if n == 1 {
        return BigInt::one();
    }
    let fx: Vec<BigInt> = (0..n).map(|i| &a[i] * BigInt::from(n - i)).collect();
    let r = resultant_coeffs(a, &fx);
    let (q, rem) = r.div_rem(&a[0]);
    debug_assert!(rem.is_zero());
    if disc_sign(n) {
        -q
    } else {
        q
    }
}

/// gcd of a coefficient list; an error for the zero vector.
pub fn content_of(c: &[BigInt]) -> Result<BigInt> {
    let g = c.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    if g.is_zero() {
        Err(Error::ZeroForm)
    } else {
        Ok(g)
    }
}

impl fmt::Display for BinaryForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{};", self.degree())?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl FromStr for BinaryForm {
    type Err = Error;

    /// Parses `n;a_0,a_1,...,a_n`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (n, rest) = s.split_once(';').ok_or_else(|| Error::Parse(format!("missing ';' in {s:?}")))?;
        let n: usize = n.trim().parse().map_err(|_| Error::Parse(format!("bad degree in {s:?}")))?;
        let coeffs: Vec<BigInt> = rest
            .split(',')
            .map(|t| t.trim().parse::<BigInt>().map_err(|_| Error::Parse(format!("bad coefficient {t:?}"))))
            .collect::<Result<_>>()?;
        if coeffs.len() != n + 1 {
            return Err(Error::Parse(format!("degree {n} needs {} coefficients, got {}", n + 1, coeffs.len())));
        }
        BinaryForm::new(coeffs)
    }
}

/// Largest degree accepted by [`symbolic_disc`].
pub const SYMBOLIC_MAX_DEGREE: usize = 6;

/// Largest degree for which `F_n` is computed.
pub const SYMBOLIC_F_MAX_DEGREE: usize = 4;

/// Generic discriminant `G_n` and its split by degree in `a_n`, `a_{n-1}`:
/// `G = a_n D1 + a_n a_{n-1} D2 + a_{n-1}^2 D3 + a_n^2 D4`.
#[derive(Clone, Debug)]
pub struct DiscStructure {
    pub n: usize,
    pub g: MPoly,
    pub delta1: MPoly,
    pub delta2: MPoly,
    pub delta3: MPoly,
    pub delta4: MPoly,
    /// Discriminant of `G` in the variable `a_n`, when requested.
    pub f: Option<MPoly>,
}

impl DiscStructure {
    /// Recombines the four pieces; equals `g` exactly.
    pub fn recombine(&self) -> MPoly {
        let nv = self.n + 1;
        let an = MPoly::var(nv, self.n);
        let an1 = MPoly::var(nv, self.n - 1);
        an.mul(&self.delta1)
            .add(&an.mul(&an1).mul(&self.delta2))
            .add(&an1.mul(&an1).mul(&self.delta3))
            .add(&an.mul(&an).mul(&self.delta4))
    }
}

/// Symbolic discriminant of the generic degree-`n` form.
pub fn symbolic_disc(n: usize) -> Result<DiscStructure> {
    build_symbolic(n, false)
}

/// As [`symbolic_disc`] and additionally `F_n = disc_{a_n}(G_n)`.
pub fn symbolic_disc_with_f(n: usize) -> Result<DiscStructure> {
    if n > SYMBOLIC_F_MAX_DEGREE {
        return Err(Error::UnsupportedDegree { n, lo: 2, hi: SYMBOLIC_F_MAX_DEGREE });
    }
    build_symbolic(n, true)
}

/// The generic discriminant `G_n` alone.
pub fn generic_discriminant(n: usize) -> Result<MPoly> {
    if !(2..=SYMBOLIC_MAX_DEGREE).contains(&n) {
        return Err(Error::UnsupportedDegree { n, lo: 2, hi: SYMBOLIC_MAX_DEGREE });
    }
    let nv = n + 1;
    let f: Vec<MPoly> = (0..=n).map(|i| MPoly::var(nv, i)).collect();
    let fx: Vec<MPoly> = (0..n).map(|i| MPoly::var(nv, i).scale(&BigInt::from(n - i))).collect();
    let res = det_minor_expansion(&sylvester(&f, &fx, MPoly::zero(nv)), nv);
    let sign = if disc_sign(n) { -BigInt::one() } else { BigInt::one() };
    res.div_term(&Monomial::var(nv, 0), &sign)
}

fn build_symbolic(n: usize, with_f: bool) -> Result<DiscStructure> {
    let g = generic_discriminant(n)?;
    let nv = n + 1;
    let (an, an1) = (n, n - 1);
    let mut d = [MPoly::zero(nv), MPoly::zero(nv), MPoly::zero(nv), MPoly::zero(nv)];
    for (m, c) in &g.terms {
        let (ea, eb) = (m.0[an], m.0[an1]);
        let mut q = m.clone();
        let slot = if ea >= 2 {
            q.0[an] -= 2;
            3
        } else if ea == 1 && eb >= 1 {
            q.0[an] -= 1;
            q.0[an1] -= 1;
            1
        } else if ea == 1 {
            q.0[an] -= 1;
            0
        } else {
            if eb < 2 {
                return Err(Error::Internal(format!("term {m:?} of G_{n} escapes the structure split")));
            }
            q.0[an1] -= 2;
            2
        };
        d[slot] = d[slot].add(&MPoly::term(q, c.clone()));
    }
    let [delta1, delta2, delta3, delta4] = d;
    let f = if with_f { Some(disc_in_variable(&g, an)?) } else { None };
    Ok(DiscStructure { n, g, delta1, delta2, delta3, delta4, f })
}

/// Discriminant of `p` viewed as a univariate polynomial in variable `v`,
/// with the same sign convention as [`BinaryForm::discriminant`]. The leading
/// coefficient in `v` must be a single term.
pub fn disc_in_variable(p: &MPoly, v: usize) -> Result<MPoly> {
    let nv = p.nvars;
    let low_first = p.coeffs_in(v);
    let d = low_first.len() - 1;
    if d == 0 {
        return Err(Error::Degenerate("polynomial is constant in the variable".into()));
    }
    if d == 1 {
        return Ok(MPoly::constant(nv, BigInt::one()));
    }
    let lead_first: Vec<MPoly> = low_first.iter().rev().cloned().collect();
    let deriv: Vec<MPoly> = (0..d).map(|i| lead_first[i].scale(&BigInt::from(d - i))).collect();
    let res = det_minor_expansion(&sylvester(&lead_first, &deriv, MPoly::zero(nv)), nv);
    let (m, c) = lead_first[0]
        .as_term()
        .ok_or_else(|| Error::Precondition("leading coefficient is not a single term".into()))?;
    let c = if disc_sign(d) { -c.clone() } else { c.clone() };
    res.div_term(m, &c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bf(c: &[i64]) -> BinaryForm {
        BinaryForm::from_i64(c).unwrap()
    }

    fn b(x: i64) -> BigInt {
        BigInt::from(x)
    }

    #[test]
    fn discriminant_examples() {
        assert_eq!(bf(&[1, 1, 1]).discriminant(), b(-3));
        assert_eq!(bf(&[1, -1, -1, 1]).discriminant(), b(0));
        assert_eq!(bf(&[1, 0, -1, 0]).discriminant(), b(4));
        assert_eq!(bf(&[1, 1, 0, 4]).discriminant(), b(-448));
    }

    #[test]
    fn discriminant_with_vanishing_ends() {
        // X Y (X + Y): both end coefficients vanish.
        let f = bf(&[0, 1, 1, 0]);
        let g = bf(&[1, 1, 0, 0]).shear_y(&b(0));
        assert_eq!(f.discriminant(), b(1));
        assert_eq!(f.discriminant(), f.shear_y(&b(3)).discriminant());
        assert_eq!(g.discriminant(), b(0));
    }

    #[test]
    fn translate_examples() {
        assert_eq!(bf(&[1, 0, 1]).translate(&b(1)), bf(&[1, 2, 2]));
        let f = bf(&[3, -1, 4, 1]);
        assert_eq!(f.translate(&b(0)), f);
    }

    #[test]
    fn reverse_and_content() {
        let f = bf(&[2, 4, 6]);
        assert_eq!(f.reverse(), bf(&[6, 4, 2]));
        assert_eq!(f.content(), b(2));
        assert_eq!(f.primitive_part(), bf(&[1, 2, 3]));
        assert_eq!(content_of(&[b(0), b(0)]), Err(Error::ZeroForm));
        assert_eq!(BinaryForm::from_i64(&[0, 0, 0]), Err(Error::ZeroForm));
    }

    #[test]
    fn resultant_examples() {
        assert_eq!(resultant(&bf(&[1, -1]), &bf(&[1, 1])), b(2));
        let f = bf(&[2, -3, 5]);
        assert_eq!(resultant(&f, &f), b(0));
        assert_eq!(resultant(&bf(&[1, 0]), &bf(&[7, -5])), b(-5));
    }

    #[test]
    fn parse_roundtrip() {
        let f: BinaryForm = "3;1,1,0,4".parse().unwrap();
        assert_eq!(f.to_string(), "3;1,1,0,4");
        assert!("3;1,2".parse::<BinaryForm>().is_err());
    }

    #[test]
    fn symbolic_n2() {
        let s = symbolic_disc(2).unwrap();
        assert_eq!(s.g.to_string(), "-4*a0*a2 + a1^2");
    }

    #[test]
    fn symbolic_n3_split() {
        let s = symbolic_disc(3).unwrap();
        assert_eq!(s.delta3.to_string(), "-4*a0*a2 + a1^2");
        assert_eq!(s.delta1.to_string(), "-4*a1^3");
        assert_eq!(s.recombine(), s.g);
    }

    #[test]
    fn term_counts() {
        assert_eq!(symbolic_disc(5).unwrap().g.len(), 59);
    }

    #[test]
    fn f_small_degrees() {
        assert_eq!(symbolic_disc_with_f(2).unwrap().f.unwrap().to_string(), "1");
        let s3 = symbolic_disc_with_f(3).unwrap();
        let f3 = s3.f.unwrap();
        // Compare against the univariate discriminant at a few points.
        for pt in [[1i64, 2, 3], [2, -1, 5], [-3, 4, 1]] {
            let x: Vec<BigInt> = pt.iter().map(|&v| b(v)).chain([b(0)]).collect();
            let q = s3.g.coeffs_in(3);
            let coeffs: Vec<BigInt> = q.iter().rev().map(|c| c.eval(&x)).collect();
            let expect = BinaryForm::new(coeffs).unwrap().discriminant();
            assert_eq!(f3.eval(&x), expect);
        }
    }

    proptest! {
        #[test]
        fn translation_and_reversal_invariance(c in prop::collection::vec(-20i64..=20, 3..=6), l in -10i64..=10, a in -5i64..=5) {
            prop_assume!(c.iter().any(|&x| x != 0));
            let f = bf(&c);
            let d = f.discriminant();
            prop_assert_eq!(f.translate(&b(l)).discriminant(), d.clone());
            prop_assert_eq!(f.reverse().discriminant(), d.clone());
            prop_assert_eq!(f.translate(&b(l)).translate(&b(a)), f.translate(&b(l + a)));
            let n = f.degree() as u32;
            prop_assert_eq!(f.scale(&b(3)).unwrap().discriminant(), d * num_traits::pow(b(3), (2 * n - 2) as usize));
        }

        #[test]
        fn symbolic_matches_numeric(c in prop::collection::vec(-30i64..=30, 5)) {
            let s = symbolic_disc(4).unwrap();
            let x: Vec<BigInt> = c.iter().map(|&v| b(v)).collect();
            prop_assume!(c.iter().any(|&v| v != 0));
            prop_assert_eq!(s.g.eval(&x), bf(&c).discriminant());
        }

        #[test]
        fn squared_factor_forces_p2(g in prop::collection::vec(-9i64..=9, 2..=4), h in prop::collection::vec(-9i64..=9, 4..=6), l in -5i64..5, p in prop::sample::select(vec![2i64, 3, 5, 7])) {
            prop_assume!(g.iter().any(|&x| x != 0));
            // (X - lY)^2 g + p^2 h, padded to a common degree.
            let sq = [1, -2 * l, l * l];
            let mut prod = vec![0i64; g.len() + 2];
            for (i, a) in sq.iter().enumerate() { for (j, bb) in g.iter().enumerate() { prod[i + j] += a * bb; } }
            let n = prod.len();
            prop_assert_eq!(bf(&prod).discriminant(), b(0));
            let hh: Vec<i64> = (0..n).map(|i| *h.get(i).unwrap_or(&0)).collect();
            let f: Vec<i64> = prod.iter().zip(&hh).map(|(a, c)| a + p * p * c).collect();
            prop_assume!(f.iter().any(|&x| x != 0));
            let d = bf(&f).discriminant();
            prop_assert!((d % b(p * p)).is_zero());
        }
    }
}
