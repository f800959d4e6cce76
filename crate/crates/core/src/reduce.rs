//! Archimedean profiles of weakly divisible bases, the normally Minkowski
//! reduced test, translation matrices and canonical keys for dedupe.

use num_bigint::BigInt;
use num_complex::Complex;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use twofloat::TwoFloat;

use crate::error::{Error, Result};
use crate::forms::BinaryForm;
use crate::roots::{integer_poly_roots, Precision, Real};
use crate::weakdiv::WeakDivWitness;

/// Default relative guard band for computed profiles.
pub const DEFAULT_GUARD: f64 = 1e-9;

/// Gram-Schmidt lengths `t_1..t_n` of the embedded basis.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GramProfile {
    pub t: Vec<f64>,
    /// Real places.
    pub r: usize,
    /// Complex places.
    pub s: usize,
    /// Relative guard band applied by the reduced test.
    pub guard: f64,
}

impl GramProfile {
    /// A profile given directly, tested without a guard band.
    pub fn exact(t: Vec<f64>) -> Self {
        let n = t.len();
        GramProfile { t, r: n, s: 0, guard: 0.0 }
    }
}

fn gram_profile_in<R: Real>(f: &BinaryForm, m: &BigInt) -> Result<GramProfile> {
    let n = f.degree();
    if f.leading().is_zero() {
        return Err(Error::Degenerate("leading coefficient vanishes".into()));
    }
    let roots = integer_poly_roots::<R>(f.coeffs())?;
    let c: Vec<R> = f.coeffs().iter().map(R::from_bigint).collect();
    let inv_m = R::one() / R::from_bigint(m);
    let real = roots.iter().filter(|x| x.is_real()).count();
    // Rows: basis vectors evaluated at every root.
    let vals: Vec<Vec<Complex<R>>> = (0..n)
        .map(|k| {
            roots
                .iter()
                .map(|root| {
                    let z = root.z;
                    let mut acc = Complex::new(R::zero(), R::zero());
                    if k == 0 {
                        return Complex::new(R::one(), R::zero());
                    }
                    for ci in c.iter().take(k) {
                        acc = (acc + Complex::new(*ci, R::zero())) * z;
                    }
                    if k == n - 1 {
                        acc = acc * inv_m;
                    }
                    acc
                })
                .collect()
        })
        .collect();
    let mut g = vec![vec![R::zero(); n]; n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = R::zero();
            for (a, b) in vals[i].iter().zip(&vals[j]) {
                s = s + (a * b.conj()).re;
            }
            g[i][j] = s;
            g[j][i] = s;
        }
    }
    // Cholesky: t_i is the i-th diagonal entry of the factor.
    let mut l = vec![vec![R::zero(); n]; n];
    let mut t = Vec::with_capacity(n);
    for i in 0..n {
        for j in 0..=i {
            let mut s = g[i][j];
            for k in 0..j {
                s = s - l[i][k] * l[j][k];
            }
            if i == j {
                if s <= R::zero() {
                    return Err(Error::Precision(format!("Gram matrix not positive definite at {i}")));
                }
                l[i][i] = s.sqrt();
                t.push(l[i][i].to_f64().unwrap_or(f64::NAN));
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    Ok(GramProfile { t, r: real, s: (n - real) / 2, guard: DEFAULT_GUARD })
}

/// Profile of `<B_0, ..., B_{n-2}, B_{n-1}/m>` under the canonical embedding.
pub fn gram_profile(f: &BinaryForm, m: &BigInt, precision: Precision) -> Result<GramProfile> {
    if !m.is_positive() {
        return Err(Error::Precondition("modulus must be positive".into()));
    }
    match precision {
        Precision::Double => gram_profile_in::<f64>(f, m),
        Precision::DoubleDouble => gram_profile_in::<TwoFloat>(f, m),
    }
}

/// `t_2/t_1 >= 2` and `t_i/t_2 >= 2` for `i >= 3`, each with the guard band.
pub fn is_normally_minkowski_reduced(profile: &GramProfile) -> bool {
    let t = &profile.t;
    if t.len() < 2 {
        return false;
    }
    let need = 2.0 * (1.0 + profile.guard);
    t[1] / t[0] >= need && t[2..].iter().all(|ti| ti / t[1] >= need)
}

/// `max{ max_{i>=3} (2 t_2/t_i)^{1/(i-2)}, 2 t_1/t_2 }`.
pub fn rho_from_profile(profile: &GramProfile) -> f64 {
    let t = &profile.t;
    let mut rho = 2.0 * t[0] / t[1];
    for (i, ti) in t.iter().enumerate().skip(2) {
        rho = rho.max((2.0 * t[1] / ti).powf(1.0 / (i as f64 - 1.0)));
    }
    rho
}

pub fn rho_f(f: &BinaryForm, precision: Precision) -> Result<f64> {
    Ok(rho_from_profile(&gram_profile(f, &BigInt::one(), precision)?))
}

/// `λ ρ^n f(x/ρ)` for `ρ = num/den`, with `λ = den^n` so the result is integral.
pub fn scaled_form(f: &BinaryForm, num: &BigInt, den: &BigInt) -> BinaryForm {
    let n = f.degree();
    let c = f
        .coeffs()
        .iter()
        .enumerate()
        .map(|(i, a)| a * num_traits::pow(num.clone(), i) * num_traits::pow(den.clone(), n - i))
        .collect();
    BinaryForm::new(c).expect("scaling keeps the form nonzero")
}

fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    (0..k).fold(BigInt::one(), |acc, i| acc * BigInt::from(n - i) / BigInt::from(i + 1))
}

/// Matrix `M` with `C^{f_l}_k = sum_j M[j][k] C^f_j` for the shifted bases
/// `C_0 = 1`, `C_k = a_0 δ^k + ... + a_k`, where `f_l = translate(f, l)`.
pub fn translation_matrix(f: &BinaryForm, l: &BigInt) -> Vec<Vec<BigInt>> {
    let n = f.degree();
    let a0 = f.leading();
    let lp: Vec<BigInt> = (0..n).map(|k| num_traits::pow(l.clone(), k)).collect();
    (0..n)
        .map(|r| {
            (0..n)
                .map(|c| {
                    if c < r {
                        BigInt::zero()
                    } else if r == 0 {
                        if c == 0 {
                            BigInt::one()
                        } else {
                            binomial(n - 1, c) * &lp[c] * a0
                        }
                    } else {
                        binomial(n - 1 - r, c - r) * &lp[c - r]
                    }
                })
                .collect()
        })
        .collect()
}

/// Dedupe key: modulus and a normalised translate. Equality and ordering
/// ignore `sigma`, which only records the orientation that won.
#[derive(Clone, Debug, Serialize)]
pub struct CanonicalKey {
    #[serde(serialize_with = "crate::ser::decimal")]
    pub m: BigInt,
    #[serde(serialize_with = "crate::ser::decimal_vec")]
    pub coeffs: Vec<BigInt>,
    /// 1 when `(-1)^n h(-x)` was chosen over `h`.
    pub sigma: u8,
    /// Set for degrees at most 3, where injectivity is not established.
    pub low_degree: bool,
}

impl PartialEq for CanonicalKey {
    fn eq(&self, other: &Self) -> bool {
        self.m == other.m && self.coeffs == other.coeffs
    }
}

impl Eq for CanonicalKey {}

impl PartialOrd for CanonicalKey {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for CanonicalKey {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (&self.m, &self.coeffs).cmp(&(&other.m, &other.coeffs))
    }
}

impl std::hash::Hash for CanonicalKey {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.m.hash(state);
        self.coeffs.hash(state);
    }
}

impl std::fmt::Display for CanonicalKey {
    fn fmt(&self, fm: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let cs: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        write!(fm, "{}|{}", self.m, cs.join(","))
    }
}

/// Translate of `h` by a multiple of `m` putting `h_1` in `[0, n h_0 m)`.
fn normalise_shift(h: &BinaryForm, m: &BigInt) -> (BinaryForm, BigInt) {
    let n = BigInt::from(h.degree());
    let step = &n * h.leading() * m;
    // Translating by m r adds r * step to h_1.
    let r = -h.coeff(1).div_floor(&step);
    (h.translate(&(m * &r)), r)
}

/// Key of `(f, w)` without checking reducedness.
pub fn canonical_key(f: &BinaryForm, w: &WeakDivWitness) -> CanonicalKey {
    let mut h = f.translate(&w.l);
    if h.leading().is_negative() {
        h = h.neg();
    }
    let (a, _) = normalise_shift(&h, &w.m);
    let (b, _) = normalise_shift(&h.flip(), &w.m);
    let (coeffs, sigma) = if b.coeffs() < a.coeffs() { (b.coeffs().to_vec(), 1) } else { (a.coeffs().to_vec(), 0) };
    CanonicalKey { m: w.m.clone(), coeffs, sigma, low_degree: f.degree() <= 3 }
}

/// Key of a reduced weakly divisible pair.
pub fn canonical_representative(f: &BinaryForm, w: &WeakDivWitness, precision: Precision) -> Result<CanonicalKey> {
    if !w.is_valid_for(f) {
        return Err(Error::Precondition("invalid witness".into()));
    }
    if !is_normally_minkowski_reduced(&gram_profile(f, &w.m, precision)?) {
        return Err(Error::Precondition("input is not normally Minkowski reduced".into()));
    }
    Ok(canonical_key(f, w))
}

/// The shift `r` and orientation with `translate(g_l', m r)` or its flip equal
/// to `translate(f_l)` up to sign, if the two pairs share a key.
pub fn reconstruct_shift(f: &BinaryForm, w: &WeakDivWitness, g: &BinaryForm, v: &WeakDivWitness) -> Option<(BigInt, bool)> {
    if w.m != v.m {
        return None;
    }
    let norm = |x: BinaryForm| if x.leading().is_negative() { x.neg() } else { x };
    let hf = norm(f.translate(&w.l));
    let hg = norm(g.translate(&v.l));
    let step = BigInt::from(hf.degree()) * hf.leading() * &w.m;
    for (cand, flipped) in [(hg.clone(), false), (hg.flip(), true)] {
        let d = hf.coeff(1) - cand.coeff(1);
        if d.is_multiple_of(&step) {
            let r = d / &step;
            if cand.translate(&(&w.m * &r)) == hf {
                return Some((r, flipped));
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;
    use proptest::prelude::*;

    fn bf(c: &[i64]) -> BinaryForm {
        BinaryForm::from_i64(c).unwrap()
    }

    fn b(x: i64) -> BigInt {
        BigInt::from(x)
    }

    #[test]
    fn exact_profiles() {
        assert!(is_normally_minkowski_reduced(&GramProfile::exact(vec![1.0, 2.0, 4.0, 8.0])));
        assert!(!is_normally_minkowski_reduced(&GramProfile::exact(vec![1.0, 1.5, 4.0, 8.0])));
        assert!(rho_from_profile(&GramProfile::exact(vec![1.0, 4.0, 16.0])) <= 1.0);
    }

    #[test]
    fn last_length_scales_with_m() {
        let f = bf(&[1, 0, 0, -2]);
        let p1 = gram_profile(&f, &b(1), Precision::DoubleDouble).unwrap();
        let p5 = gram_profile(&f, &b(5), Precision::DoubleDouble).unwrap();
        assert!((p5.t[2] * 5.0 / p1.t[2] - 1.0).abs() < 1e-12);
        assert_eq!((p1.r, p1.s), (1, 1));
        let again = gram_profile(&f, &b(1), Precision::DoubleDouble).unwrap();
        assert_eq!(p1.t, again.t);
    }

    #[test]
    fn scaling_by_rho_reduces() {
        let f = bf(&[1, 0, 0, -2]);
        let rho = rho_f(&f, Precision::DoubleDouble).unwrap();
        let num = b((rho * 1000.0).ceil() as i64 + 1);
        let g = scaled_form(&f, &num, &b(1000));
        assert!(is_normally_minkowski_reduced(&gram_profile(&g, &b(1), Precision::DoubleDouble).unwrap()));
    }

    #[test]
    fn translation_identity_and_det() {
        let f = bf(&[3, 1, 4, 1, 5]);
        let m = translation_matrix(&f, &b(0));
        for (i, row) in m.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                assert_eq!(*x, if i == j { b(1) } else { b(0) });
            }
        }
        assert_eq!(crate::linalg::det_bareiss(&translation_matrix(&f, &b(7))), b(1));
    }

    #[test]
    fn flip_shares_key() {
        let f = bf(&[6, 2, -731, 4860, 22411]);
        let w = WeakDivWitness { m: b(2), l: b(1) };
        let v = WeakDivWitness { m: b(2), l: b(1) };
        let (k, kf) = (canonical_key(&f, &w), canonical_key(&f.flip(), &v));
        assert_ne!(k.sigma, kf.sigma);
        assert_eq!(k, kf);
        assert_eq!(k.to_string(), kf.to_string());
    }

    fn shifted_power_coords(f: &BinaryForm, l: &BigInt) -> Vec<Vec<BigRational>> {
        // C_k of f evaluated at (δ - l), as polynomials in δ.
        let n = f.degree();
        let c = f.coeffs();
        let mut pows: Vec<Vec<BigInt>> = vec![vec![b(1)]];
        for k in 1..n {
            let prev = &pows[k - 1];
            let mut next = vec![b(0); k + 1];
            for (i, x) in prev.iter().enumerate() {
                next[i + 1] += x;
                next[i] -= x * l;
            }
            pows.push(next);
        }
        (0..n)
            .map(|k| {
                let mut v = vec![BigRational::zero(); n];
                if k == 0 {
                    v[0] = BigRational::one();
                    return v;
                }
                for i in 0..=k {
                    for (d, x) in pows[k - i].iter().enumerate() {
                        v[d] += BigRational::from_integer(&c[i] * x);
                    }
                }
                v
            })
            .collect()
    }

    proptest! {
        #[test]
        fn translation_matrix_is_exact(c in prop::collection::vec(-20i64..=20, 3..=6), l in -9i64..=9, lead in 1i64..=7) {
            let mut c = c;
            c[0] = lead;
            let f = bf(&c);
            let g = f.translate(&b(l));
            let fb = shifted_power_coords(&f, &b(0));
            let gb = shifted_power_coords(&g, &b(l));
            let m = translation_matrix(&f, &b(l));
            let n = f.degree();
            for k in 0..n {
                let mut v = vec![BigRational::zero(); n];
                for j in 0..n {
                    for d in 0..n {
                        v[d] += &fb[j][d] * BigRational::from_integer(m[j][k].clone());
                    }
                }
                prop_assert_eq!(&v, &gb[k]);
            }
        }

        #[test]
        fn translation_cocycle(c in prop::collection::vec(-20i64..=20, 3..=6), x in -9i64..=9, y in -9i64..=9) {
            let mut c = c;
            if c[0] == 0 { c[0] = 2; }
            let f = bf(&c);
            let lhs = {
                let a = translation_matrix(&f, &b(x));
                let bm = translation_matrix(&f.translate(&b(x)), &b(y));
                let n = a.len();
                (0..n).map(|i| (0..n).map(|j| (0..n).map(|k| &a[i][k] * &bm[k][j]).sum()).collect()).collect::<Vec<Vec<BigInt>>>()
            };
            prop_assert_eq!(lhs, translation_matrix(&f, &b(x + y)));
        }

        #[test]
        fn profile_is_translation_invariant(c in prop::collection::vec(-20i64..=20, 4..=5), l in -5i64..=5) {
            let mut c = c;
            if c[0] == 0 { c[0] = 1; }
            let f = bf(&c);
            prop_assume!(!f.discriminant().is_zero());
            let p = gram_profile(&f, &b(1), Precision::DoubleDouble);
            let q = gram_profile(&f.translate(&b(l)), &b(1), Precision::DoubleDouble);
            if let (Ok(p), Ok(q)) = (p, q) {
                for (x, y) in p.t.iter().zip(&q.t) {
                    prop_assert!((x / y - 1.0).abs() < 1e-8, "{:?} vs {:?}", p.t, q.t);
                }
            }
        }

        #[test]
        fn keys_collapse_translates(c in prop::collection::vec(-30i64..=30, 5..=5), m in 2i64..=6, r in -4i64..=4) {
            let mut c = c;
            c[0] = c[0].abs() + 1;
            let h = bf(&c);
            // Force a witness at 0.
            let mut cc: Vec<BigInt> = h.coeffs().to_vec();
            cc[4] = &cc[4] * m * m;
            cc[3] = &cc[3] * m;
            let h = BinaryForm::new(cc).unwrap();
            let w0 = WeakDivWitness { m: b(m), l: b(0) };
            prop_assert!(w0.is_valid_for(&h));
            let g = h.translate(&b(-m * r));
            let w1 = WeakDivWitness { m: b(m), l: b(0) };
            let g2 = g.translate(&b(-1)); // witness at 1 for g2
            let w2 = WeakDivWitness { m: b(m), l: b(1) };
            prop_assert!(w2.is_valid_for(&g2));
            prop_assert_eq!(canonical_key(&h, &w0), canonical_key(&g, &w1));
            prop_assert_eq!(canonical_key(&h, &w0), canonical_key(&g2, &w2));
            prop_assert!(reconstruct_shift(&h, &w0, &g2, &w2).is_some());
            let other = WeakDivWitness { m: b(1), l: b(0) };
            prop_assert_ne!(canonical_key(&h, &w0), canonical_key(&h, &other));
        }
    }
}
