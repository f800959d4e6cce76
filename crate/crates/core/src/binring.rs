//! The binary ring `R_f` of a form, its structure constants and trace-form
//! discriminant, and the three fractional modules attached to `(1, δ)`.
//!
//! Basis elements are `B_0 = 1` and `B_k = a_0 δ^k + a_1 δ^{k-1} + ... + a_{k-1} δ`
//! with `a_0` the leading coefficient and `δ` a root of `f(x, 1)`. The
//! leading-last indexing `a'_i = a_{n-i}` turns this into the usual
//! `a'_n δ^k + ... + a'_{n-k+1} δ`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::forms::BinaryForm;
use crate::irreducible::is_irreducible;
use crate::linalg::{det_bareiss, hnf, hnf_contains, hnf_index, smith_diagonal};
use crate::weakdiv::WeakDivWitness;

/// Which basis a presentation is written in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum BasisKind {
    /// `B_k` without constant terms.
    Unshifted,
    /// `B_k + a_k`.
    Shifted,
    /// `B_0, ..., B_{n-2}, B_{n-1}/m` on a translate.
    WeaklyDivisible,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RingOrigin {
    pub form: BinaryForm,
    pub witness: Option<WeakDivWitness>,
    pub basis: BasisKind,
}

/// A rank-`n` commutative ring given by integer structure constants.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RingPresentation {
    pub n: usize,
    pub basis_names: Vec<String>,
    /// `structure[i][j][k]` is the coefficient of basis `k` in `b_i b_j`.
    pub structure: Vec<Vec<Vec<BigInt>>>,
    pub disc: BigInt,
    pub origin: RingOrigin,
}

fn q(x: &BigInt) -> BigRational {
    BigRational::from_integer(x.clone())
}

/// Arithmetic in `Q[x]/(F)` for `F = f(x, 1)` with nonzero leading coefficient.
pub(crate) struct PowerAlgebra {
    n: usize,
    /// `x^n = sum red[i] x^i` in the quotient.
    red: Vec<BigRational>,
}

impl PowerAlgebra {
    pub(crate) fn new(f: &BinaryForm) -> Result<Self> {
        let n = f.degree();
        let c = f.coeffs();
        if c[0].is_zero() {
            return Err(Error::Degenerate("leading coefficient vanishes".into()));
        }
        let red = (0..n).map(|i| -q(&c[n - i]) / q(&c[0])).collect();
        Ok(PowerAlgebra { n, red })
    }

    pub(crate) fn mul(&self, a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
        let n = self.n;
        let mut prod = vec![BigRational::zero(); 2 * n - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if !y.is_zero() {
                    prod[i + j] += x * y;
                }
            }
        }
        for d in (n..2 * n - 1).rev() {
            let top = std::mem::replace(&mut prod[d], BigRational::zero());
            if top.is_zero() {
                continue;
            }
            for i in 0..n {
                prod[d - n + i] += &top * &self.red[i];
            }
        }
        prod.truncate(n);
        prod
    }

    pub(crate) fn delta(&self) -> Vec<BigRational> {
        let mut v = vec![BigRational::zero(); self.n];
        if self.n > 1 {
            v[1] = BigRational::one();
        } else {
            v[0] = self.red[0].clone();
        }
        v
    }
}

/// Power-basis coordinates of `B_k` (optionally shifted by `a_k`).
pub(crate) fn binary_basis(f: &BinaryForm, shifted: bool) -> Vec<Vec<BigRational>> {
    let n = f.degree();
    let c = f.coeffs();
    (0..n)
        .map(|k| {
            let mut v = vec![BigRational::zero(); n];
            if k == 0 {
                v[0] = BigRational::one();
                return v;
            }
            for i in 0..k {
                v[k - i] = q(&c[i]);
            }
            if shifted {
                v[0] = q(&c[k]);
            }
            v
        })
        .collect()
}

/// Inverse of the matrix whose columns are `cols`.
pub(crate) fn inverse_of_columns(cols: &[Vec<BigRational>]) -> Result<Vec<Vec<BigRational>>> {
    let n = cols.len();
    let mut a: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            let mut row: Vec<BigRational> = (0..n).map(|j| cols[j][i].clone()).collect();
            row.extend((0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }));
            row
        })
        .collect();
    for c in 0..n {
        let piv = (c..n).find(|&r| !a[r][c].is_zero()).ok_or_else(|| Error::Internal("singular basis".into()))?;
        a.swap(c, piv);
        let inv = a[c][c].recip();
        for x in a[c].iter_mut() {
            *x *= &inv;
        }
        for r in 0..n {
            if r != c && !a[r][c].is_zero() {
                let fac = a[r][c].clone();
                let pivot_row = a[c].clone();
                for (x, y) in a[r].iter_mut().zip(pivot_row.iter()) {
                    *x -= &fac * y;
                }
            }
        }
    }
    Ok(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// `sum c_j basis_j` in power coordinates.
pub(crate) fn combine(basis: &[Vec<BigRational>], c: &[BigRational]) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); basis[0].len()];
    for (b, x) in basis.iter().zip(c) {
        if !x.is_zero() {
            for (o, y) in out.iter_mut().zip(b) {
                *o += x * y;
            }
        }
    }
    out
}

pub(crate) fn apply(m: &[Vec<BigRational>], v: &[BigRational]) -> Vec<BigRational> {
    m.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

fn to_integers(v: &[BigRational], what: &str) -> Result<Vec<BigInt>> {
    v.iter()
        .map(|x| {
            if x.is_integer() {
                Ok(x.to_integer())
            } else {
                Err(Error::Internal(format!("non-integral structure constant {x} in {what}")))
            }
        })
        .collect()
}

/// Builds the structure table of the Z-span of `basis` inside `Q[x]/(f(x,1))`.
pub(crate) fn ring_from_basis(
    f: &BinaryForm,
    basis: &[Vec<BigRational>],
    names: Vec<String>,
    origin: RingOrigin,
) -> Result<RingPresentation> {
    let alg = PowerAlgebra::new(f)?;
    let n = basis.len();
    let inv = inverse_of_columns(basis)?;
    let mut structure = vec![vec![Vec::new(); n]; n];
    for i in 0..n {
        for j in i..n {
            let prod = alg.mul(&basis[i], &basis[j]);
            let coords = to_integers(&apply(&inv, &prod), &format!("{} * {}", names[i], names[j]))?;
            structure[j][i] = coords.clone();
            structure[i][j] = coords;
        }
    }
    let mut r = RingPresentation { n, basis_names: names, structure, disc: BigInt::zero(), origin };
    r.disc = ring_disc(&r);
    Ok(r)
}

fn names(n: usize, prefix: &str) -> Vec<String> {
    (0..n).map(|k| format!("{prefix}{k}")).collect()
}

/// `R_f` in the unshifted basis without the irreducibility gate; needs `a_0 != 0`.
pub fn binary_ring_unchecked(f: &BinaryForm) -> Result<RingPresentation> {
    let origin = RingOrigin { form: f.clone(), witness: None, basis: BasisKind::Unshifted };
    ring_from_basis(f, &binary_basis(f, false), names(f.degree(), "B_"), origin)
}

/// `R_f` in the shifted basis `B_k + a_k`.
pub fn shifted_basis_ring(f: &BinaryForm) -> Result<RingPresentation> {
    let origin = RingOrigin { form: f.clone(), witness: None, basis: BasisKind::Shifted };
    ring_from_basis(f, &binary_basis(f, true), names(f.degree(), "C_"), origin)
}

/// Checks `C_{n-1} C_{n-i} = -a_n C_{n-i-1} + a_{n-i} C_{n-1}` for `1 <= i <= n-2`
/// on a shifted-basis table of `f`.
pub fn check_last_row(shifted: &RingPresentation, f: &BinaryForm) -> Result<()> {
    let n = shifted.n;
    let c = f.coeffs();
    for i in 1..n.saturating_sub(1) {
        let mut expect = vec![BigInt::zero(); n];
        expect[n - i - 1] -= &c[n];
        expect[n - 1] += &c[n - i];
        if shifted.structure[n - 1][n - i] != expect {
            return Err(Error::Internal(format!("last row fails at i = {i}")));
        }
    }
    Ok(())
}

/// `R_f` for an irreducible form with nonzero leading coefficient.
pub fn canonical_basis_ring(f: &BinaryForm) -> Result<RingPresentation> {
    if !is_irreducible(f)? {
        return Err(Error::Reducible);
    }
    check_last_row(&shifted_basis_ring(f)?, f)?;
    binary_ring_unchecked(f)
}

impl RingPresentation {
    /// Product of two elements given in basis coordinates.
    pub fn mul(&self, x: &[BigInt], y: &[BigInt]) -> Vec<BigInt> {
        let mut out = vec![BigInt::zero(); self.n];
        for (i, a) in x.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in y.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let ab = a * b;
                for (k, c) in self.structure[i][j].iter().enumerate() {
                    out[k] += &ab * c;
                }
            }
        }
        out
    }

    pub fn unit_vector(&self, i: usize) -> Vec<BigInt> {
        (0..self.n).map(|k| if k == i { BigInt::one() } else { BigInt::zero() }).collect()
    }

    /// Traces of the basis elements.
    pub fn traces(&self) -> Vec<BigInt> {
        (0..self.n).map(|k| (0..self.n).map(|j| self.structure[k][j][j].clone()).sum()).collect()
    }

    /// Identity, commutativity and associativity of the table.
    pub fn check_axioms(&self) -> Result<()> {
        let n = self.n;
        for j in 0..n {
            if self.structure[0][j] != self.unit_vector(j) {
                return Err(Error::Internal(format!("B_0 is not the identity on basis {j}")));
            }
            for i in 0..n {
                if self.structure[i][j] != self.structure[j][i] {
                    return Err(Error::Internal(format!("table not commutative at ({i},{j})")));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let left = self.mul(&self.structure[i][j], &self.unit_vector(k));
                    let right = self.mul(&self.unit_vector(i), &self.structure[j][k]);
                    if left != right {
                        return Err(Error::Internal(format!("table not associative at ({i},{j},{k})")));
                    }
                }
            }
        }
        Ok(())
    }

    /// Order of `R / pR` from the Smith form of the sublattice `pR`.
    pub fn quotient_order(&self, p: u64) -> BigInt {
        let rows: Vec<Vec<BigInt>> = (0..self.n).map(|i| {
            let mut v = self.unit_vector(i);
            v[i] = BigInt::from(p);
            v
        }).collect();
        smith_diagonal(&rows).iter().product()
    }
}

/// Determinant of the trace form `Tr(b_i b_j)`.
pub fn ring_disc(r: &RingPresentation) -> BigInt {
    let t = r.traces();
    let m: Vec<Vec<BigInt>> = (0..r.n)
        .map(|i| (0..r.n).map(|j| r.structure[i][j].iter().zip(&t).map(|(c, tr)| c * tr).sum()).collect())
        .collect();
    det_bareiss(&m)
}

/// Unimodular matrix (columns in the `R_f` basis) carrying the basis of
/// `R_{reverse(f)}` into `R_f`, checked against both structure tables.
pub fn reverse_isomorphism(f: &BinaryForm) -> Result<Vec<Vec<BigInt>>> {
    let n = f.degree();
    let c = f.coeffs();
    if c[0].is_zero() || c[n].is_zero() {
        return Err(Error::Degenerate("both end coefficients must be nonzero".into()));
    }
    let alg = PowerAlgebra::new(f)?;
    // δ^{-1} = -(a_0 δ^{n-1} + ... + a_{n-1}) / a_n
    let mut inv = vec![BigRational::zero(); n];
    for i in 0..n {
        inv[n - 1 - i] = -q(&c[i]) / q(&c[n]);
    }
    let mut eps_pows = vec![{
        let mut one = vec![BigRational::zero(); n];
        one[0] = BigRational::one();
        one
    }];
    for k in 1..n {
        let next = alg.mul(&eps_pows[k - 1], &inv);
        eps_pows.push(next);
    }
    let g = f.reverse();
    let gc = g.coeffs();
    let rev_basis: Vec<Vec<BigRational>> = (0..n)
        .map(|k| {
            if k == 0 {
                return eps_pows[0].clone();
            }
            let mut v = vec![BigRational::zero(); n];
            for i in 0..k {
                for (slot, e) in v.iter_mut().zip(&eps_pows[k - i]) {
                    *slot += q(&gc[i]) * e;
                }
            }
            v
        })
        .collect();
    let to_rf = inverse_of_columns(&binary_basis(f, false))?;
    let cols: Vec<Vec<BigInt>> =
        rev_basis.iter().map(|b| to_integers(&apply(&to_rf, b), "reverse map")).collect::<Result<_>>()?;
    let mat: Vec<Vec<BigInt>> = (0..n).map(|i| (0..n).map(|j| cols[j][i].clone()).collect()).collect();
    if det_bareiss(&mat).abs() != BigInt::one() {
        return Err(Error::Internal("reverse map is not unimodular".into()));
    }
    let rf = binary_ring_unchecked(f)?;
    let rg = binary_ring_unchecked(&g)?;
    for i in 0..n {
        for j in 0..n {
            let image: Vec<BigInt> = (0..n)
                .map(|r| (0..n).map(|k| &mat[r][k] * &rg.structure[i][j][k]).sum())
                .collect();
            if image != rf.mul(&cols[i], &cols[j]) {
                return Err(Error::Internal("reverse map does not respect multiplication".into()));
            }
        }
    }
    Ok(mat)
}

/// Which fractional module a presentation describes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum IdealRole {
    /// `I_f = R_f + R_f δ`.
    Sum,
    /// `R_f ∩ R_f δ^{-1}`.
    Intersection,
    /// The product of the two.
    Product,
}

/// A Z-module `(1/denominator) * span(generators)` in the `R_f` basis, with
/// the generators in Hermite form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdealPresentation {
    pub role: IdealRole,
    pub denominator: BigInt,
    pub generators: Vec<Vec<BigInt>>,
}

impl IdealPresentation {
    fn from_rational(role: IdealRole, elems: &[Vec<BigRational>]) -> Self {
        let den = elems.iter().flatten().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let rows: Vec<Vec<BigInt>> =
            elems.iter().map(|v| v.iter().map(|x| (x * q(&den)).to_integer()).collect()).collect();
        IdealPresentation { role, denominator: den, generators: hnf(&rows) }
    }

    fn rational_generators(&self) -> Vec<Vec<BigRational>> {
        self.generators.iter().map(|g| g.iter().map(|x| BigRational::new(x.clone(), self.denominator.clone())).collect()).collect()
    }

    /// Index of `R` in the module when the module contains `R`, or of the module in `R`.
    pub fn index_in_ring(&self) -> Option<BigRational> {
        let idx = hnf_index(&self.generators)?;
        Some(BigRational::new(idx, num_traits::pow(self.denominator.clone(), self.generators.len())))
    }

    /// Closure under multiplication by the basis of `r`.
    pub fn is_module_over(&self, r: &RingPresentation) -> bool {
        self.generators
            .iter()
            .all(|g| (0..r.n).all(|i| hnf_contains(&self.generators, &r.mul(g, &r.unit_vector(i)))))
    }

    pub fn contains(&self, v: &[BigRational]) -> bool {
        let scaled: Vec<BigRational> = v.iter().map(|x| x * q(&self.denominator)).collect();
        scaled.iter().all(|x| x.is_integer())
            && hnf_contains(&self.generators, &scaled.iter().map(|x| x.to_integer()).collect::<Vec<_>>())
    }
}

/// Bases of `R_f + R_f δ`, `R_f ∩ R_f δ^{-1}` and their product, each checked
/// against its closed form.
pub fn ideal_bases(f: &BinaryForm) -> Result<(IdealPresentation, IdealPresentation, IdealPresentation)> {
    if !f.is_primitive() {
        return Err(Error::NotPrimitive);
    }
    let n = f.degree();
    let alg = PowerAlgebra::new(f)?;
    let unshifted = binary_basis(f, false);
    let shifted = binary_basis(f, true);
    let to_rf = inverse_of_columns(&unshifted)?;
    let coords = |v: &Vec<BigRational>| apply(&to_rf, v);
    let delta = alg.delta();

    // R_f + R_f δ, generated directly and by the closed form <1, δ, B_2, ...>.
    let mut gens: Vec<Vec<BigRational>> = unshifted.iter().map(coords).collect();
    gens.extend(unshifted.iter().map(|b| coords(&alg.mul(b, &delta))));
    let sum = IdealPresentation::from_rational(IdealRole::Sum, &gens);
    let mut closed: Vec<Vec<BigRational>> = vec![coords(&unshifted[0]), coords(&delta)];
    closed.extend(unshifted[2.min(n)..].iter().map(coords));
    if IdealPresentation::from_rational(IdealRole::Sum, &closed) != sum {
        return Err(Error::Internal("R_f + R_f δ disagrees with <1, δ, B_2, ...>".into()));
    }

    // R_f ∩ R_f δ^{-1} = <a_0, B_1 + a_1, ..., B_{n-1} + a_{n-1}>.
    let mut igens: Vec<Vec<BigRational>> = vec![coords(&unshifted[0]).iter().map(|x| x * q(f.leading())).collect()];
    igens.extend(shifted[1..].iter().map(coords));
    let inter = IdealPresentation::from_rational(IdealRole::Intersection, &igens);
    let rf_all: Vec<Vec<BigRational>> = unshifted.iter().map(coords).collect();
    let rf_module = IdealPresentation::from_rational(IdealRole::Intersection, &rf_all);
    for g in &igens {
        let gd = combine(&unshifted, g);
        if !rf_module.contains(g) || !rf_module.contains(&coords(&alg.mul(&gd, &delta))) {
            return Err(Error::Internal("intersection generator escapes R_f ∩ R_f δ^{-1}".into()));
        }
    }

    // Product of the two modules.
    let mut pgens = Vec::new();
    for a in sum.rational_generators() {
        for b in inter.rational_generators() {
            pgens.push(coords(&alg.mul(&combine(&unshifted, &a), &combine(&unshifted, &b))));
        }
    }
    let prod = IdealPresentation::from_rational(IdealRole::Product, &pgens);
    let mut expected = IdealPresentation::from_rational(IdealRole::Product, &rf_all);
    expected.role = IdealRole::Product;
    if prod != expected {
        return Err(Error::Internal("product of the modules is not R_f".into()));
    }
    Ok((sum, inter, prod))
}
