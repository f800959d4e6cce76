//! Exact integer linear algebra: Bareiss determinants and Hermite normal form.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Fraction-free Bareiss determinant of a square integer matrix.
pub fn det_bareiss(m: &[Vec<BigInt>]) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a: Vec<Vec<BigInt>> = m.to_vec();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

/// Row-style Hermite normal form of the lattice spanned by `rows`.
///
/// Returns a list of nonzero rows in echelon form with positive pivots and
/// entries above each pivot reduced into `[0, pivot)`.
pub fn hnf(rows: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let mut a: Vec<Vec<BigInt>> = rows.iter().filter(|r| r.iter().any(|x| !x.is_zero())).cloned().collect();
    if a.is_empty() {
        return a;
    }
    let cols = a[0].len();
    let mut out: Vec<Vec<BigInt>> = Vec::new();
    for c in 0..cols {
        // Combine all rows with a nonzero entry in column c into a single pivot row.
        let mut idx: Vec<usize> = (0..a.len()).filter(|&i| !a[i][c].is_zero()).collect();
        if idx.is_empty() {
            continue;
        }
        let piv = idx.remove(0);
        for i in idx {
            let (g, x, y) = ext_gcd(&a[piv][c], &a[i][c]);
            let u = &a[piv][c] / &g;
            let v = &a[i][c] / &g;
            let new_piv: Vec<BigInt> = (0..cols).map(|j| &x * &a[piv][j] + &y * &a[i][j]).collect();
            let new_other: Vec<BigInt> = (0..cols).map(|j| &u * &a[i][j] - &v * &a[piv][j]).collect();
            a[piv] = new_piv;
            a[i] = new_other;
        }
        if a[piv][c].is_negative() {
            for x in a[piv].iter_mut() {
                *x = -x.clone();
            }
        }
        let row = a.swap_remove(piv);
        a.retain(|r| r.iter().any(|x| !x.is_zero()));
        out.push(row);
    }
    // Reduce entries above pivots.
    for i in 0..out.len() {
        let pc = out[i].iter().position(|x| !x.is_zero()).unwrap();
        for k in 0..i {
            let q = out[k][pc].div_floor(&out[i][pc]);
            if !q.is_zero() {
                for j in 0..cols {
                    let v = &out[i][j] * &q;
                    out[k][j] -= v;
                }
            }
        }
    }
    out
}

/// Extended gcd with nonnegative gcd: returns (g, x, y) with a·x + b·y = g.
pub fn ext_gcd(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
    let e = a.extended_gcd(b);
    if e.gcd.is_negative() {
        (-e.gcd, -e.x, -e.y)
    } else {
        (e.gcd, e.x, e.y)
    }
}

/// Membership of `v` in the lattice with Hermite basis `h`.
pub fn hnf_contains(h: &[Vec<BigInt>], v: &[BigInt]) -> bool {
    let mut r: Vec<BigInt> = v.to_vec();
    for row in h {
        let pc = row.iter().position(|x| !x.is_zero()).unwrap();
        if r[pc].is_zero() {
            continue;
        }
        if !(&r[pc] % &row[pc]).is_zero() {
            return false;
        }
        let q = &r[pc] / &row[pc];
        for (x, y) in r.iter_mut().zip(row) {
            *x -= &q * y;
        }
    }
    r.iter().all(|x| x.is_zero())
}

/// Absolute determinant of a full-rank Hermite basis (the lattice index in Z^n).
pub fn hnf_index(h: &[Vec<BigInt>]) -> Option<BigInt> {
    let n = h.first()?.len();
    if h.len() != n {
        return None;
    }
    Some(h.iter().enumerate().map(|(i, r)| r[i].clone()).product())
}

/// Invariant factors of an integer matrix via repeated Hermite reduction on rows and columns.
pub fn smith_diagonal(m: &[Vec<BigInt>]) -> Vec<BigInt> {
    let mut a = hnf(m);
    loop {
        let t = transpose(&a);
        let b = hnf(&t);
        let done = is_diagonal(&b);
        a = transpose(&b);
        if done {
            break;
        }
        a = hnf(&a);
        if is_diagonal(&a) {
            break;
        }
    }
    let k = a.len().min(a.first().map_or(0, |r| r.len()));
    let mut d: Vec<BigInt> = (0..k).map(|i| a[i][i].abs()).filter(|x| !x.is_zero()).collect();
    // Enforce the divisibility chain.
    for i in 0..d.len() {
        for j in i + 1..d.len() {
            let g = d[i].gcd(&d[j]);
            let l = &d[i] / &g * &d[j];
            d[i] = g;
            d[j] = l;
        }
    }
    d
}

fn transpose(a: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    if a.is_empty() {
        return Vec::new();
    }
    (0..a[0].len()).map(|j| a.iter().map(|r| r[j].clone()).collect()).collect()
}

fn is_diagonal(a: &[Vec<BigInt>]) -> bool {
    a.iter().enumerate().all(|(i, r)| r.iter().enumerate().all(|(j, x)| i == j || x.is_zero()))
}
