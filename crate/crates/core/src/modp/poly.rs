//! Dense univariate polynomials over a prime field `F_p` with `p < 2^64`.
//!
//! Polynomials are coefficient vectors, lowest degree first, without
//! trailing zeros.

use num_bigint::BigUint;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub type Poly = Vec<u64>;

/// Arithmetic in `Z/pZ`.
#[derive(Clone, Copy, Debug)]
pub struct Fp {
    pub p: u64,
}

impl Fp {
    pub fn new(p: u64) -> Self {
        Fp { p }
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a as u128 + b as u128;
        (s % self.p as u128) as u64
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            self.p - (b - a)
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.p as u128) as u64
    }

    pub fn pow(&self, mut a: u64, mut e: u64) -> u64 {
        let mut r = 1 % self.p;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        r
    }

    pub fn inv(&self, a: u64) -> u64 {
        debug_assert!(a % self.p != 0);
        self.pow(a, self.p - 2)
    }

    /// Reduces a signed integer into `[0, p)`.
    pub fn from_i128(&self, a: i128) -> u64 {
        a.rem_euclid(self.p as i128) as u64
    }

    pub fn trim(&self, mut a: Poly) -> Poly {
        while a.last() == Some(&0) {
            a.pop();
        }
        a
    }

    pub fn deg(a: &Poly) -> Option<usize> {
        if a.is_empty() {
            None
        } else {
            Some(a.len() - 1)
        }
    }

    pub fn add_poly(&self, a: &Poly, b: &Poly) -> Poly {
        let n = a.len().max(b.len());
        let r = (0..n).map(|i| self.add(*a.get(i).unwrap_or(&0), *b.get(i).unwrap_or(&0))).collect();
        self.trim(r)
    }

    pub fn sub_poly(&self, a: &Poly, b: &Poly) -> Poly {
        let n = a.len().max(b.len());
        let r = (0..n).map(|i| self.sub(*a.get(i).unwrap_or(&0), *b.get(i).unwrap_or(&0))).collect();
        self.trim(r)
    }

    pub fn mul_poly(&self, a: &Poly, b: &Poly) -> Poly {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut r = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                r[i + j] = self.add(r[i + j], self.mul(x, y));
            }
        }
        self.trim(r)
    }

    pub fn scale(&self, a: &Poly, c: u64) -> Poly {
        self.trim(a.iter().map(|&x| self.mul(x, c)).collect())
    }

    pub fn monic(&self, a: &Poly) -> Poly {
        match a.last() {
            None => Vec::new(),
            Some(&l) => self.scale(a, self.inv(l)),
        }
    }

    /// Quotient and remainder; `b` must be nonzero.
    pub fn divrem(&self, a: &Poly, b: &Poly) -> (Poly, Poly) {
        let db = b.len() - 1;
        if a.len() < b.len() {
            return (Vec::new(), a.clone());
        }
        let inv = self.inv(*b.last().unwrap());
        let mut r = a.clone();
        let mut q = vec![0u64; a.len() - db];
        for i in (0..q.len()).rev() {
            let c = self.mul(r[i + db], inv);
            q[i] = c;
            if c != 0 {
                for (j, &bj) in b.iter().enumerate() {
                    r[i + j] = self.sub(r[i + j], self.mul(c, bj));
                }
            }
        }
        r.truncate(db);
        (self.trim(q), self.trim(r))
    }

    pub fn rem(&self, a: &Poly, b: &Poly) -> Poly {
        self.divrem(a, b).1
    }

    pub fn div_exact(&self, a: &Poly, b: &Poly) -> Poly {
        let (q, r) = self.divrem(a, b);
        debug_assert!(r.is_empty());
        q
    }

    /// Monic gcd (empty if both are zero).
    pub fn gcd(&self, a: &Poly, b: &Poly) -> Poly {
        let (mut a, mut b) = (a.clone(), b.clone());
        while !b.is_empty() {
            let r = self.rem(&a, &b);
            a = b;
            b = r;
        }
        self.monic(&a)
    }

    pub fn derivative(&self, a: &Poly) -> Poly {
        if a.len() <= 1 {
            return Vec::new();
        }
        let r = (1..a.len()).map(|i| self.mul(a[i], i as u64 % self.p)).collect();
        self.trim(r)
    }

    pub fn eval(&self, a: &Poly, x: u64) -> u64 {
        a.iter().rev().fold(0, |acc, &c| self.add(self.mul(acc, x), c))
    }

    pub fn mulmod(&self, a: &Poly, b: &Poly, m: &Poly) -> Poly {
        self.rem(&self.mul_poly(a, b), m)
    }

    pub fn powmod(&self, a: &Poly, mut e: u64, m: &Poly) -> Poly {
        let mut base = self.rem(a, m);
        let mut r = self.rem(&vec![1], m);
        while e > 0 {
            if e & 1 == 1 {
                r = self.mulmod(&r, &base, m);
            }
            base = self.mulmod(&base, &base, m);
            e >>= 1;
        }
        r
    }

    pub fn powmod_big(&self, a: &Poly, e: &BigUint, m: &Poly) -> Poly {
        let mut r = self.rem(&vec![1], m);
        let base = self.rem(a, m);
        for i in (0..e.bits()).rev() {
            r = self.mulmod(&r, &r, m);
            if e.bit(i) {
                r = self.mulmod(&r, &base, m);
            }
        }
        r
    }

    /// Squarefree decomposition of a monic polynomial: pairs (g, e) with
    /// pairwise coprime squarefree monic `g` and `a = prod g^e`.
    pub fn squarefree(&self, a: &Poly) -> Vec<(Poly, u32)> {
        let mut out = Vec::new();
        if a.len() <= 1 {
            return out;
        }
        let d = self.derivative(a);
        let mut c = self.gcd(a, &d);
        let mut w = self.div_exact(a, &c);
        let mut i = 1u32;
        while w.len() > 1 {
            let y = self.gcd(&w, &c);
            let fac = self.div_exact(&w, &y);
            if fac.len() > 1 {
                out.push((fac, i));
            }
            w = y;
            c = self.div_exact(&c, &w);
            i += 1;
        }
        if c.len() > 1 {
            // c is a p-th power: take the root coefficientwise.
            let p = self.p as usize;
            let root: Poly = (0..=(c.len() - 1) / p).map(|k| c[k * p]).collect();
            for (g, e) in self.squarefree(&root) {
                out.push((g, e * self.p as u32));
            }
        }
        out
    }

    /// Distinct-degree factorisation of a squarefree monic polynomial.
    pub fn distinct_degree(&self, a: &Poly) -> Vec<(Poly, usize)> {
        let mut out = Vec::new();
        let mut g = a.clone();
        let x: Poly = vec![0, 1];
        let mut h = self.rem(&x, &g);
        let mut i = 1;
        while g.len() - 1 >= 2 * i {
            h = self.powmod(&h, self.p, &g);
            let d = self.gcd(&g, &self.sub_poly(&h, &x));
            if d.len() > 1 {
                g = self.div_exact(&g, &d);
                h = self.rem(&h, &g);
                out.push((d, i));
            }
            i += 1;
        }
        if g.len() > 1 {
            let dg = g.len() - 1;
            out.push((g, dg));
        }
        out
    }

    /// Splits a squarefree monic product of irreducibles of degree `d`.
    pub fn equal_degree(&self, a: &Poly, d: usize, rng: &mut ChaCha8Rng) -> Vec<Poly> {
        let n = a.len() - 1;
        if n == d {
            return vec![a.clone()];
        }
        loop {
            let r: Poly = self.trim((0..n).map(|_| rng.gen_range(0..self.p)).collect());
            if r.len() <= 1 {
                continue;
            }
            let t = if self.p == 2 {
                // Trace map r + r^2 + ... + r^{2^{d-1}}.
                let mut acc = r.clone();
                let mut s = r.clone();
                for _ in 1..d {
                    s = self.mulmod(&s, &s, a);
                    acc = self.add_poly(&acc, &s);
                }
                acc
            } else {
                let q = BigUint::from(self.p).pow(d as u32);
                let e = (q - 1u32) / 2u32;
                let s = self.powmod_big(&r, &e, a);
                self.sub_poly(&s, &vec![1])
            };
            let g = self.gcd(a, &t);
            if g.len() > 1 && g.len() < a.len() {
                let h = self.div_exact(a, &g);
                let mut out = self.equal_degree(&g, d, rng);
                out.extend(self.equal_degree(&h, d, rng));
                return out;
            }
        }
    }

    /// All roots in `F_p` of a nonzero polynomial by exhaustive scan.
    pub fn roots_by_scan(&self, a: &Poly) -> Vec<u64> {
        (0..self.p).filter(|&x| self.eval(a, x) == 0).collect()
    }
}
