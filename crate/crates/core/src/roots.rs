//! Complex roots of real polynomials by Aberth iteration, with a posteriori
//! inclusion radii, generic over the working float type.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_complex::Complex;
use num_traits::{Float, FromPrimitive, ToPrimitive};
use twofloat::TwoFloat;

use crate::error::{Error, Result};

/// Working precision for numeric routines.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    /// IEEE double, 53 bits.
    Double,
    /// Double-double, about 106 bits.
    #[default]
    DoubleDouble,
}

/// Float types usable by the numeric routines.
pub trait Real: Float + FromPrimitive + Debug + Send + Sync + 'static {
    fn from_bigint(x: &BigInt) -> Self;
    fn unit_roundoff() -> Self;
}

impl Real for f64 {
    fn from_bigint(x: &BigInt) -> Self {
        x.to_f64().unwrap_or(f64::INFINITY)
    }

    fn unit_roundoff() -> Self {
        f64::EPSILON
    }
}

impl Real for TwoFloat {
    fn from_bigint(x: &BigInt) -> Self {
        let hi = x.to_f64().unwrap_or(f64::INFINITY);
        if !hi.is_finite() {
            return TwoFloat::from(hi);
        }
        let rest = x - BigInt::from_f64(hi).unwrap();
        TwoFloat::new_add(hi, rest.to_f64().unwrap())
    }

    fn unit_roundoff() -> Self {
        TwoFloat::from(f64::EPSILON * f64::EPSILON * 4.0)
    }
}

/// A root with a disc radius known to contain an exact root.
#[derive(Clone, Copy, Debug)]
pub struct Root<R> {
    pub z: Complex<R>,
    pub radius: R,
}

impl<R: Real> Root<R> {
    pub fn is_real(&self) -> bool {
        self.z.im == R::zero()
    }
}

fn horner<R: Real>(c: &[R], z: Complex<R>) -> (Complex<R>, Complex<R>, R) {
    let zero = Complex::new(R::zero(), R::zero());
    let mut p = zero;
    let mut dp = zero;
    let mut bound = R::zero();
    let az = z.norm();
    for &a in c {
        dp = dp * z + p;
        p = p * z + Complex::new(a, R::zero());
        bound = bound * az + a.abs();
    }
    (p, dp, bound)
}

/// All complex roots of `c[0] x^d + ... + c[d]` (requires `c[0] != 0`).
///
/// Roots whose inclusion disc meets the real axis are snapped to it, which is
/// exact for real polynomials once discs are pairwise disjoint.
pub fn poly_roots<R: Real>(c: &[R]) -> Result<Vec<Root<R>>> {
    let d = c.len() - 1;
    if c[0] == R::zero() {
        return Err(Error::Degenerate("leading coefficient vanishes".into()));
    }
    if d == 0 {
        return Ok(Vec::new());
    }
    let two = R::one() + R::one();
    // Fujiwara-style bound on root moduli.
    let mut rad = R::zero();
    for (i, &a) in c.iter().enumerate().skip(1) {
        let v = (a / c[0]).abs().powf(R::one() / R::from_usize(i).unwrap());
        rad = rad.max(v);
    }
    rad = (rad * two).max(R::from_f64(1e-3).unwrap());
    let tau = R::from_f64(std::f64::consts::TAU).unwrap();
    let mut z: Vec<Complex<R>> = (0..d)
        .map(|k| {
            let th = tau * R::from_usize(k).unwrap() / R::from_usize(d).unwrap() + R::from_f64(0.4).unwrap();
            Complex::new(rad * th.cos(), rad * th.sin())
        })
        .collect();
    let eps = R::unit_roundoff();
    let mut quiet = 0;
    for _ in 0..2000 {
        let mut maxrel = R::zero();
        for i in 0..d {
            let (p, dp, _) = horner(c, z[i]);
            if p.norm() == R::zero() {
                continue;
            }
            let ratio = p / dp;
            let mut s = Complex::new(R::zero(), R::zero());
            for j in 0..d {
                if j != i {
                    s = s + Complex::new(R::one(), R::zero()) / (z[i] - z[j]);
                }
            }
            let w = ratio / (Complex::new(R::one(), R::zero()) - ratio * s);
            if w.re.is_finite() && w.im.is_finite() {
                z[i] = z[i] - w;
                let rel = w.norm() / z[i].norm().max(R::one());
                maxrel = maxrel.max(rel);
            }
        }
        if maxrel <= eps * R::from_f64(16.0).unwrap() {
            quiet += 1;
            if quiet >= 3 {
                break;
            }
        } else {
            quiet = 0;
        }
    }
    let dd = R::from_usize(d).unwrap();
    let mut roots: Vec<Root<R>> = z
        .iter()
        .map(|&zi| {
            let (p, dp, bound) = horner(c, zi);
            let err = p.norm() + eps * bound * R::from_f64(4.0).unwrap() * dd;
            let radius = dd * err / dp.norm();
            Root { z: zi, radius }
        })
        .collect();
    for r in &roots {
        if !r.radius.is_finite() {
            return Err(Error::Precision("root inclusion radius is not finite".into()));
        }
    }
    for i in 0..d {
        for j in i + 1..d {
            if (roots[i].z - roots[j].z).norm() <= roots[i].radius + roots[j].radius {
                return Err(Error::Precision("root inclusion discs overlap".into()));
            }
        }
    }
    for r in roots.iter_mut() {
        if r.z.im.abs() <= r.radius {
            r.z.im = R::zero();
        }
    }
    Ok(roots)
}

/// Roots of an integer polynomial given leading first.
pub fn integer_poly_roots<R: Real>(c: &[BigInt]) -> Result<Vec<Root<R>>> {
    let v: Vec<R> = c.iter().map(R::from_bigint).collect();
    poly_roots(&v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cube_root_of_two() {
        let r = poly_roots(&[1.0f64, 0.0, 0.0, -2.0]).unwrap();
        let real: Vec<_> = r.iter().filter(|x| x.is_real()).collect();
        assert_eq!(real.len(), 1);
        assert!((real[0].z.re - 2f64.cbrt()).abs() < 1e-14);
    }

    #[test]
    fn double_double_is_tighter() {
        let c: Vec<TwoFloat> = [1.0, 0.0, -2.0].iter().map(|&x| TwoFloat::from(x)).collect();
        let r = poly_roots(&c).unwrap();
        let s = r.iter().map(|x| x.z.re).fold(TwoFloat::from(0.0), |a, b| a.max(b));
        let err = s * s - TwoFloat::from(2.0);
        assert!(err.abs().hi() < 1e-28);
    }

    #[test]
    fn repeated_roots_rejected() {
        assert!(poly_roots(&[1.0f64, -2.0, 1.0]).is_err());
    }
}
