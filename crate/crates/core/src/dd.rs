//! Double-double arithmetic used to evaluate polynomials whose power-basis
//! coefficients are large and alternate in sign.
//!
//! The Chebyshev-derived estimators of degree 15 have coefficients of order
//! 1e7 while the polynomial itself is of order 1e-3, so plain binary64 Horner
//! loses about nine digits near `x = 1`. Carrying an unevaluated sum
//! `hi + lo` through Horner's scheme restores roughly 32 digits.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DoubleDouble {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl DoubleDouble {
    pub const ZERO: Self = Self { hi: 0.0, lo: 0.0 };

    pub fn from_f64(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }

    /// Nearest double-double to an exact rational.
    pub fn from_rational(r: &BigRational) -> Self {
        if r.is_zero() {
            return Self::ZERO;
        }
        let hi = r.to_f64().unwrap_or(f64::NAN);
        let rest = r - rational_from_f64(hi);
        let lo = rest.to_f64().unwrap_or(0.0);
        Self { hi, lo }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn add(self, other: Self) -> Self {
        let (s, e) = two_sum(self.hi, other.hi);
        let (t, f) = two_sum(self.lo, other.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Self { hi, lo }
    }

    pub fn add_f64(self, b: f64) -> Self {
        let (s, e) = two_sum(self.hi, b);
        let (hi, lo) = quick_two_sum(s, e + self.lo);
        Self { hi, lo }
    }

    pub fn mul_f64(self, b: f64) -> Self {
        let (p, e) = two_prod(self.hi, b);
        let (hi, lo) = quick_two_sum(p, e + self.lo * b);
        Self { hi, lo }
    }

    pub fn mul(self, other: Self) -> Self {
        let (p, e) = two_prod(self.hi, other.hi);
        let e = e + (self.hi * other.lo + self.lo * other.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Self { hi, lo }
    }
}

/// Exact rational value of a finite binary64 number.
pub fn rational_from_f64(x: f64) -> BigRational {
    BigRational::from_float(x).unwrap_or_else(|| BigRational::from_integer(BigInt::zero()))
}

/// Horner evaluation of `Σ coeffs[k] x^k` in double-double arithmetic.
pub fn horner(coeffs: &[DoubleDouble], x: f64) -> f64 {
    horner_dd(coeffs, x).to_f64()
}

pub fn horner_dd(coeffs: &[DoubleDouble], x: f64) -> DoubleDouble {
    coeffs
        .iter()
        .rev()
        .fold(DoubleDouble::ZERO, |acc, &c| acc.mul_f64(x).add(c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    #[test]
    fn third_is_represented_to_double_double_precision() {
        let third = BigRational::new(BigInt::from(1), BigInt::from(3));
        let dd = DoubleDouble::from_rational(&third);
        let back = rational_from_f64(dd.hi) + rational_from_f64(dd.lo);
        let err = (back - &third).to_f64().unwrap().abs();
        assert!(err < 1e-32, "err = {err}");
    }

    #[test]
    fn horner_recovers_cancellation() {
        // (x - 1)^2 = x^2 - 2x + 1 evaluated next to its double root.
        let c: Vec<_> = [1.0, -2.0, 1.0]
            .into_iter()
            .map(DoubleDouble::from_f64)
            .collect();
        let x = 1.0 + 2f64.powi(-30);
        let v = horner(&c, x);
        assert_eq!(v, 2f64.powi(-60));
    }
}
