//! Double-double arithmetic: an unevaluated sum of two `f64` values giving
//! roughly 106 bits of significand.
//!
//! The Wigner d-matrix sum formula cancels heavily between terms whose
//! magnitudes grow like a central binomial coefficient, so the summation is
//! carried out in this extended precision before rounding once to `f64`.
//! The algorithms are the classical error-free transformations of Dekker and
//! Knuth; products are split with Veltkamp's constant so no hardware FMA is
//! required.

/// Splitting constant 2^27 + 1 for Veltkamp splitting.
const SPLIT: f64 = 134_217_729.0;

/// Knuth two-sum: `a + b = s + e` exactly, no ordering requirement.
#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let v = s - a;
    let e = (a - (s - v)) + (b - v);
    (s, e)
}

/// Fast two-sum, valid when `|a| >= |b|`.
#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let e = b - (s - a);
    (s, e)
}

/// Veltkamp split of `a` into high and low halves with 26/27 significand bits.
#[inline]
fn split(a: f64) -> (f64, f64) {
    let t = SPLIT * a;
    let hi = t - (t - a);
    (hi, a - hi)
}

/// Dekker product: `a * b = p + e` exactly.
#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let (a_hi, a_lo) = split(a);
    let (b_hi, b_lo) = split(b);
    let e = ((a_hi * b_hi - p) + a_hi * b_lo + a_lo * b_hi) + a_lo * b_lo;
    (p, e)
}

/// A double-double value `hi + lo` with `|lo| <= ulp(hi)/2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Dd {
    pub hi: f64,
    pub lo: f64,
}

pub(crate) const DD_ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
pub(crate) const DD_ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

impl Dd {
    #[inline]
    pub fn from_f64(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    pub fn neg(self) -> Self {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    #[inline]
    pub fn add(self, rhs: Dd) -> Self {
        let (s1, s2) = two_sum(self.hi, rhs.hi);
        let (t1, t2) = two_sum(self.lo, rhs.lo);
        let (s1, s2) = quick_two_sum(s1, s2 + t1);
        let (hi, lo) = quick_two_sum(s1, s2 + t2);
        Dd { hi, lo }
    }

    #[inline]
    pub fn sub(self, rhs: Dd) -> Self {
        self.add(rhs.neg())
    }

    #[inline]
    pub fn mul(self, rhs: Dd) -> Self {
        let (p1, p2) = two_prod(self.hi, rhs.hi);
        let p2 = p2 + self.hi * rhs.lo + self.lo * rhs.hi;
        let (hi, lo) = quick_two_sum(p1, p2);
        Dd { hi, lo }
    }

    #[inline]
    pub fn mul_f64(self, rhs: f64) -> Self {
        let (p1, p2) = two_prod(self.hi, rhs);
        let p2 = p2 + self.lo * rhs;
        let (hi, lo) = quick_two_sum(p1, p2);
        Dd { hi, lo }
    }

    /// Quotient accurate to roughly one double-double ulp.
    #[inline]
    pub fn div(self, rhs: Dd) -> Self {
        let q1 = self.hi / rhs.hi;
        let r = self.sub(rhs.mul_f64(q1));
        let q2 = (r.hi + r.lo) / (rhs.hi + rhs.lo);
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo }
    }

    /// Square root via one Newton step on the `f64` seed.
    #[inline]
    pub fn sqrt(self) -> Self {
        if self.hi == 0.0 && self.lo == 0.0 {
            return DD_ZERO;
        }
        let x = self.hi.sqrt();
        let x_dd = Dd::from_f64(x);
        let r = self.sub(x_dd.mul(x_dd));
        let correction = (r.hi + r.lo) / (2.0 * x);
        let (hi, lo) = quick_two_sum(x, correction);
        Dd { hi, lo }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn add_keeps_small_residual() {
        let one = DD_ONE;
        let tiny = Dd::from_f64(1e-25);
        let sum = one.add(tiny).sub(one);
        assert!((sum.to_f64() - 1e-25).abs() < 1e-40);
    }

    #[test]
    fn mul_exact_for_moderate_integers() {
        let a = Dd::from_f64(3_037_000_499.0);
        let b = a.mul(a);
        // 3037000499^2 = 9223372030926249001 fits in 63 bits, exactly
        // representable as hi + lo.
        assert_eq!(b.hi + b.lo, 9.223372030926249e18);
        let back = b.hi as u128 + b.lo as u128;
        assert_eq!(back, 9_223_372_030_926_249_001u128);
    }

    #[test]
    fn sqrt_two_squares_back() {
        let two = Dd::from_f64(2.0);
        let r = two.sqrt();
        let err = r.mul(r).sub(two);
        assert!(err.to_f64().abs() < 1e-30);
    }

    #[test]
    fn div_roundtrip() {
        let a = Dd::from_f64(355.0);
        let b = Dd::from_f64(113.0);
        let q = a.div(b);
        let err = q.mul(b).sub(a);
        assert!(err.to_f64().abs() < 1e-28);
    }
}
