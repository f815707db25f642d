use std::fmt;
use std::ops::{Add, Neg, Sub};

use crate::error::{Error, Result};

/// An exactly represented half-integer quantum number.
///
/// Angular-momentum labels `j` and `m` take values `0, 1/2, 1, 3/2, ...`
/// (and negatives for `m`). Storing twice the value as an integer keeps all
/// quantum-number arithmetic exact; no floating-point labels appear anywhere
/// in the interface.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HalfInt {
    twice: i32,
}

impl HalfInt {
    pub const ZERO: HalfInt = HalfInt { twice: 0 };

    /// Builds the half-integer `t / 2`.
    #[inline]
    pub const fn from_twice(t: i32) -> Self {
        HalfInt { twice: t }
    }

    /// Builds the integer value `n`.
    #[inline]
    pub const fn integer(n: i32) -> Self {
        HalfInt { twice: 2 * n }
    }

    /// Twice the stored value, always an integer.
    #[inline]
    pub const fn twice(self) -> i32 {
        self.twice
    }

    /// The value as `f64` (exact: a half-integer is a dyadic rational).
    #[inline]
    pub fn value(self) -> f64 {
        f64::from(self.twice) / 2.0
    }

    #[inline]
    pub const fn is_integer(self) -> bool {
        self.twice % 2 == 0
    }

    /// Checks that `(j, m)` labels a state of the spin-`j` representation:
    /// `j >= 0`, `|m| <= j`, and `j` and `m` are both integer or both
    /// half-odd.
    #[inline]
    pub fn is_valid_pair(j: HalfInt, m: HalfInt) -> bool {
        j.twice >= 0 && m.twice.abs() <= j.twice && (j.twice - m.twice) % 2 == 0
    }

    /// As [`is_valid_pair`](Self::is_valid_pair), as a `Result`.
    #[inline]
    pub fn require_valid_pair(j: HalfInt, m: HalfInt) -> Result<()> {
        if Self::is_valid_pair(j, m) {
            Ok(())
        } else {
            Err(Error::InvalidQuantumPair { j, m })
        }
    }
}

impl Add for HalfInt {
    type Output = HalfInt;
    #[inline]
    fn add(self, rhs: HalfInt) -> HalfInt {
        HalfInt::from_twice(self.twice + rhs.twice)
    }
}

impl Sub for HalfInt {
    type Output = HalfInt;
    #[inline]
    fn sub(self, rhs: HalfInt) -> HalfInt {
        HalfInt::from_twice(self.twice - rhs.twice)
    }
}

impl Neg for HalfInt {
    type Output = HalfInt;
    #[inline]
    fn neg(self) -> HalfInt {
        HalfInt::from_twice(-self.twice)
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.twice % 2 == 0 {
            write!(f, "{}", self.twice / 2)
        } else {
            write!(f, "{}/2", self.twice)
        }
    }
}
