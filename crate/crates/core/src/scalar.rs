//! Carrier arithmetic.
//!
//! Every program and every derivative engine in this crate is generic over
//! [`Scalar`]. The two base carriers are [`Int8Wrap`] (two's-complement
//! wrapping 8-bit integers, truncating division) and `f64`. Dual numbers and
//! tape variables implement [`Scalar`] on top of them.

use std::fmt::{Debug, Display};
use std::num::Wrapping;
use std::ops::{Add, AddAssign, Mul, MulAssign, Sub, SubAssign};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::ArithError;

/// Wrapping signed 8-bit integer carrier.
pub type Int8Wrap = Wrapping<i8>;

/// Arithmetic the generic programs are written against.
pub trait Scalar:
    Copy
    + Debug
    + PartialEq
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
{
    /// Whether division by a non-constant is meaningful (quotient rule).
    const EXACT_DIVISION: bool;

    fn zero() -> Self;
    fn one() -> Self;
    /// Lifts a small integer literal. Derivative components are zero.
    fn constant(v: i32) -> Self;
    fn is_zero(&self) -> bool;
    fn checked_div(self, rhs: Self) -> Result<Self, ArithError>;

    /// `self` multiplied by itself `k` times; `k = 0` yields one.
    fn powi(self, k: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..k {
            acc *= self;
        }
        acc
    }
}

/// Arithmetic profile of a base carrier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Profile {
    #[serde(rename = "i8")]
    Int8Wrap,
    #[serde(rename = "f64")]
    Float64,
}

impl Profile {
    pub fn name(self) -> &'static str {
        match self {
            Profile::Int8Wrap => "i8",
            Profile::Float64 => "f64",
        }
    }
}

impl FromStr for Profile {
    type Err = crate::Error;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "i8" => Ok(Profile::Int8Wrap),
            "f64" => Ok(Profile::Float64),
            other => Err(crate::Error::Unsupported(format!("unknown carrier `{other}`"))),
        }
    }
}

impl Display for Profile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// A base carrier: a plain number, not a derivative-carrying type.
pub trait Carrier: Scalar + Display + Send + Sync + 'static {
    const PROFILE: Profile;

    /// Converts from a wide integer, wrapping for `Int8Wrap`.
    fn from_i64(v: i64) -> Self;
    fn to_f64(self) -> f64;
    /// Nearest integer, or `None` for NaN/infinite values.
    fn round_to_i64(self) -> Option<i64>;
}

impl Scalar for Int8Wrap {
    const EXACT_DIVISION: bool = false;

    fn zero() -> Self {
        Wrapping(0)
    }
    fn one() -> Self {
        Wrapping(1)
    }
    fn constant(v: i32) -> Self {
        Wrapping(v as i8)
    }
    fn is_zero(&self) -> bool {
        self.0 == 0
    }
    fn checked_div(self, rhs: Self) -> Result<Self, ArithError> {
        if rhs.0 == 0 {
            return Err(ArithError::DivisionByZero);
        }
        // i8 division truncates toward zero; -128 / -1 wraps to -128.
        Ok(Wrapping(self.0.wrapping_div(rhs.0)))
    }
}

impl Carrier for Int8Wrap {
    const PROFILE: Profile = Profile::Int8Wrap;

    fn from_i64(v: i64) -> Self {
        Wrapping(v as i8)
    }
    fn to_f64(self) -> f64 {
        f64::from(self.0)
    }
    fn round_to_i64(self) -> Option<i64> {
        Some(i64::from(self.0))
    }
}

impl Scalar for f64 {
    const EXACT_DIVISION: bool = true;

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn constant(v: i32) -> Self {
        f64::from(v)
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn checked_div(self, rhs: Self) -> Result<Self, ArithError> {
        if rhs == 0.0 {
            return Err(ArithError::DivisionByZero);
        }
        Ok(self / rhs)
    }
}

impl Carrier for f64 {
    const PROFILE: Profile = Profile::Float64;

    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn to_f64(self) -> f64 {
        self
    }
    fn round_to_i64(self) -> Option<i64> {
        self.is_finite().then(|| self.round() as i64)
    }
}

/// Repeated multiplication in carrier arithmetic.
pub fn powi<S: Scalar>(base: S, k: u32) -> S {
    base.powi(k)
}

/// Carrier division: IEEE quotient for `f64`, truncation toward zero for
/// `Int8Wrap`. A zero divisor is an error on both profiles.
pub fn carrier_div<C: Carrier>(a: C, b: C) -> Result<C, ArithError> {
    a.checked_div(b)
}

/// Converts a slice of wide integers into carrier values.
pub fn lift_all<C: Carrier>(values: &[i64]) -> Vec<C> {
    values.iter().map(|&v| C::from_i64(v)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn w(v: i8) -> Int8Wrap {
        Wrapping(v)
    }

    fn reduce(v: i64) -> i8 {
        v.rem_euclid(256) as u8 as i8
    }

    #[test]
    fn powi_small_cases() {
        assert_eq!(powi(w(2), 3), w(8));
        assert_eq!(powi(2.0f64, 3), 8.0);
        assert_eq!(powi(w(-7), 0), w(1));
        assert_eq!(powi(123.25f64, 0), 1.0);
    }

    #[test]
    fn powi_wraps_like_wide_integers() {
        // 121^2 = 14641 = 57 * 256 + 49
        assert_eq!(reduce(121 * 121), 49);
        assert_eq!(powi(w(121), 2), w(49));
        assert_eq!(powi(w(121), 3).0, reduce(121 * 121 * 121));
    }

    #[test]
    fn division_truncates_toward_zero() {
        assert_eq!(carrier_div(w(100), w(6)).unwrap(), w(16));
        assert_eq!(carrier_div(w(-100), w(6)).unwrap(), w(-16));
        assert_eq!(carrier_div(w(-128), w(-1)).unwrap(), w(-128));
        assert_eq!(carrier_div(9.0, 2.0).unwrap(), 4.5);
        assert_eq!(carrier_div(w(37), w(1)).unwrap(), w(37));
        assert_eq!(carrier_div(-0.3, 1.0).unwrap(), -0.3);
    }

    #[test]
    fn division_by_zero_is_an_error() {
        assert_eq!(carrier_div(w(5), w(0)), Err(ArithError::DivisionByZero));
        assert_eq!(carrier_div(5.0, 0.0), Err(ArithError::DivisionByZero));
    }

    #[test]
    fn float_specials_propagate() {
        let nan = f64::NAN;
        assert!((nan + 1.0).is_nan());
        assert!(powi(f64::INFINITY, 2).is_infinite());
        assert_eq!(f64::NAN.round_to_i64(), None);
        assert_eq!(2.4999.round_to_i64(), Some(2));
    }

    proptest! {
        #[test]
        fn ring_ops_match_wide_integers(a in any::<i8>(), b in any::<i8>()) {
            let (wa, wb) = (i64::from(a), i64::from(b));
            prop_assert_eq!((w(a) + w(b)).0, reduce(wa + wb));
            prop_assert_eq!((w(a) - w(b)).0, reduce(wa - wb));
            prop_assert_eq!((w(a) * w(b)).0, reduce(wa * wb));
        }

        #[test]
        fn division_matches_truncating_oracle(a in any::<i8>(), b in any::<i8>()) {
            prop_assume!(b != 0);
            let q = i64::from(a) / i64::from(b);
            prop_assert_eq!(carrier_div(w(a), w(b)).unwrap().0, reduce(q));
        }

        #[test]
        fn powi_is_additive_in_the_exponent(a in any::<i8>(), m in 0u32..6, n in 0u32..6) {
            prop_assert_eq!(powi(w(a), m + n), powi(w(a), m) * powi(w(a), n));
        }

        #[test]
        fn float_ops_are_binary64(a in -1e6f64..1e6, b in -1e6f64..1e6) {
            prop_assume!(b != 0.0);
            prop_assert_eq!(carrier_div(a, b).unwrap().to_bits(), (a / b).to_bits());
            prop_assert_eq!(powi(a, 2).to_bits(), (a * a).to_bits());
        }
    }
}
