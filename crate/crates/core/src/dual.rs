//! Tangent (forward) mode.
//!
//! A [`Dual`] carries a primal value and one directional derivative. Running
//! a [`Program`] on duals seeded with `x_t1` yields `y_t1 = f'(x) · x_t1`
//! without ever forming the gradient. Duals nest: `Dual<Dual<C>>` is the
//! second-order tangent carrier used by [`crate::second_order`].

use std::ops::{Add, AddAssign, Mul, MulAssign, Sub, SubAssign};

use crate::error::{ArithError, Result};
use crate::program::{check_len, Program};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Dual<A> {
    pub value: A,
    pub tangent: A,
}

impl<A: Scalar> Dual<A> {
    pub fn new(value: A, tangent: A) -> Self {
        Self { value, tangent }
    }

    /// A constant: zero tangent.
    pub fn lift(value: A) -> Self {
        Self { value, tangent: A::zero() }
    }
}

impl<A: Scalar> Add for Dual<A> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.value + rhs.value, self.tangent + rhs.tangent)
    }
}

impl<A: Scalar> Sub for Dual<A> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.value - rhs.value, self.tangent - rhs.tangent)
    }
}

impl<A: Scalar> Mul for Dual<A> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        dual_mul(self, rhs)
    }
}

impl<A: Scalar> AddAssign for Dual<A> {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl<A: Scalar> SubAssign for Dual<A> {
    fn sub_assign(&mut self, rhs: Self) {
        *self = *self - rhs;
    }
}

impl<A: Scalar> MulAssign for Dual<A> {
    fn mul_assign(&mut self, rhs: Self) {
        *self = *self * rhs;
    }
}

/// Product rule.
pub fn dual_mul<A: Scalar>(a: Dual<A>, b: Dual<A>) -> Dual<A> {
    Dual {
        value: a.value * b.value,
        tangent: a.tangent * b.value + a.value * b.tangent,
    }
}

impl<A: Scalar> Scalar for Dual<A> {
    const EXACT_DIVISION: bool = A::EXACT_DIVISION;

    fn zero() -> Self {
        Self::lift(A::zero())
    }
    fn one() -> Self {
        Self::lift(A::one())
    }
    fn constant(v: i32) -> Self {
        Self::lift(A::constant(v))
    }
    fn is_zero(&self) -> bool {
        self.value.is_zero() && self.tangent.is_zero()
    }

    /// A divisor with zero tangent is treated as a constant and divides both
    /// components. Otherwise the quotient rule applies, which integer
    /// carriers reject.
    fn checked_div(self, rhs: Self) -> Result<Self, ArithError> {
        if rhs.tangent.is_zero() {
            return Ok(Self::new(
                self.value.checked_div(rhs.value)?,
                self.tangent.checked_div(rhs.value)?,
            ));
        }
        if !A::EXACT_DIVISION {
            return Err(ArithError::NonConstantDivisor);
        }
        let value = self.value.checked_div(rhs.value)?;
        let numerator = self.tangent * rhs.value - self.value * rhs.tangent;
        let tangent = numerator.checked_div(rhs.value * rhs.value)?;
        Ok(Self::new(value, tangent))
    }
}

/// Evaluates `program` at `x` in direction `x_t1`, returning `(y, y_t1)`.
pub fn tangent_eval<A: Scalar, P: Program>(program: &P, x: &[A], x_t1: &[A]) -> Result<(A, A)> {
    check_len(x.len(), x_t1.len())?;
    let inputs: Vec<Dual<A>> = x.iter().zip(x_t1).map(|(&v, &t)| Dual::new(v, t)).collect();
    let y = program.eval(&inputs)?;
    Ok((y.value, y.tangent))
}
