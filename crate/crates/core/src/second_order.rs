//! Second-order modes.
//!
//! Tangent-over-tangent nests duals: the outer tangent follows direction 1 and
//! the inner one direction 2, so the mixed component of the output is
//! `x_t1ᵀ · f''(x) · x_t2`. Tangent-over-adjoint records the tape with
//! [`Dual`] values seeded by `x_t2` and reads the tangents of the input
//! adjoints, giving `y_a1 · f''(x) · x_t2`.

use crate::dual::Dual;
use crate::error::Result;
use crate::program::{check_len, Program};
use crate::scalar::Scalar;
use crate::tape::{record, reverse_sweep};

/// Nested dual with components `(value, t1, t2, t12)`.
pub type Dual2<A> = Dual<Dual<A>>;

/// Builds a second-order dual. `t12` is the mixed component.
pub fn dual2<A: Scalar>(value: A, t1: A, t2: A, t12: A) -> Dual2<A> {
    Dual::new(Dual::new(value, t2), Dual::new(t1, t12))
}

/// `(value, t1, t2, t12)` of a second-order dual.
pub fn components<A: Scalar>(d: Dual2<A>) -> (A, A, A, A) {
    (d.value.value, d.tangent.value, d.value.tangent, d.tangent.tangent)
}

/// `x_t1ᵀ · f''(x) · x_t2`.
pub fn t1t2_eval<A: Scalar, P: Program>(program: &P, x: &[A], x_t1: &[A], x_t2: &[A]) -> Result<A> {
    check_len(x.len(), x_t1.len())?;
    check_len(x.len(), x_t2.len())?;
    let inputs: Vec<Dual2<A>> = x
        .iter()
        .zip(x_t1)
        .zip(x_t2)
        .map(|((&v, &t1), &t2)| dual2(v, t1, t2, A::zero()))
        .collect();
    let y = program.eval(&inputs)?;
    Ok(components(y).3)
}

/// `y_a1 · f''(x) · x_t2`.
pub fn a1t2_eval<A: Scalar, P: Program>(program: &P, x: &[A], y_a1: A, x_t2: &[A]) -> Result<Vec<A>> {
    check_len(x.len(), x_t2.len())?;
    let inputs: Vec<Dual<A>> = x.iter().zip(x_t2).map(|(&v, &t)| Dual::new(v, t)).collect();
    let (tape, _) = record(program, &inputs)?;
    let x_a1 = reverse_sweep(&tape, Dual::lift(y_a1));
    Ok(x_a1.into_iter().map(|d| d.tangent).collect())
}
