use crate::error::Result;
use crate::scalar::Scalar;

/// A differentiable function of `n` inputs written once against [`Scalar`].
///
/// Instantiating `eval` with a plain carrier evaluates the primal, with
/// [`Dual`](crate::Dual) the tangent, and with [`Var`](crate::Var) records
/// a tape for the adjoint.
pub trait Program {
    fn eval<S: Scalar>(&self, x: &[S]) -> Result<S>;
}

impl<P: Program + ?Sized> Program for &P {
    fn eval<S: Scalar>(&self, x: &[S]) -> Result<S> {
        (**self).eval(x)
    }
}

/// Returns `DimensionMismatch` unless `actual == expected`.
pub(crate) fn check_len(expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(crate::Error::DimensionMismatch { expected, actual })
    }
}
