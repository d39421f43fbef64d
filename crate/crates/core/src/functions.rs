//! The two target functions and their hand-derived derivative codes.
//!
//! [`FunctionId`] implements [`Program`], so the generic engines can
//! differentiate it. The `hand_*` routines are derivative loops with the
//! constant factors cancelled by hand, written directly against a base
//! carrier. They keep every intermediate of the second-order Cubes
//! codes below 128 for payload entries below 128, which the generic chain
//! does not.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::program::{check_len, Program};
use crate::scalar::{Carrier, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FunctionId {
    /// `y = Σ x₂ᵢ · x₂ᵢ₊₁`; even input length.
    Pairs,
    /// `y = Σ xᵢ³ / 6`.
    Cubes,
}

impl FunctionId {
    pub fn name(self) -> &'static str {
        match self {
            FunctionId::Pairs => "pairs",
            FunctionId::Cubes => "cubes",
        }
    }

    pub fn validate_len(self, n: usize) -> Result<()> {
        match self {
            FunctionId::Pairs if !n.is_multiple_of(2) => Err(Error::OddLength(n)),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for FunctionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FunctionId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pairs" => Ok(FunctionId::Pairs),
            "cubes" => Ok(FunctionId::Cubes),
            other => Err(Error::Unsupported(format!("unknown function `{other}`"))),
        }
    }
}

impl Program for FunctionId {
    fn eval<S: Scalar>(&self, x: &[S]) -> Result<S> {
        self.validate_len(x.len())?;
        let mut y = S::zero();
        match self {
            FunctionId::Pairs => {
                for pair in x.chunks_exact(2) {
                    y += pair[0] * pair[1];
                }
            }
            FunctionId::Cubes => {
                for &xi in x {
                    y += xi.powi(3);
                }
                y = y.checked_div(S::constant(6))?;
            }
        }
        Ok(y)
    }
}

/// Function value in carrier arithmetic.
pub fn primal<C: Carrier>(fid: FunctionId, x: &[C]) -> Result<C> {
    fid.eval(x)
}

/// `y_t1 = f'(x) · x_t1`, hand-derived.
pub fn hand_tangent<C: Carrier>(fid: FunctionId, x: &[C], x_t1: &[C]) -> Result<C> {
    fid.validate_len(x.len())?;
    check_len(x.len(), x_t1.len())?;
    let mut y_t1 = C::zero();
    match fid {
        FunctionId::Pairs => {
            for (p, t) in x.chunks_exact(2).zip(x_t1.chunks_exact(2)) {
                // product rule
                y_t1 += t[0] * p[1] + p[0] * t[1];
            }
        }
        FunctionId::Cubes => {
            for (&xi, &ti) in x.iter().zip(x_t1) {
                y_t1 += xi * xi * ti;
            }
            y_t1 = y_t1.checked_div(C::constant(2))?;
        }
    }
    Ok(y_t1)
}

/// `x_a1 = y_a1 · f'(x)`, hand-derived.
pub fn hand_adjoint<C: Carrier>(fid: FunctionId, x: &[C], y_a1: C) -> Result<Vec<C>> {
    fid.validate_len(x.len())?;
    let mut x_a1 = vec![C::zero(); x.len()];
    match fid {
        FunctionId::Pairs => {
            for (a, p) in x_a1.chunks_exact_mut(2).zip(x.chunks_exact(2)).rev() {
                a[0] = y_a1 * p[1];
                a[1] = y_a1 * p[0];
            }
        }
        FunctionId::Cubes => {
            let two = C::constant(2);
            for (a, &xi) in x_a1.iter_mut().zip(x).rev() {
                *a = (xi * xi).checked_div(two)? * y_a1;
            }
        }
    }
    Ok(x_a1)
}

/// `Σ xᵢ · x_t1ᵢ · x_t2ᵢ`: the second-order tangent of the cubes function.
pub fn hand_t1t2_cubes<C: Carrier>(x: &[C], x_t1: &[C], x_t2: &[C]) -> Result<C> {
    check_len(x.len(), x_t1.len())?;
    check_len(x.len(), x_t2.len())?;
    let mut y_t1_t2 = C::zero();
    for ((&xi, &t1), &t2) in x.iter().zip(x_t1).zip(x_t2) {
        y_t1_t2 += xi * t1 * t2;
    }
    Ok(y_t1_t2)
}

/// `xᵢ · y_a1 · x_t2ᵢ`: the second-order adjoint of the cubes function.
pub fn hand_a1t2_cubes<C: Carrier>(x: &[C], y_a1: C, x_t2: &[C]) -> Result<Vec<C>> {
    check_len(x.len(), x_t2.len())?;
    Ok(x.iter().zip(x_t2).map(|(&xi, &t2)| xi * y_a1 * t2).collect())
}
