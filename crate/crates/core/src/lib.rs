//! Type-generic algorithmic differentiation.
//!
//! Programs are written once against [`Scalar`] and differentiated by
//! instantiating them with different carriers:
//!
//! - [`Dual`] for tangent mode, `y_t1 = f'(x) · x_t1`;
//! - [`Var`] on a [`Tape`] for adjoint mode, `x_a1 = y_a1 · f'(x)`;
//! - [`Dual2`] for tangent-over-tangent, `x_t1ᵀ · f''(x) · x_t2`;
//! - a tape over [`Dual`] values for tangent-over-adjoint, `y_a1 · f''(x) · x_t2`.
//!
//! Base carriers are `f64` and [`Int8Wrap`], wrapping 8-bit integers in
//! which the greeting payloads of [`harness`] are exact.
//!
//! ```
//! use dualtape::{reverse_sweep, record, tangent_eval, FunctionId};
//!
//! let x = [2.0, 1.0, 4.0, 3.0];
//! let (y, y_t1) = tangent_eval(&FunctionId::Pairs, &x, &[0.0, 0.0, 1.0, 0.0]).unwrap();
//! assert_eq!((y, y_t1), (14.0, 3.0));
//!
//! let (tape, _) = record(&FunctionId::Pairs, &x).unwrap();
//! assert_eq!(reverse_sweep(&tape, 1.0), vec![1.0, 2.0, 3.0, 4.0]);
//! ```

pub mod drivers;
pub mod dual;
pub mod error;
pub mod functions;
pub mod harness;
pub mod program;
pub mod scalar;
pub mod second_order;
pub mod tape;

pub use drivers::{
    gradient_adjoint, gradient_tangent, hessian_columns_a1t2, hessian_compressed_a1t2, hessian_dense_t1t2,
    hessian_diag_t1t2, Driver, DriverOutput, Engine, EvalStats, HessianResult, SeedPlan, SymmetricMatrix,
};
pub use dual::{dual_mul, tangent_eval, Dual};
pub use error::{ArithError, Error, Result};
pub use functions::{hand_a1t2_cubes, hand_adjoint, hand_t1t2_cubes, hand_tangent, primal, FunctionId};
pub use harness::{
    build_input, decode_greeting, run_benchmark, run_sweep, write_report, BenchConfig, GreetingPayload, OutputFormat,
    ReportRow,
};
pub use program::Program;
pub use scalar::{carrier_div, lift_all, powi, Carrier, Int8Wrap, Profile, Scalar};
pub use second_order::{a1t2_eval, t1t2_eval, Dual2};
pub use tape::{record, reverse_sweep, NodeKind, Tape, TapeNode, Var};
