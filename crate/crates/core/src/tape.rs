//! Adjoint (reverse) mode.
//!
//! [`record`] runs a [`Program`] on [`Var`]s, appending one [`TapeNode`] per
//! elementary operation together with its local partial derivatives. The
//! finished [`Tape`] is immutable; [`reverse_sweep`] propagates an output
//! adjoint `y_a1` back to the inputs, yielding `x_a1 = y_a1 · f'(x)` in a
//! single pass. Adjoints accumulate with `+=`, so inputs may be used any
//! number of times.
//!
//! The tape is generic over its value type. Recording over
//! [`Dual`](crate::Dual) values gives the tangent of the adjoint, which is
//! how [`crate::second_order::a1t2_eval`] is built.

use std::cell::RefCell;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Sub, SubAssign};

use crate::error::{ArithError, Result};
use crate::program::Program;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeKind {
    Input,
    Constant,
    Add,
    Sub,
    Mul,
    /// Quotient of two recorded values (exact-division carriers only).
    Div,
    /// Division by a constant. The stored "partial" is the divisor itself and
    /// the sweep divides by it, which keeps truncating integer division
    /// well defined.
    DivConst,
    Powi(u32),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TapeNode<A> {
    kind: NodeKind,
    args: [usize; 2],
    arity: u8,
    value: A,
    partials: [A; 2],
}

impl<A: Scalar> TapeNode<A> {
    pub fn kind(&self) -> NodeKind {
        self.kind
    }

    pub fn args(&self) -> &[usize] {
        &self.args[..usize::from(self.arity)]
    }

    pub fn value(&self) -> A {
        self.value
    }

    /// `∂node/∂arg` for each argument (the divisor for [`NodeKind::DivConst`]).
    pub fn local_partials(&self) -> &[A] {
        &self.partials[..usize::from(self.arity)]
    }
}

/// A recorded evaluation trace.
#[derive(Debug, Clone, PartialEq)]
pub struct Tape<A> {
    nodes: Vec<TapeNode<A>>,
    inputs: Vec<usize>,
    output: usize,
}

impl<A: Scalar> Tape<A> {
    pub fn nodes(&self) -> &[TapeNode<A>] {
        &self.nodes
    }

    pub fn input_handles(&self) -> &[usize] {
        &self.inputs
    }

    pub fn output_handle(&self) -> usize {
        self.output
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn count(&self, kind: NodeKind) -> usize {
        self.nodes.iter().filter(|n| n.kind == kind).count()
    }

    /// Value of the recorded output.
    pub fn output_value(&self) -> A {
        self.nodes[self.output].value
    }
}

struct Recorder<A> {
    nodes: RefCell<Vec<TapeNode<A>>>,
}

impl<A: Scalar> Recorder<A> {
    fn push(&self, kind: NodeKind, args: &[usize], value: A, partials: &[A]) -> usize {
        debug_assert_eq!(args.len(), partials.len());
        let mut node = TapeNode {
            kind,
            args: [0; 2],
            arity: args.len() as u8,
            value,
            partials: [A::zero(); 2],
        };
        node.args[..args.len()].copy_from_slice(args);
        node.partials[..partials.len()].copy_from_slice(partials);
        let mut nodes = self.nodes.borrow_mut();
        nodes.push(node);
        nodes.len() - 1
    }
}

/// A value taking part in a recording. Values without a node are constants.
#[derive(Clone, Copy)]
pub struct Var<'t, A> {
    value: A,
    node: Option<(&'t Recorder<A>, usize)>,
}

impl<A: fmt::Debug> fmt::Debug for Var<'_, A> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Var")
            .field("value", &self.value)
            .field("node", &self.node.map(|(_, i)| i))
            .finish()
    }
}

impl<A: PartialEq> PartialEq for Var<'_, A> {
    fn eq(&self, other: &Self) -> bool {
        self.value == other.value
    }
}

impl<'t, A: Scalar> Var<'t, A> {
    fn lifted(value: A) -> Self {
        Self { value, node: None }
    }

    pub fn value(&self) -> A {
        self.value
    }

    /// Node index on `rec`, recording a constant node if needed.
    fn handle_on(&self, rec: &'t Recorder<A>) -> usize {
        match self.node {
            Some((_, idx)) => idx,
            None => rec.push(NodeKind::Constant, &[], self.value, &[]),
        }
    }

    fn binary(self, rhs: Self, kind: NodeKind, value: A, partials: [A; 2]) -> Self {
        let rec = match (self.node, rhs.node) {
            (None, None) => return Self::lifted(value),
            (Some((rec, _)), other) | (None, other @ Some((rec, _))) => {
                if let Some((r2, _)) = other {
                    debug_assert!(std::ptr::eq(rec, r2), "operands from different tapes");
                }
                rec
            }
        };
        let a = self.handle_on(rec);
        let b = rhs.handle_on(rec);
        let idx = rec.push(kind, &[a, b], value, &partials);
        Self { value, node: Some((rec, idx)) }
    }

    fn unary(self, kind: NodeKind, value: A, partial: A) -> Self {
        match self.node {
            None => Self::lifted(value),
            Some((rec, a)) => {
                let idx = rec.push(kind, &[a], value, &[partial]);
                Self { value, node: Some((rec, idx)) }
            }
        }
    }
}

impl<A: Scalar> Add for Var<'_, A> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let value = self.value + rhs.value;
        self.binary(rhs, NodeKind::Add, value, [A::one(), A::one()])
    }
}

impl<A: Scalar> Sub for Var<'_, A> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let value = self.value - rhs.value;
        self.binary(rhs, NodeKind::Sub, value, [A::one(), A::zero() - A::one()])
    }
}

impl<A: Scalar> Mul for Var<'_, A> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let value = self.value * rhs.value;
        self.binary(rhs, NodeKind::Mul, value, [rhs.value, self.value])
    }
}

impl<A: Scalar> AddAssign for Var<'_, A> {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl<A: Scalar> SubAssign for Var<'_, A> {
    fn sub_assign(&mut self, rhs: Self) {
        *self = *self - rhs;
    }
}

impl<A: Scalar> MulAssign for Var<'_, A> {
    fn mul_assign(&mut self, rhs: Self) {
        *self = *self * rhs;
    }
}

impl<A: Scalar> Scalar for Var<'_, A> {
    const EXACT_DIVISION: bool = A::EXACT_DIVISION;

    fn zero() -> Self {
        Self::lifted(A::zero())
    }
    fn one() -> Self {
        Self::lifted(A::one())
    }
    fn constant(v: i32) -> Self {
        Self::lifted(A::constant(v))
    }
    fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    fn checked_div(self, rhs: Self) -> Result<Self, ArithError> {
        let value = self.value.checked_div(rhs.value)?;
        if rhs.node.is_none() {
            return Ok(self.unary(NodeKind::DivConst, value, rhs.value));
        }
        if !A::EXACT_DIVISION {
            return Err(ArithError::NonConstantDivisor);
        }
        let da = A::one().checked_div(rhs.value)?;
        let db = A::zero() - value.checked_div(rhs.value)?;
        Ok(self.binary(rhs, NodeKind::Div, value, [da, db]))
    }

    fn powi(self, k: u32) -> Self {
        let value = self.value.powi(k);
        let partial = if k == 0 {
            A::zero()
        } else {
            A::constant(k as i32) * self.value.powi(k - 1)
        };
        self.unary(NodeKind::Powi(k), value, partial)
    }
}

/// Records `program` at `x`, returning the tape and the primal output.
pub fn record<A: Scalar, P: Program>(program: &P, x: &[A]) -> Result<(Tape<A>, A)> {
    let recorder = Recorder { nodes: RefCell::new(Vec::with_capacity(4 * x.len() + 2)) };
    let inputs: Vec<Var<'_, A>> = x
        .iter()
        .map(|&v| {
            let idx = recorder.push(NodeKind::Input, &[], v, &[]);
            Var { value: v, node: Some((&recorder, idx)) }
        })
        .collect();
    let y = program.eval(&inputs)?;
    let output = y.handle_on(&recorder);
    let value = y.value;
    let input_handles = inputs.iter().filter_map(|v| v.node.map(|(_, i)| i)).collect();
    drop(inputs);
    let tape = Tape { nodes: recorder.nodes.into_inner(), inputs: input_handles, output };
    Ok((tape, value))
}

/// Propagates `y_a1` from the output back to the inputs.
pub fn reverse_sweep<A: Scalar>(tape: &Tape<A>, y_a1: A) -> Vec<A> {
    let mut adjoints = vec![A::zero(); tape.nodes.len()];
    adjoints[tape.output] = y_a1;
    for (idx, node) in tape.nodes.iter().enumerate().rev() {
        let adj = adjoints[idx];
        if adj.is_zero() {
            continue;
        }
        for (&arg, &partial) in node.args().iter().zip(node.local_partials()) {
            let contribution = match node.kind {
                NodeKind::DivConst => adj
                    .checked_div(partial)
                    .expect("divisor was checked nonzero while recording"),
                _ => adj * partial,
            };
            adjoints[arg] += contribution;
        }
    }
    tape.inputs.iter().map(|&i| adjoints[i]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dual::tangent_eval;
    use crate::functions::FunctionId;
    use crate::scalar::Int8Wrap;
    use proptest::prelude::*;
    use std::num::Wrapping;

    struct Five;
    impl Program for Five {
        fn eval<S: Scalar>(&self, _x: &[S]) -> Result<S> {
            Ok(S::constant(5))
        }
    }

    /// Reuses inputs and mixes every supported operation.
    struct Mixed;
    impl Program for Mixed {
        fn eval<S: Scalar>(&self, x: &[S]) -> Result<S> {
            let mut y = S::zero();
            for (i, &xi) in x.iter().enumerate() {
                let next = x[(i + 1) % x.len()];
                y += xi * xi * next - S::constant(2) * xi.powi(3);
                y = y.checked_div(S::constant(2))?;
                y += (xi * next).checked_div(S::constant(3) + xi * xi)?;
            }
            Ok(y)
        }
    }

    #[test]
    fn records_pairs() {
        let (tape, y) = record(&FunctionId::Pairs, &[2.0, 1.0, 4.0, 3.0]).unwrap();
        assert_eq!(y, 14.0);
        assert_eq!(tape.output_value(), 14.0);
        assert_eq!(tape.count(NodeKind::Mul), 2);
        assert_eq!(tape.count(NodeKind::Add), 2);
        assert_eq!(tape.count(NodeKind::Input), 4);
        for (idx, node) in tape.nodes().iter().enumerate() {
            assert!(node.args().iter().all(|&a| a < idx));
            assert_eq!(node.args().len(), node.local_partials().len());
            if node.kind() == NodeKind::Mul {
                let [a, b] = [node.args()[0], node.args()[1]];
                assert_eq!(node.local_partials()[0], tape.nodes()[b].value());
                assert_eq!(node.local_partials()[1], tape.nodes()[a].value());
            }
        }
    }

    #[test]
    fn records_constant_program() {
        let (tape, y) = record(&Five, &[1.0, 2.0]).unwrap();
        assert_eq!(y, 5.0);
        let dependent = tape
            .nodes()
            .iter()
            .filter(|n| !matches!(n.kind(), NodeKind::Input | NodeKind::Constant))
            .count();
        assert_eq!(dependent, 0);
        assert_eq!(reverse_sweep(&tape, 1.0), vec![0.0, 0.0]);
    }

    #[test]
    fn records_cubes() {
        let (_, y) = record(&FunctionId::Cubes, &[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(y, 100.0 / 6.0);
    }

    #[test]
    fn tape_size_is_linear_in_the_input() {
        let len = |n: usize| record(&FunctionId::Cubes, &vec![1.0; n]).unwrap().0.len();
        assert_eq!(len(20) - len(10), len(30) - len(20));
    }

    #[test]
    fn sweep_worked_example() {
        let (tape, _) = record(&FunctionId::Pairs, &[2.0, 1.0, 4.0, 3.0]).unwrap();
        assert_eq!(reverse_sweep(&tape, 1.0), vec![1.0, 2.0, 3.0, 4.0]);
        assert_eq!(reverse_sweep(&tape, 0.0), vec![0.0; 4]);
        let xi: Vec<Int8Wrap> = [2, 1, 4, 3].map(Wrapping).to_vec();
        let (tape, _) = record(&FunctionId::Pairs, &xi).unwrap();
        assert_eq!(reverse_sweep(&tape, Wrapping(1)), [1, 2, 3, 4].map(Wrapping).to_vec());
    }

    #[test]
    fn sweep_cubes_scaled_seed() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let (tape, _) = record(&FunctionId::Cubes, &x).unwrap();
        let g = reverse_sweep(&tape, 2.0);
        let f = |x: &[f64]| x.iter().map(|v| v * v * v).sum::<f64>() / 6.0;
        for (i, &expected) in [1.0, 4.0, 9.0, 16.0].iter().enumerate() {
            assert!((g[i] - expected).abs() < 1e-12);
            let h = 1e-6;
            let mut xp = x;
            let mut xm = x;
            xp[i] += h;
            xm[i] -= h;
            let fd = 2.0 * (f(&xp) - f(&xm)) / (2.0 * h);
            assert!((fd - expected).abs() / expected < 1e-6);
        }
    }

    #[test]
    fn repeated_use_accumulates() {
        struct Square;
        impl Program for Square {
            fn eval<S: Scalar>(&self, x: &[S]) -> Result<S> {
                Ok(x[0] * x[0] + x[0])
            }
        }
        let (tape, _) = record(&Square, &[3.0]).unwrap();
        assert_eq!(reverse_sweep(&tape, 1.0), vec![7.0]);
    }

    #[test]
    fn integer_division_by_variable_is_unsupported() {
        struct Ratio;
        impl Program for Ratio {
            fn eval<S: Scalar>(&self, x: &[S]) -> Result<S> {
                Ok(x[0].checked_div(x[1])?)
            }
        }
        let x: Vec<Int8Wrap> = vec![Wrapping(4), Wrapping(2)];
        let err = record(&Ratio, &x).unwrap_err();
        assert_eq!(err, crate::Error::Arith(ArithError::NonConstantDivisor));
        let (tape, y) = record(&Ratio, &[4.0, 2.0]).unwrap();
        assert_eq!(y, 2.0);
        assert_eq!(reverse_sweep(&tape, 1.0), vec![0.5, -1.0]);
    }

    #[test]
    fn sweeps_run_concurrently_over_one_tape() {
        let (tape, _) = record(&Mixed, &[0.5, -1.0, 1.5, 2.0]).unwrap();
        let serial: Vec<Vec<f64>> = (1..=4).map(|s| reverse_sweep(&tape, f64::from(s))).collect();
        let parallel: Vec<Vec<f64>> = std::thread::scope(|scope| {
            let handles: Vec<_> =
                (1..=4).map(|s| scope.spawn({ let t = &tape; move || reverse_sweep(t, f64::from(s)) })).collect();
            handles.into_iter().map(|h| h.join().unwrap()).collect()
        });
        assert_eq!(serial, parallel);
    }

    proptest! {
        #[test]
        fn adjoint_tangent_identity_mixed(
            x in prop::collection::vec(-2.0f64..2.0, 1..10),
            seed in any::<u64>(),
            y_a1 in -2.0f64..2.0,
        ) {
            let n = x.len();
            let x_t1: Vec<f64> = (0..n).map(|i| ((seed >> (i % 60)) & 7) as f64 / 3.0 - 1.0).collect();
            let (_, y_t1) = tangent_eval(&Mixed, &x, &x_t1).unwrap();
            let (tape, _) = record(&Mixed, &x).unwrap();
            let x_a1 = reverse_sweep(&tape, y_a1);
            let lhs: f64 = x_a1.iter().zip(&x_t1).map(|(a, t)| a * t).sum();
            let rhs = y_a1 * y_t1;
            prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(rhs.abs()).max(1.0));
        }

        #[test]
        fn adjoint_tangent_identity_int8(
            x in prop::collection::vec(any::<i8>(), 0..8),
            t in prop::collection::vec(any::<i8>(), 8),
            y_a1 in any::<i8>(),
        ) {
            // wrapping arithmetic is a ring, so the identity holds exactly even under overflow
            let n = x.len() & !1;
            let x: Vec<Int8Wrap> = x[..n].iter().map(|&v| Wrapping(v)).collect();
            let x_t1: Vec<Int8Wrap> = t[..n].iter().map(|&v| Wrapping(v)).collect();
            let (_, y_t1) = tangent_eval(&FunctionId::Pairs, &x, &x_t1).unwrap();
            let (tape, _) = record(&FunctionId::Pairs, &x).unwrap();
            let x_a1 = reverse_sweep(&tape, Wrapping(y_a1));
            let lhs = x_a1.iter().zip(&x_t1).fold(Wrapping(0i8), |acc, (a, t)| acc + *a * *t);
            prop_assert_eq!(lhs, Wrapping(y_a1) * y_t1);
        }
    }
}
