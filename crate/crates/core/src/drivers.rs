//! Gradient and Hessian accumulation.
//!
//! Every driver feeds a fixed [`SeedPlan`] through one of the four derivative
//! routines of an [`Engine`] and reports how many routine calls it made. The
//! sparsity-aware Hessian drivers trust the caller's claim that `f''` is
//! diagonal; nothing is detected at run time.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::dual::tangent_eval;
use crate::error::{Error, Result};
use crate::functions::{hand_a1t2_cubes, hand_adjoint, hand_t1t2_cubes, hand_tangent, FunctionId};
use crate::scalar::Carrier;
use crate::second_order::{a1t2_eval, t1t2_eval};
use crate::tape::{record, reverse_sweep};

/// Which derivative code answers the driver's calls.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    /// Operator-overloading engines: duals and the tape.
    Generic,
    /// The hand-derived routines in [`crate::functions`].
    Hand,
}

impl Engine {
    pub fn name(self) -> &'static str {
        match self {
            Engine::Generic => "generic",
            Engine::Hand => "hand",
        }
    }

    pub fn tangent<C: Carrier>(self, fid: FunctionId, x: &[C], x_t1: &[C]) -> Result<C> {
        match self {
            Engine::Generic => tangent_eval(&fid, x, x_t1).map(|(_, t)| t),
            Engine::Hand => hand_tangent(fid, x, x_t1),
        }
    }

    pub fn adjoint<C: Carrier>(self, fid: FunctionId, x: &[C], y_a1: C) -> Result<Vec<C>> {
        match self {
            Engine::Generic => {
                let (tape, _) = record(&fid, x)?;
                Ok(reverse_sweep(&tape, y_a1))
            }
            Engine::Hand => hand_adjoint(fid, x, y_a1),
        }
    }

    pub fn t1t2<C: Carrier>(self, fid: FunctionId, x: &[C], x_t1: &[C], x_t2: &[C]) -> Result<C> {
        match self {
            Engine::Generic => t1t2_eval(&fid, x, x_t1, x_t2),
            Engine::Hand => {
                Self::hand_second_order(fid)?;
                hand_t1t2_cubes(x, x_t1, x_t2)
            }
        }
    }

    pub fn a1t2<C: Carrier>(self, fid: FunctionId, x: &[C], y_a1: C, x_t2: &[C]) -> Result<Vec<C>> {
        match self {
            Engine::Generic => a1t2_eval(&fid, x, y_a1, x_t2),
            Engine::Hand => {
                Self::hand_second_order(fid)?;
                hand_a1t2_cubes(x, y_a1, x_t2)
            }
        }
    }

    fn hand_second_order(fid: FunctionId) -> Result<()> {
        match fid {
            FunctionId::Cubes => Ok(()),
            FunctionId::Pairs => Err(Error::Unsupported(
                "no hand-coded second-order routines exist for pairs; use --engine generic".into(),
            )),
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Engine {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "generic" => Ok(Engine::Generic),
            "hand" => Ok(Engine::Hand),
            other => Err(Error::Unsupported(format!("unknown engine `{other}`"))),
        }
    }
}

/// Seed directions a driver feeds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeedPlan {
    /// `eᵢ` for `i = 0..N`.
    BasisLoop,
    /// A single output adjoint `y_a1 = 1`.
    OutputAdjoint,
    /// `x_t1 = x_t2 = eᵢ`.
    PairedBasis,
    /// `(eᵢ, eⱼ)` for `j ≤ i`.
    SymmetricPairs,
    /// `x_t2 = (1, …, 1)` with `y_a1 = 1`.
    OnesCompression,
}

impl SeedPlan {
    pub fn planned_evaluations(self, n: usize) -> u64 {
        let n = n as u64;
        match self {
            SeedPlan::BasisLoop | SeedPlan::PairedBasis => n,
            SeedPlan::SymmetricPairs => n * (n + 1) / 2,
            SeedPlan::OutputAdjoint | SeedPlan::OnesCompression => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EvalStats {
    pub evaluations: u64,
    pub elapsed: Duration,
}

impl EvalStats {
    /// Whole milliseconds, truncated.
    pub fn elapsed_ms(&self) -> u64 {
        self.elapsed.as_millis() as u64
    }
}

/// Symmetric matrix stored as its packed lower triangle.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix<C> {
    n: usize,
    lower: Vec<C>,
}

impl<C: Carrier> SymmetricMatrix<C> {
    fn zeros(n: usize) -> Self {
        Self { n, lower: vec![C::zero(); n * (n + 1) / 2] }
    }

    fn slot(i: usize, j: usize) -> usize {
        let (r, c) = if j <= i { (i, j) } else { (j, i) };
        r * (r + 1) / 2 + c
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> C {
        assert!(i < self.n && j < self.n, "index ({i}, {j}) out of range for {}x{}", self.n, self.n);
        self.lower[Self::slot(i, j)]
    }

    fn set(&mut self, i: usize, j: usize, v: C) {
        self.lower[Self::slot(i, j)] = v;
    }

    pub fn diagonal(&self) -> Vec<C> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    /// Row-major dense copy.
    pub fn to_rows(&self) -> Vec<Vec<C>> {
        (0..self.n).map(|i| (0..self.n).map(|j| self.get(i, j)).collect()).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum HessianResult<C> {
    Dense(SymmetricMatrix<C>),
    Diagonal(Vec<C>),
}

impl<C: Carrier> HessianResult<C> {
    pub fn diagonal(&self) -> Vec<C> {
        match self {
            HessianResult::Dense(m) => m.diagonal(),
            HessianResult::Diagonal(d) => d.clone(),
        }
    }
}

fn unit_seed<C: Carrier>(n: usize) -> Vec<C> {
    vec![C::zero(); n]
}

fn finish(evaluations: u64, start: Instant) -> EvalStats {
    EvalStats { evaluations, elapsed: start.elapsed() }
}

/// Gradient from `N` tangent evaluations seeded with `eᵢ`.
pub fn gradient_tangent<C: Carrier>(engine: Engine, fid: FunctionId, x: &[C]) -> Result<(Vec<C>, EvalStats)> {
    let start = Instant::now();
    fid.validate_len(x.len())?;
    let mut x_t1 = unit_seed::<C>(x.len());
    let mut gradient = Vec::with_capacity(x.len());
    let mut evals = 0;
    for i in 0..x.len() {
        x_t1[i] = C::one();
        gradient.push(engine.tangent(fid, x, &x_t1)?);
        evals += 1;
        x_t1[i] = C::zero();
    }
    Ok((gradient, finish(evals, start)))
}

/// Gradient from one adjoint evaluation with `y_a1 = 1`.
pub fn gradient_adjoint<C: Carrier>(engine: Engine, fid: FunctionId, x: &[C]) -> Result<(Vec<C>, EvalStats)> {
    let start = Instant::now();
    let gradient = engine.adjoint(fid, x, C::one())?;
    Ok((gradient, finish(1, start)))
}

/// Dense Hessian from `N(N+1)/2` second-order tangent evaluations over the
/// lower triangle, mirrored into the upper one.
pub fn hessian_dense_t1t2<C: Carrier>(
    engine: Engine,
    fid: FunctionId,
    x: &[C],
) -> Result<(HessianResult<C>, EvalStats)> {
    let start = Instant::now();
    fid.validate_len(x.len())?;
    let n = x.len();
    let mut x_t1 = unit_seed::<C>(n);
    let mut x_t2 = unit_seed::<C>(n);
    let mut hessian = SymmetricMatrix::zeros(n);
    let mut evals = 0;
    for i in 0..n {
        x_t1[i] = C::one();
        for j in 0..=i {
            x_t2[j] = C::one();
            hessian.set(i, j, engine.t1t2(fid, x, &x_t1, &x_t2)?);
            evals += 1;
            x_t2[j] = C::zero();
        }
        x_t1[i] = C::zero();
    }
    Ok((HessianResult::Dense(hessian), finish(evals, start)))
}

/// Hessian diagonal from `N` second-order tangent evaluations with
/// `x_t1 = x_t2 = eᵢ`. Only valid for a diagonal Hessian.
pub fn hessian_diag_t1t2<C: Carrier>(
    engine: Engine,
    fid: FunctionId,
    x: &[C],
) -> Result<(HessianResult<C>, EvalStats)> {
    let start = Instant::now();
    fid.validate_len(x.len())?;
    let mut seed = unit_seed::<C>(x.len());
    let mut diagonal = Vec::with_capacity(x.len());
    let mut evals = 0;
    for i in 0..x.len() {
        seed[i] = C::one();
        diagonal.push(engine.t1t2(fid, x, &seed, &seed)?);
        evals += 1;
        seed[i] = C::zero();
    }
    Ok((HessianResult::Diagonal(diagonal), finish(evals, start)))
}

/// Hessian column by column from `N` second-order adjoint evaluations with
/// `y_a1 = 1`, `x_t2 = eᵢ`. The lower part of each column is kept and mirrored.
pub fn hessian_columns_a1t2<C: Carrier>(
    engine: Engine,
    fid: FunctionId,
    x: &[C],
) -> Result<(HessianResult<C>, EvalStats)> {
    let start = Instant::now();
    fid.validate_len(x.len())?;
    let n = x.len();
    let mut x_t2 = unit_seed::<C>(n);
    let mut hessian = SymmetricMatrix::zeros(n);
    let mut evals = 0;
    for i in 0..n {
        x_t2[i] = C::one();
        let column = engine.a1t2(fid, x, C::one(), &x_t2)?;
        evals += 1;
        for (j, &v) in column.iter().enumerate().skip(i) {
            hessian.set(j, i, v);
        }
        x_t2[i] = C::zero();
    }
    Ok((HessianResult::Dense(hessian), finish(evals, start)))
}

/// Hessian diagonal by direct compression: one second-order adjoint
/// evaluation with `x_t2` all ones. Only valid when all columns are
/// structurally orthogonal.
pub fn hessian_compressed_a1t2<C: Carrier>(
    engine: Engine,
    fid: FunctionId,
    x: &[C],
) -> Result<(HessianResult<C>, EvalStats)> {
    let start = Instant::now();
    let ones = vec![C::one(); x.len()];
    let diagonal = engine.a1t2(fid, x, C::one(), &ones)?;
    Ok((HessianResult::Diagonal(diagonal), finish(1, start)))
}

/// The six accumulation strategies by name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Driver {
    #[serde(rename = "t1")]
    GradientTangent,
    #[serde(rename = "a1")]
    GradientAdjoint,
    #[serde(rename = "t1t2-dense")]
    HessianDenseT1T2,
    #[serde(rename = "t1t2-diag")]
    HessianDiagT1T2,
    #[serde(rename = "a1t2-cols")]
    HessianColumnsA1T2,
    #[serde(rename = "a1t2-compressed")]
    HessianCompressedA1T2,
}

/// What a driver produced.
#[derive(Debug, Clone, PartialEq)]
pub enum DriverOutput<C> {
    Gradient(Vec<C>),
    Hessian(HessianResult<C>),
}

impl<C: Carrier> DriverOutput<C> {
    /// The gradient, or the Hessian diagonal.
    pub fn vector(&self) -> Vec<C> {
        match self {
            DriverOutput::Gradient(g) => g.clone(),
            DriverOutput::Hessian(h) => h.diagonal(),
        }
    }
}

impl Driver {
    pub const ALL: [Driver; 6] = [
        Driver::GradientTangent,
        Driver::GradientAdjoint,
        Driver::HessianDenseT1T2,
        Driver::HessianDiagT1T2,
        Driver::HessianColumnsA1T2,
        Driver::HessianCompressedA1T2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Driver::GradientTangent => "t1",
            Driver::GradientAdjoint => "a1",
            Driver::HessianDenseT1T2 => "t1t2-dense",
            Driver::HessianDiagT1T2 => "t1t2-diag",
            Driver::HessianColumnsA1T2 => "a1t2-cols",
            Driver::HessianCompressedA1T2 => "a1t2-compressed",
        }
    }

    pub fn seed_plan(self) -> SeedPlan {
        match self {
            Driver::GradientTangent | Driver::HessianColumnsA1T2 => SeedPlan::BasisLoop,
            Driver::GradientAdjoint => SeedPlan::OutputAdjoint,
            Driver::HessianDenseT1T2 => SeedPlan::SymmetricPairs,
            Driver::HessianDiagT1T2 => SeedPlan::PairedBasis,
            Driver::HessianCompressedA1T2 => SeedPlan::OnesCompression,
        }
    }

    pub fn is_second_order(self) -> bool {
        !matches!(self, Driver::GradientTangent | Driver::GradientAdjoint)
    }

    /// Whether the driver materializes an `N×N` matrix.
    pub fn is_dense(self) -> bool {
        matches!(self, Driver::HessianDenseT1T2 | Driver::HessianColumnsA1T2)
    }

    pub fn run<C: Carrier>(self, engine: Engine, fid: FunctionId, x: &[C]) -> Result<(DriverOutput<C>, EvalStats)> {
        let hessian = |r: Result<(HessianResult<C>, EvalStats)>| r.map(|(h, s)| (DriverOutput::Hessian(h), s));
        match self {
            Driver::GradientTangent => gradient_tangent(engine, fid, x).map(|(g, s)| (DriverOutput::Gradient(g), s)),
            Driver::GradientAdjoint => gradient_adjoint(engine, fid, x).map(|(g, s)| (DriverOutput::Gradient(g), s)),
            Driver::HessianDenseT1T2 => hessian(hessian_dense_t1t2(engine, fid, x)),
            Driver::HessianDiagT1T2 => hessian(hessian_diag_t1t2(engine, fid, x)),
            Driver::HessianColumnsA1T2 => hessian(hessian_columns_a1t2(engine, fid, x)),
            Driver::HessianCompressedA1T2 => hessian(hessian_compressed_a1t2(engine, fid, x)),
        }
    }
}

impl fmt::Display for Driver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Driver {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Driver::ALL
            .into_iter()
            .find(|d| d.name() == s)
            .ok_or_else(|| Error::Unsupported(format!("unknown driver `{s}`")))
    }
}
