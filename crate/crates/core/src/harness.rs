//! Benchmark harness: padded greeting inputs, driver runs, reports.

use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::drivers::{Driver, Engine};
use crate::error::{Error, Result};
use crate::functions::FunctionId;
use crate::scalar::{Carrier, Int8Wrap, Profile};

/// Dense drivers store `N(N+1)/2` entries and make up to that many calls.
pub const DENSE_LIMIT: usize = 4096;

/// Ten character codes, each in `0..=127`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GreetingPayload([u8; 10]);

impl GreetingPayload {
    /// Its gradient under the pairs function spells "Merry Xmas".
    pub const XMAS: GreetingPayload = GreetingPayload([101, 77, 114, 114, 32, 121, 109, 88, 115, 97]);
    /// Its cubes Hessian diagonal spells "Happy 2026".
    pub const HAPPY_2026: GreetingPayload = GreetingPayload([72, 97, 112, 112, 121, 32, 50, 48, 50, 54]);
    pub const ZERO: GreetingPayload = GreetingPayload([0; 10]);

    pub fn default_for(fid: FunctionId) -> Self {
        match fid {
            FunctionId::Pairs => Self::XMAS,
            FunctionId::Cubes => Self::HAPPY_2026,
        }
    }

    pub fn entries(&self) -> [i64; 10] {
        self.0.map(i64::from)
    }
}

impl TryFrom<&[i64]> for GreetingPayload {
    type Error = Error;
    fn try_from(values: &[i64]) -> Result<Self> {
        if values.len() != 10 {
            return Err(Error::PayloadLength(values.len()));
        }
        let mut out = [0u8; 10];
        for (slot, &v) in out.iter_mut().zip(values) {
            *slot = u8::try_from(v).ok().filter(|b| *b <= 127).ok_or(Error::NotAChar(v))?;
        }
        Ok(GreetingPayload(out))
    }
}

impl FromStr for GreetingPayload {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let values = s
            .split(',')
            .map(|t| t.trim().parse::<i64>().map_err(|e| Error::Unsupported(format!("bad payload entry `{t}`: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        GreetingPayload::try_from(values.as_slice())
    }
}

/// Zero vector of length `n` with the payload spread as five adjacent pairs,
/// pair `k` at indices `k·s` and `k·s + 1` where `s = 2·⌊n/10⌋`.
pub fn build_input<C: Carrier>(n: usize, payload: &GreetingPayload, fid: FunctionId) -> Result<Vec<C>> {
    if n < 10 {
        return Err(Error::InputTooSmall(n));
    }
    fid.validate_len(n)?;
    let stride = 2 * (n / 10);
    let mut x = vec![C::zero(); n];
    for (k, pair) in payload.entries().chunks_exact(2).enumerate() {
        x[k * stride] = C::from_i64(pair[0]);
        x[k * stride + 1] = C::from_i64(pair[1]);
    }
    Ok(x)
}

/// Characters of the nonzero entries, in order.
pub fn decode_greeting(values: &[i64]) -> Result<String> {
    values
        .iter()
        .filter(|&&v| v != 0)
        .map(|&v| {
            u8::try_from(v)
                .ok()
                .filter(u8::is_ascii)
                .map(char::from)
                .ok_or(Error::NotAChar(v))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Text,
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub function: FunctionId,
    pub driver: Driver,
    pub engine: Engine,
    pub carrier: Profile,
    pub n: usize,
    pub payload: GreetingPayload,
    pub format: OutputFormat,
}

impl BenchConfig {
    /// Hand engine, 8-bit carrier, `n = 10`, the function's greeting payload.
    pub fn new(function: FunctionId, driver: Driver) -> Self {
        Self {
            function,
            driver,
            engine: Engine::Hand,
            carrier: Profile::Int8Wrap,
            n: 10,
            payload: GreetingPayload::default_for(function),
            format: OutputFormat::Text,
        }
    }

    pub fn with_engine(mut self, engine: Engine) -> Self {
        self.engine = engine;
        self
    }

    pub fn with_carrier(mut self, carrier: Profile) -> Self {
        self.carrier = carrier;
        self
    }

    pub fn with_n(mut self, n: usize) -> Self {
        self.n = n;
        self
    }

    pub fn with_payload(mut self, payload: GreetingPayload) -> Self {
        self.payload = payload;
        self
    }

    /// Rejects combinations that cannot produce a meaningful report.
    pub fn validate(&self) -> Result<()> {
        if self.n < 10 {
            return Err(Error::InputTooSmall(self.n));
        }
        self.function.validate_len(self.n)?;
        if self.driver.is_second_order() {
            match (self.function, self.engine, self.carrier) {
                (FunctionId::Cubes, Engine::Generic, Profile::Int8Wrap) => {
                    return Err(Error::Unsupported(
                        "generic second-order cubes on i8 overflows (3x² and 6x exceed 127 before the division by 6); \
                         use --engine hand or --carrier f64"
                            .into(),
                    ))
                }
                (FunctionId::Pairs, Engine::Hand, _) => {
                    return Err(Error::Unsupported(
                        "no hand-coded second-order routines exist for pairs; use --engine generic".into(),
                    ))
                }
                _ => {}
            }
        }
        if self.driver.is_dense() && self.n > DENSE_LIMIT {
            return Err(Error::Unsupported(format!(
                "driver {} materializes an n×n Hessian; n = {} exceeds the limit of {DENSE_LIMIT}",
                self.driver, self.n
            )));
        }
        Ok(())
    }
}

/// One benchmark result. Everything but the elapsed time is a pure function
/// of the configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub n: usize,
    pub function: FunctionId,
    pub driver: Driver,
    pub engine: Engine,
    pub carrier: Profile,
    pub evaluations: u64,
    pub elapsed_ms: u64,
    pub greeting: String,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl ReportRow {
    pub fn without_timing(&self) -> ReportRow {
        ReportRow { elapsed_ms: 0, elapsed: Duration::ZERO, ..self.clone() }
    }
}

fn mode_label(driver: Driver) -> &'static str {
    match driver {
        Driver::GradientTangent => "Tangent AD",
        Driver::GradientAdjoint => "Adjoint AD",
        Driver::HessianDenseT1T2 | Driver::HessianDiagT1T2 => "Second-Order Tangent AD",
        Driver::HessianColumnsA1T2 | Driver::HessianCompressedA1T2 => "Second-Order Adjoint AD",
    }
}

impl fmt::Display for ReportRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} wishes {}! (taking {}ms; n = {}, {} evaluations, {} engine, {})",
            mode_label(self.driver),
            self.greeting,
            self.elapsed_ms,
            self.n,
            self.evaluations,
            self.engine,
            self.carrier,
        )
    }
}

fn run_with<C: Carrier>(config: &BenchConfig) -> Result<ReportRow> {
    let x: Vec<C> = build_input(config.n, &config.payload, config.function)?;
    let (output, stats) = config.driver.run(config.engine, config.function, &x)?;
    let codes = output
        .vector()
        .into_iter()
        .map(|v| v.round_to_i64().ok_or_else(|| Error::Unsupported(format!("non-finite derivative value {v}"))))
        .collect::<Result<Vec<_>>>()?;
    Ok(ReportRow {
        n: config.n,
        function: config.function,
        driver: config.driver,
        engine: config.engine,
        carrier: config.carrier,
        evaluations: stats.evaluations,
        elapsed_ms: stats.elapsed_ms(),
        greeting: decode_greeting(&codes)?,
        elapsed: stats.elapsed,
    })
}

/// Builds the input, runs the driver once, and decodes its vector output.
pub fn run_benchmark(config: &BenchConfig) -> Result<ReportRow> {
    config.validate()?;
    match config.carrier {
        Profile::Int8Wrap => run_with::<Int8Wrap>(config),
        Profile::Float64 => run_with::<f64>(config),
    }
}

/// One row per input size.
pub fn run_sweep(config: &BenchConfig, sizes: &[usize]) -> Result<Vec<ReportRow>> {
    sizes.iter().map(|&n| run_benchmark(&config.clone().with_n(n))).collect()
}

pub fn write_report<W: Write>(rows: &[ReportRow], format: OutputFormat, mut out: W) -> Result<(), std::io::Error> {
    match format {
        OutputFormat::Text => {
            for row in rows {
                writeln!(out, "{row}")?;
            }
        }
        OutputFormat::Csv => {
            let mut writer = csv::Writer::from_writer(out);
            for row in rows {
                writer.serialize(row)?;
            }
            if rows.is_empty() {
                writer.write_record(["n", "function", "driver", "engine", "carrier", "evaluations", "elapsed_ms", "greeting"])?;
            }
            writer.flush()?;
        }
        OutputFormat::Json => {
            serde_json::to_writer_pretty(&mut out, rows)?;
            writeln!(out)?;
        }
    }
    Ok(())
}
