//! `dualtape`: runs gradient and Hessian drivers on padded greeting inputs
//! and reports evaluation counts, run times, and the decoded greetings.

use std::io::{self, Write};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use dualtape::{
    run_benchmark, write_report, BenchConfig, Driver, Engine, FunctionId, GreetingPayload, OutputFormat, Profile,
};

#[derive(Debug, Parser)]
#[command(name = "dualtape", version, about = "Tangent vs. adjoint derivative drivers on greeting payloads")]
struct Cli {
    /// Target function: pairs | cubes
    #[arg(long, default_value = "pairs")]
    function: FunctionId,

    /// Driver(s), comma separated: t1 | a1 | t1t2-dense | t1t2-diag | a1t2-cols | a1t2-compressed.
    /// Defaults to `t1,a1` for pairs and `t1t2-diag,a1t2-compressed` for cubes.
    #[arg(long, value_delimiter = ',')]
    driver: Vec<Driver>,

    /// Derivative code: generic | hand
    #[arg(long, default_value = "hand")]
    engine: Engine,

    /// Carrier arithmetic: i8 | f64
    #[arg(long, default_value = "i8")]
    carrier: Profile,

    /// Input size (at least 10; even for pairs)
    #[arg(long, default_value_t = 10)]
    n: usize,

    /// Ten comma-separated character codes in 0..=127
    #[arg(long)]
    payload: Option<GreetingPayload>,

    /// Comma-separated input sizes; overrides --n
    #[arg(long, value_delimiter = ',')]
    sweep: Vec<usize>,

    /// Report format: text | csv | json
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
enum Format {
    Text,
    Csv,
    Json,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Text => OutputFormat::Text,
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        }
    }
}

fn default_drivers(fid: FunctionId) -> Vec<Driver> {
    match fid {
        FunctionId::Pairs => vec![Driver::GradientTangent, Driver::GradientAdjoint],
        FunctionId::Cubes => vec![Driver::HessianDiagT1T2, Driver::HessianCompressedA1T2],
    }
}

fn run(cli: Cli) -> Result<(), String> {
    let drivers = if cli.driver.is_empty() { default_drivers(cli.function) } else { cli.driver };
    let sizes = if cli.sweep.is_empty() { vec![cli.n] } else { cli.sweep };
    let payload = cli.payload.unwrap_or_else(|| GreetingPayload::default_for(cli.function));
    let format = OutputFormat::from(cli.format);

    let configs: Vec<BenchConfig> = sizes
        .iter()
        .flat_map(|&n| {
            drivers.iter().map(move |&driver| BenchConfig {
                function: cli.function,
                driver,
                engine: cli.engine,
                carrier: cli.carrier,
                n,
                payload,
                format,
            })
        })
        .collect();
    // fail before any timing run if a later configuration is invalid
    for config in &configs {
        config.validate().map_err(|e| e.to_string())?;
    }

    let mut rows = Vec::with_capacity(configs.len());
    for config in &configs {
        let row = run_benchmark(config).map_err(|e| e.to_string())?;
        if format == OutputFormat::Text {
            // stream text rows as they finish; large tangent runs take a while
            let mut out = io::stdout().lock();
            writeln!(out, "{row}").map_err(|e| e.to_string())?;
        }
        rows.push(row);
    }
    if format != OutputFormat::Text {
        write_report(&rows, format, io::stdout().lock()).map_err(|e| e.to_string())?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => e.exit(),
        Err(e) => {
            let rendered = e.to_string();
            eprintln!("{}", rendered.lines().next().unwrap_or("error: invalid arguments"));
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}
