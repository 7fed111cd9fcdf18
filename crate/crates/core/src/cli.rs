//! Command-line front end: `encode`, `decode`, `simulate`, `bounds`, `lemmas`.
//!
//! Exit status is 0 on success, 2 on usage errors (including an invalid
//! envelope specification) and 3 on data, corruption or I/O errors. CSV goes to
//! standard output, diagnostics to standard error.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::envelope::Envelope;
use crate::error::Error;
use crate::occupancy::{evaluate_binomial_inverse, evaluate_occupancy_lemma, evaluate_poisson_tail};
use crate::pc::{decode, encode, ideal_codelength, EliasCost, PcContainer};
use crate::redundancy::{bounds_report, empirical_trials};

/// Seed used when `--seed` is not given.
pub const DEFAULT_SEED: u64 = 20_240_917;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DATA: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "pcc", version, about = "Pattern Censoring code and envelope-class redundancy lab")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    /// whitespace-separated decimal symbols
    Text,
    /// raw bytes, byte b is symbol b + 1
    Bytes,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compress a symbol file into a PCC1 container
    Encode {
        input: PathBuf,
        output: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        mode: Mode,
    },
    /// Restore a symbol file from a PCC1 container
    Decode {
        input: PathBuf,
        output: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        mode: Mode,
    },
    /// Measure PC redundancy on samples from the envelope distribution
    Simulate {
        #[arg(long)]
        env: String,
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<u64>,
        #[arg(long, default_value_t = 100)]
        trials: u64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// charge first occurrences the idealized Elias cost
        #[arg(long)]
        ideal_elias: bool,
    },
    /// Redundancy bound terms of the envelope class
    Bounds {
        #[arg(long)]
        env: String,
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<u64>,
    },
    /// Numeric checks of the occupancy lemmas on the envelope distribution
    Lemmas {
        #[arg(long)]
        env: String,
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<u64>,
        #[arg(long, default_value_t = 2000)]
        trials: u64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
}

/// Failure of a subcommand, carrying its exit status.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { code: EXIT_USAGE, message: message.into() }
    }

    fn data(message: impl Into<String>) -> Self {
        Failure { code: EXIT_DATA, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidEnvelope(_) | Error::Domain(_) => Failure::usage(e.to_string()),
            _ => Failure::data(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::data(format!("i/o error: {e}"))
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::data(format!("csv error: {e}"))
    }
}

/// Parses `args` (program name first) and runs the subcommand.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() { stderr.write_all(rendered.as_bytes()) } else { stdout.write_all(rendered.as_bytes()) };
            return code;
        }
    };
    match dispatch(cli.command, stdout, stderr) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(stderr, "pcc: {}", f.message);
            f.code
        }
    }
}

fn dispatch(command: Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), Failure> {
    match command {
        Command::Encode { input, output, mode } => run_encode(&input, &output, mode, stderr),
        Command::Decode { input, output, mode } => run_decode(&input, &output, mode),
        Command::Simulate { env, n, trials, seed, ideal_elias } => {
            let env = parse_env(&env)?;
            let cost = if ideal_elias { EliasCost::Idealized } else { EliasCost::Realized };
            let dist = env.distribution();
            let rows = empirical_trials(dist.source(), &env.to_string(), &n, trials, seed, cost)?;
            write_csv(stdout, &rows)
        }
        Command::Bounds { env, n } => {
            let dist = parse_env(&env)?.distribution();
            let rows = n.iter().map(|&n| bounds_report(&dist, n)).collect::<Result<Vec<_>, _>>()?;
            write_csv(stdout, &rows)
        }
        Command::Lemmas { env, n, trials, seed } => {
            let dist = parse_env(&env)?.distribution();
            let mut rows = Vec::new();
            for &n in &n {
                rows.extend(evaluate_occupancy_lemma(dist.source(), n, trials, seed)?);
                for p in [0.01, 0.05, 0.1, 0.3, 0.5, 0.7, 0.9, 0.99] {
                    rows.push(evaluate_binomial_inverse(n, p)?);
                }
                let lambda = n as f64;
                for t in [0.0, lambda.sqrt(), 3.0 * lambda.sqrt()] {
                    let mut row = evaluate_poisson_tail(lambda, t)?;
                    row.n = n;
                    rows.push(row);
                }
            }
            write_csv(stdout, &rows)
        }
    }
}

fn parse_env(spec: &str) -> Result<Envelope, Failure> {
    spec.parse::<Envelope>().map_err(|e| Failure::usage(e.to_string()))
}

fn write_csv<R: Serialize>(out: &mut dyn Write, rows: &[R]) -> Result<(), Failure> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Symbols of an input file.
pub fn parse_symbols(data: &[u8], text: bool) -> crate::Result<Vec<u64>> {
    if !text {
        return Ok(data.iter().map(|&b| b as u64 + 1).collect());
    }
    let s = std::str::from_utf8(data).map_err(|_| Error::Domain("input is not UTF-8 text".into()))?;
    s.split_ascii_whitespace()
        .map(|tok| match tok.parse::<u64>() {
            Ok(0) => Err(Error::InvalidSymbol(0)),
            Ok(v) => Ok(v),
            Err(_) => Err(Error::Domain(format!("not a positive integer: {tok:?}"))),
        })
        .collect()
}

/// File contents for decoded symbols.
pub fn render_symbols(symbols: &[u64], text: bool) -> crate::Result<Vec<u8>> {
    if !text {
        return symbols
            .iter()
            .map(|&s| {
                if (1..=256).contains(&s) {
                    Ok((s - 1) as u8)
                } else {
                    Err(Error::CorruptStream(format!("symbol {s} has no byte value")))
                }
            })
            .collect();
    }
    if symbols.is_empty() {
        return Ok(Vec::new());
    }
    let mut out = symbols.iter().map(u64::to_string).collect::<Vec<_>>().join(" ");
    out.push('\n');
    Ok(out.into_bytes())
}

fn run_encode(input: &PathBuf, output: &PathBuf, mode: Mode, stderr: &mut dyn Write) -> Result<(), Failure> {
    let data = std::fs::read(input)?;
    // malformed input files are data errors, not usage errors
    let symbols = parse_symbols(&data, mode == Mode::Text).map_err(|e| Failure::data(e.to_string()))?;
    let container = encode(&symbols)?;
    let ideal = ideal_codelength(&symbols, EliasCost::Realized)?;
    let idealized = ideal_codelength(&symbols, EliasCost::Idealized)?;
    std::fs::write(output, container.to_bytes())?;
    writeln!(
        stderr,
        "symbols={} distinct={} bits={} mixture_bits={:.3} elias_bits={} elias_bits_idealized={:.3}",
        symbols.len(),
        crate::occupancy::distinct(&symbols),
        container.bit_length(),
        ideal.mixture_bits,
        ideal.elias_bits,
        idealized.elias_bits
    )?;
    Ok(())
}

fn run_decode(input: &PathBuf, output: &PathBuf, mode: Mode) -> Result<(), Failure> {
    let data = std::fs::read(input)?;
    let container = PcContainer::from_bytes(&data)?;
    let symbols = decode(&container)?;
    let bytes = render_symbols(&symbols, mode == Mode::Text)?;
    std::fs::write(output, bytes)?;
    Ok(())
}
