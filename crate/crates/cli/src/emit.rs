//! CSV and JSON serialization of results.
//!
//! Sweep-row CSV schema: header `regime,n,epsilon,rho,i_value,i_stderr`, one
//! line per grid point, `\n` line endings. Reals carry at most 12 significant
//! digits with trailing zeros dropped, so identical inputs give identical
//! bytes. JSON documents are single objects with a `rows` array (or the
//! strategy list, for certificates) and a `meta` object.

use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use prismbell_core::analytic::ExpectationTable;
use prismbell_core::montecarlo::BranchTally;
use prismbell_core::oracle::SignPatternBound;
use prismbell_core::{EstimateReport, LhvCertificate, SweepRow};
use serde::Serialize;
use thiserror::Error;

pub const SWEEP_HEADER: &str = "regime,n,epsilon,rho,i_value,i_stderr";
pub const STRATEGY_HEADER: &str = "a,a_prime,b,b_prime,i_value";
pub const SIGNIFICANT_DIGITS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Sink {
    Stdout,
    File(PathBuf),
}

impl Sink {
    pub fn from_option(path: Option<&Path>) -> Self {
        path.map_or(Sink::Stdout, |p| Sink::File(p.to_path_buf()))
    }
}

#[derive(Debug, Error)]
pub enum EmitError {
    #[error("cannot write {path}: {source}")]
    Write { path: String, source: io::Error },
    #[error("cannot serialize output: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Meta {
    pub seed: u64,
    pub mode: &'static str,
    pub version: &'static str,
}

impl Meta {
    pub fn new(seed: u64, mode: &'static str) -> Self {
        Self {
            seed,
            mode,
            version: env!("CARGO_PKG_VERSION"),
        }
    }
}

/// Anything `emit` can write.
#[derive(Debug, Clone, Copy)]
pub enum Payload<'a> {
    /// Exact or sweep rows; `table` is attached to single exact points.
    Rows {
        rows: &'a [SweepRow],
        table: Option<&'a ExpectationTable>,
        meta: Meta,
    },
    Estimate(&'a EstimateReport),
    Certificate(&'a LhvCertificate),
}

/// Formats `x` with at most 12 significant digits in plain decimal notation.
pub fn format_real(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x);
    let (mantissa, exponent) = sci.split_once('e').expect("scientific notation");
    let exponent: i32 = exponent.parse().expect("integer exponent");
    let negative = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(char::is_ascii_digit).collect();
    let digits = digits.trim_end_matches('0');
    let digits = if digits.is_empty() { "0" } else { digits };

    let mut out = String::new();
    if negative {
        out.push('-');
    }
    if exponent >= 0 {
        let int_len = exponent as usize + 1;
        if digits.len() <= int_len {
            out.push_str(digits);
            out.extend(std::iter::repeat('0').take(int_len - digits.len()));
        } else {
            out.push_str(&digits[..int_len]);
            out.push('.');
            out.push_str(&digits[int_len..]);
        }
    } else {
        out.push_str("0.");
        out.extend(std::iter::repeat('0').take((-exponent - 1) as usize));
        out.push_str(digits);
    }
    out
}

/// `x` rounded to the digits [`format_real`] would print.
pub fn round_real(x: f64) -> f64 {
    format_real(x).parse().unwrap_or(x)
}

#[derive(Serialize)]
struct JsonRow {
    regime: String,
    n: u32,
    epsilon: f64,
    rho: f64,
    i_value: f64,
    i_stderr: f64,
}

impl From<&SweepRow> for JsonRow {
    fn from(r: &SweepRow) -> Self {
        Self {
            regime: r.regime.to_string(),
            n: r.n,
            epsilon: round_real(r.epsilon),
            rho: round_real(r.rho),
            i_value: round_real(r.i_value),
            i_stderr: round_real(r.i_stderr),
        }
    }
}

#[derive(Serialize)]
struct JsonTable {
    ab: f64,
    ab_prime: f64,
    a_prime_b: f64,
    a_prime_b_prime: f64,
}

impl From<&ExpectationTable> for JsonTable {
    fn from(t: &ExpectationTable) -> Self {
        Self {
            ab: round_real(t.ab),
            ab_prime: round_real(t.ab_prime),
            a_prime_b: round_real(t.a_prime_b),
            a_prime_b_prime: round_real(t.a_prime_b_prime),
        }
    }
}

#[derive(Serialize)]
struct RowsDocument {
    rows: Vec<JsonRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    table: Option<JsonTable>,
    meta: Meta,
}

#[derive(Serialize)]
struct EstimateDocument {
    rows: Vec<JsonRow>,
    trials: u64,
    table: JsonTable,
    table_se: JsonTable,
    joint_counts: JointCounts,
    ab_branches: BranchTally,
    meta: Meta,
}

/// Outcome counts per experiment, `(PP, PM, MP, MM)` order.
#[derive(Serialize)]
struct JointCounts {
    ab: [u64; 4],
    ab_prime: [u64; 4],
    a_prime_b: [u64; 4],
    a_prime_b_prime: [u64; 4],
}

#[derive(Serialize)]
struct JsonStrategy {
    a: i8,
    a_prime: i8,
    b: i8,
    b_prime: i8,
    i: i32,
}

#[derive(Serialize)]
struct CertificateDocument<'a> {
    max_i: i32,
    mixed_bound: i32,
    maximizer_count: usize,
    strategies: Vec<JsonStrategy>,
    sign_patterns: &'a [SignPatternBound],
    meta: Meta,
}

/// Sweep row for an estimate report.
pub fn estimate_row(report: &EstimateReport) -> SweepRow {
    SweepRow {
        regime: report.prep.regime(),
        n: report.params.n(),
        epsilon: report.params.epsilon(),
        rho: report.params.rho(),
        i_value: report.i_hat,
        i_stderr: report.se_i,
    }
}

fn rows_csv(rows: &[SweepRow]) -> String {
    let mut out = String::with_capacity(32 * (rows.len() + 1));
    out.push_str(SWEEP_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.regime,
            r.n,
            format_real(r.epsilon),
            format_real(r.rho),
            format_real(r.i_value),
            format_real(r.i_stderr)
        ));
    }
    out
}

fn json(value: &impl Serialize) -> Result<String, EmitError> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

/// Renders `payload` to the exact bytes `emit` would write.
pub fn render(payload: Payload<'_>, format: OutputFormat) -> Result<String, EmitError> {
    match (payload, format) {
        (Payload::Rows { rows, .. }, OutputFormat::Csv) => Ok(rows_csv(rows)),
        (Payload::Rows { rows, table, meta }, OutputFormat::Json) => json(&RowsDocument {
            rows: rows.iter().map(JsonRow::from).collect(),
            table: table.map(JsonTable::from),
            meta,
        }),
        (Payload::Estimate(report), OutputFormat::Csv) => Ok(rows_csv(&[estimate_row(report)])),
        (Payload::Estimate(report), OutputFormat::Json) => json(&EstimateDocument {
            rows: vec![JsonRow::from(&estimate_row(report))],
            trials: report.trials,
            table: JsonTable::from(&report.table),
            table_se: JsonTable::from(&report.table_se),
            joint_counts: {
                let [ab, ab_prime, a_prime_b, a_prime_b_prime] = report.joint_counts;
                JointCounts {
                    ab,
                    ab_prime,
                    a_prime_b,
                    a_prime_b_prime,
                }
            },
            ab_branches: report.ab_branches,
            meta: Meta::new(report.seed, "montecarlo"),
        }),
        (Payload::Certificate(cert), OutputFormat::Csv) => {
            let mut out = String::from(STRATEGY_HEADER);
            out.push('\n');
            for v in &cert.strategies {
                let s = v.strategy;
                out.push_str(&format!(
                    "{},{},{},{},{}\n",
                    s.a.value(),
                    s.a_prime.value(),
                    s.b.value(),
                    s.b_prime.value(),
                    v.i
                ));
            }
            Ok(out)
        }
        (Payload::Certificate(cert), OutputFormat::Json) => json(&CertificateDocument {
            max_i: cert.max_i,
            mixed_bound: cert.mixed_bound,
            maximizer_count: cert.maximizers.len(),
            strategies: cert
                .strategies
                .iter()
                .map(|v| JsonStrategy {
                    a: v.strategy.a.value(),
                    a_prime: v.strategy.a_prime.value(),
                    b: v.strategy.b.value(),
                    b_prime: v.strategy.b_prime.value(),
                    i: v.i,
                })
                .collect(),
            sign_patterns: &cert.sign_patterns,
            meta: Meta::new(0, "enumeration"),
        }),
    }
}

/// Writes `payload` to `sink`, returning the number of bytes written.
pub fn emit(payload: Payload<'_>, format: OutputFormat, sink: &Sink) -> Result<usize, EmitError> {
    let text = render(payload, format)?;
    write_bytes(text.as_bytes(), sink)?;
    Ok(text.len())
}

pub fn write_bytes(bytes: &[u8], sink: &Sink) -> Result<(), EmitError> {
    match sink {
        Sink::Stdout => {
            let mut out = io::stdout().lock();
            out.write_all(bytes)
                .and_then(|_| out.flush())
                .map_err(|source| EmitError::Write {
                    path: "<stdout>".into(),
                    source,
                })
        }
        Sink::File(path) => File::create(path)
            .and_then(|mut f| f.write_all(bytes))
            .map_err(|source| EmitError::Write {
                path: path.display().to_string(),
                source,
            }),
    }
}

/// Gnuplot script plotting `I` against epsilon from a sweep CSV at `data`.
pub fn plot_script(data: &str) -> String {
    format!(
        "# CHSH value I against epsilon; one series per (regime, n, rho) block.\n\
         set datafile separator ','\n\
         set key autotitle columnhead\n\
         set xlabel 'epsilon'\n\
         set ylabel 'I'\n\
         set yrange [1.9:4.1]\n\
         plot '{data}' using 3:5 with linespoints title 'I', \\\n     \
         2 title 'local bound' dashtype 2, \\\n     \
         2*sqrt(2) title 'singlet' dashtype 3\n"
    )
}
