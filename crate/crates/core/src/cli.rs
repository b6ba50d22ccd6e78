//! Command-line front end: symbol parsing, reports, sweeps and corpus runs.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::compop;
use crate::conjfinder::{self, OptimizeOptions, StudyRow};
use crate::csym::{self, CsVerdict, CsymError};
use crate::mobius::{self, MobiusError, MobiusMap};
use crate::paperchecks::{self, CheckError, CheckLine, Suite, SuiteParams};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NOT_SELF_MAP: i32 = 2;
pub const EXIT_VERIFY_FAILED: i32 = 3;

const SIGNIFICANT_DIGITS: usize = 15;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot parse symbol: {0}")]
    Parse(String),
    #[error("symbol family {family} is missing parameter {param}")]
    MissingParam { family: &'static str, param: &'static str },
    #[error("invalid symbol: {0}")]
    Mobius(#[from] MobiusError),
    #[error("symbol is not a self-map of the unit disk")]
    NotSelfMap,
    #[error("{0}")]
    Domain(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::NotSelfMap | CliError::Domain(_) => EXIT_NOT_SELF_MAP,
            _ => EXIT_USAGE,
        }
    }
}

impl From<CsymError> for CliError {
    fn from(e: CsymError) -> Self {
        match e {
            CsymError::NotSelfMap => CliError::NotSelfMap,
            other => CliError::Domain(other.to_string()),
        }
    }
}

impl From<CheckError> for CliError {
    fn from(e: CheckError) -> Self {
        match e {
            CheckError::NotSelfMap => CliError::NotSelfMap,
            other => CliError::Domain(other.to_string()),
        }
    }
}

impl From<conjfinder::ConjError> for CliError {
    fn from(e: conjfinder::ConjError) -> Self {
        match e {
            conjfinder::ConjError::CompOp(compop::CompOpError::NotSelfMap) => CliError::NotSelfMap,
            other => CliError::Domain(other.to_string()),
        }
    }
}

/// A complex number written as `[re, im]` or as a bare real.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Num {
    Pair([f64; 2]),
    Real(f64),
}

impl Num {
    pub fn value(&self) -> Complex64 {
        match *self {
            Num::Pair([re, im]) => Complex64::new(re, im),
            Num::Real(re) => Complex64::new(re, 0.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum Family {
    Rotation,
    Involution,
    Elliptic3,
    Elliptic,
    DilateTranslate,
    #[serde(rename = "bz_over_1_minus_cz")]
    #[value(name = "bz_over_1_minus_cz")]
    BzOver1MinusCz,
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Rotation => "rotation",
            Family::Involution => "involution",
            Family::Elliptic3 => "elliptic3",
            Family::Elliptic => "elliptic",
            Family::DilateTranslate => "dilate_translate",
            Family::BzOver1MinusCz => "bz_over_1_minus_cz",
        }
    }
}

/// Parameters of a named family. Unused fields are ignored.
///
/// * `rotation`: `theta` (radians) or `p`, `q` for `e^{2πi p/q}`.
/// * `involution`, `elliptic3`: `a`.
/// * `elliptic`: `a`, `p`, `q`.
/// * `dilate_translate`: `s`, `t` for `sz + t`.
/// * `bz_over_1_minus_cz`: `b`, `c`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FamilyParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<Num>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<Num>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<Num>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<Num>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<Num>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SymbolSpec {
    Raw { a: Num, b: Num, c: Num, d: Num },
    Named {
        family: Family,
        #[serde(flatten)]
        params: FamilyParams,
    },
}

fn need<T: Copy>(v: Option<T>, family: Family, param: &'static str) -> Result<T, CliError> {
    v.ok_or(CliError::MissingParam { family: family.name(), param })
}

impl SymbolSpec {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))
    }

    pub fn family(family: Family, params: FamilyParams) -> Self {
        SymbolSpec::Named { family, params }
    }

    pub fn resolve(&self) -> Result<MobiusMap, CliError> {
        match self {
            SymbolSpec::Raw { a, b, c, d } => Ok(MobiusMap::new(a.value(), b.value(), c.value(), d.value())?),
            SymbolSpec::Named { family, params: p } => {
                let f = *family;
                Ok(match f {
                    Family::Rotation => match p.theta {
                        Some(theta) => MobiusMap::scaling(Complex64::from_polar(1.0, theta))?,
                        None => MobiusMap::rotation(p.p.unwrap_or(1), need(p.q, f, "q")?),
                    },
                    Family::Involution => mobius::involution(need(p.a, f, "a")?.value())?,
                    Family::Elliptic3 => mobius::elliptic(need(p.a, f, "a")?.value(), 1, 3)?,
                    Family::Elliptic => mobius::elliptic(need(p.a, f, "a")?.value(), p.p.unwrap_or(1), need(p.q, f, "q")?)?,
                    Family::DilateTranslate => MobiusMap::affine(need(p.s, f, "s")?.value(), need(p.t, f, "t")?.value())?,
                    Family::BzOver1MinusCz => MobiusMap::fixing_zero(need(p.b, f, "b")?.value(), need(p.c, f, "c")?.value())?,
                })
            }
        }
    }

    /// Display label used in tables.
    pub fn label(&self) -> String {
        serde_json::to_string(self).unwrap_or_default()
    }
}

/// The resolved symbol as it appears in reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymbolEcho {
    pub spec: SymbolSpec,
    /// Normalized `[a, b, c, d]`.
    pub coefficients: [Complex64; 4],
}

impl SymbolEcho {
    fn new(spec: &SymbolSpec, phi: &MobiusMap) -> Self {
        SymbolEcho { spec: spec.clone(), coefficients: phi.coefficients() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifySection {
    pub suite: Suite,
    pub params: SuiteParams,
    pub checks: Vec<CheckLine>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusEntry {
    pub line: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub is_cs: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected_cs: Option<bool>,
    pub class: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusIssue {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusSection {
    pub total: usize,
    pub entries: Vec<CorpusEntry>,
    pub mismatches: Vec<CorpusIssue>,
    pub errors: Vec<CorpusIssue>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symbol: Option<SymbolEcho>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verdict: Option<CsVerdict>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residual_study: Option<Vec<StudyRow>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verification: Option<VerifySection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub corpus: Option<CorpusSection>,
}

impl Report {
    fn new(command: &str, seed: u64) -> Self {
        Report {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            seed,
            symbol: None,
            class: None,
            verdict: None,
            residual_study: None,
            verification: None,
            corpus: None,
        }
    }

    /// Key-sorted JSON with every float rounded to 15 significant digits.
    pub fn to_stable_json(&self) -> String {
        let value = serde_json::to_value(self).expect("report is always serializable");
        let mut text = serde_json::to_string_pretty(&round_value(value)).expect("json value prints");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x).parse().unwrap_or(x)
}

fn round_value(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => n
            .as_f64()
            .and_then(|x| serde_json::Number::from_f64(round_sig(x)))
            .map(Value::Number)
            .unwrap_or(Value::Null),
        Value::Array(items) => Value::Array(items.into_iter().map(round_value).collect()),
        Value::Object(map) => Value::Object(map.into_iter().map(|(k, v)| (k, round_value(v))).collect()),
        other => other,
    }
}

/// Parses `re` or `re,im`.
fn parse_complex(text: &str) -> Result<Complex64, String> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let num = |s: &str| s.parse::<f64>().map_err(|e| format!("{s}: {e}"));
    match parts.as_slice() {
        [re] => Ok(Complex64::new(num(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(num(re)?, num(im)?)),
        _ => Err(format!("expected `re` or `re,im`, got {text}")),
    }
}

/// Comma-separated truncation list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schedule(pub Vec<usize>);

fn parse_schedule(text: &str) -> Result<Schedule, String> {
    text.split(',').map(|s| s.trim().parse::<usize>().map_err(|e| format!("{s}: {e}"))).collect::<Result<_, _>>().map(Schedule)
}

/// Parameter values of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid(pub Vec<f64>);

fn parse_grid_arg(text: &str) -> Result<Grid, String> {
    parse_grid(text).map(Grid)
}

/// `lo:hi:count` (inclusive, evenly spaced) or a comma-separated list; empty
/// input is an empty grid.
pub fn parse_grid(text: &str) -> Result<Vec<f64>, String> {
    let text = text.trim();
    if text.is_empty() {
        return Ok(Vec::new());
    }
    if let [lo, hi, count] = text.split(':').collect::<Vec<_>>().as_slice() {
        let lo: f64 = lo.trim().parse().map_err(|e| format!("{lo}: {e}"))?;
        let hi: f64 = hi.trim().parse().map_err(|e| format!("{hi}: {e}"))?;
        let count: usize = count.trim().parse().map_err(|e| format!("{count}: {e}"))?;
        return Ok(match count {
            0 => Vec::new(),
            1 => vec![lo],
            _ => (0..count).map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64).collect(),
        });
    }
    text.split(',').map(|s| s.trim().parse::<f64>().map_err(|e| format!("{s}: {e}"))).collect()
}

#[derive(Debug, Parser)]
#[command(name = "lfcs", version, about = "Complex symmetry of composition operators with linear fractional symbols")]
pub struct Cli {
    /// Emit the machine-readable report instead of a text summary.
    #[arg(long, global = true)]
    pub json: bool,
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide complex symmetry of C_φ from the fixed points of φ.
    Classify {
        #[arg(long)]
        symbol: String,
    },
    /// Run a suite of numerical identity checks.
    Verify {
        #[arg(long, value_enum, default_value = "all")]
        suite: SuiteArg,
        #[arg(long, value_parser = parse_complex, default_value = "0.5")]
        a: Complex64,
        #[arg(long, value_parser = parse_complex, default_value = "0.5")]
        b: Complex64,
        #[arg(long, value_parser = parse_complex, default_value = "0.25")]
        c: Complex64,
        #[arg(long, default_value_t = paperchecks::DEFAULT_TRUNCATION)]
        truncation: usize,
        #[arg(long, default_value_t = paperchecks::DEFAULT_K)]
        k: usize,
    },
    /// Best symmetry residual of the finite sections of C_φ.
    Residual {
        #[arg(long)]
        symbol: String,
        /// Comma-separated truncations; overrides --truncation.
        #[arg(long, value_parser = parse_schedule)]
        truncation_schedule: Option<Schedule>,
        #[arg(long, default_value_t = 32)]
        truncation: usize,
        #[arg(long, default_value_t = OptimizeOptions::default().restarts)]
        restarts: usize,
        #[arg(long, default_value_t = OptimizeOptions::default().max_iters)]
        max_iters: usize,
    },
    /// Classify a one-parameter family over a grid and write CSV.
    Sweep {
        #[arg(long, value_enum)]
        family: Family,
        /// `lo:hi:count` or a comma-separated list of parameter values.
        #[arg(long, value_parser = parse_grid_arg, default_value = "")]
        grid: Grid,
        #[arg(long)]
        out: PathBuf,
        /// Also record the optimizer residual at this truncation.
        #[arg(long)]
        residual_truncation: Option<usize>,
        #[arg(long, default_value_t = OptimizeOptions::default().max_iters)]
        max_iters: usize,
    },
    /// Classify every symbol of a JSONL corpus and compare with expectations.
    Corpus {
        #[arg(long = "in")]
        input: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SuiteArg {
    All,
    Identities,
    Order3,
    Schroeder,
    Final,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Suite {
        match s {
            SuiteArg::All => Suite::All,
            SuiteArg::Identities => Suite::Identities,
            SuiteArg::Order3 => Suite::Order3,
            SuiteArg::Schroeder => Suite::Schroeder,
            SuiteArg::Final => Suite::Final,
        }
    }
}

/// Outcome of one invocation: the report plus the exit code it implies.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub report: Report,
    pub code: i32,
    pub text: String,
}

pub fn cmd_classify(spec: &SymbolSpec, seed: u64) -> Result<Outcome, CliError> {
    let phi = spec.resolve()?;
    let verdict = csym::decide(&phi)?;
    let mut report = Report::new("classify", seed);
    report.symbol = Some(SymbolEcho::new(spec, &phi));
    report.class = Some(verdict.class.name().to_string());
    let witnesses: Vec<&str> = verdict.witnesses.iter().map(|w| w.label()).collect();
    let text = format!(
        "symbol: {phi}\nclass: {}\ncomplex symmetric: {}\nwitnesses: {}\n",
        verdict.class.name(),
        verdict.is_cs,
        if witnesses.is_empty() { "none".to_string() } else { witnesses.join(", ") }
    );
    report.verdict = Some(verdict);
    Ok(Outcome { report, code: EXIT_OK, text })
}

pub fn cmd_verify(suite: Suite, params: SuiteParams, seed: u64) -> Result<Outcome, CliError> {
    let checks = paperchecks::run_suite(suite, &params)?;
    let pass = checks.iter().all(|c| c.pass);
    let mut text = String::new();
    for c in &checks {
        text.push_str(&format!("{} {:<40} {:.3e} (tol {:.0e})\n", if c.pass { "PASS" } else { "FAIL" }, c.name, c.residual, c.tol));
    }
    text.push_str(&format!("{}\n", if pass { "all checks passed" } else { "verification failed" }));
    let mut report = Report::new("verify", seed);
    report.verification = Some(VerifySection { suite, params, checks, pass });
    Ok(Outcome { report, code: if pass { EXIT_OK } else { EXIT_VERIFY_FAILED }, text })
}

pub fn cmd_residual(spec: &SymbolSpec, schedule: &[usize], opts: &OptimizeOptions) -> Result<Outcome, CliError> {
    let phi = spec.resolve()?;
    if !phi.is_disk_selfmap() {
        return Err(CliError::NotSelfMap);
    }
    let rows = conjfinder::discrimination_study(&[(phi.to_string(), phi)], schedule, opts)?;
    let mut text = format!("symbol: {phi}\n{:>6} {:>14} {:>14}\n", "N", "best", "identity");
    for r in &rows {
        text.push_str(&format!("{:>6} {:>14.6e} {:>14.6e}\n", r.truncation, r.best_residual, r.identity_residual));
    }
    let mut report = Report::new("residual", opts.seed);
    report.symbol = Some(SymbolEcho::new(spec, &phi));
    report.class = Some(phi.classify().name().to_string());
    report.residual_study = Some(rows);
    Ok(Outcome { report, code: EXIT_OK, text })
}

/// Family member at grid value `x`: the centre `a = x` for the automorphism
/// families, `x z + (1−x)/2` for dilate-translate, `x z/(1 − (1−x)z/2)` for
/// the maps fixing zero, and the angle `x` for rotations.
pub fn family_member(family: Family, x: f64) -> SymbolSpec {
    let r = |v: f64| Some(Num::Real(round_sig(v)));
    let params = match family {
        Family::Rotation => FamilyParams { theta: Some(x), ..Default::default() },
        Family::Involution | Family::Elliptic3 => FamilyParams { a: r(x), ..Default::default() },
        Family::Elliptic => FamilyParams { a: r(x), p: Some(1), q: Some(5), ..Default::default() },
        Family::DilateTranslate => FamilyParams { s: r(x), t: r((1.0 - x) / 2.0), ..Default::default() },
        Family::BzOver1MinusCz => FamilyParams { b: r(x), c: r((1.0 - x) / 2.0), ..Default::default() },
    };
    SymbolSpec::family(family, params)
}

#[derive(Debug, Serialize)]
struct SweepRow {
    family: &'static str,
    param: f64,
    symbol: String,
    class: String,
    is_cs: String,
    residual: String,
}

pub fn cmd_sweep(
    family: Family,
    grid: &[f64],
    out: &std::path::Path,
    residual_truncation: Option<usize>,
    opts: &OptimizeOptions,
) -> Result<Outcome, CliError> {
    let rows: Vec<SweepRow> = grid
        .par_iter()
        .map(|&x| {
            let spec = family_member(family, x);
            let (class, is_cs, residual) = match spec.resolve() {
                Ok(phi) => match csym::decide(&phi) {
                    Ok(v) => {
                        let res = residual_truncation
                            .and_then(|n| compop::matrix_of_composition(&phi, n).ok())
                            .and_then(|t| conjfinder::optimize(&t, opts).ok())
                            .map(|r| format!("{:e}", round_sig(r.best_residual)))
                            .unwrap_or_default();
                        (v.class.name().to_string(), v.is_cs.to_string(), res)
                    }
                    Err(e) => (e.to_string(), String::new(), String::new()),
                },
                Err(e) => (e.to_string(), String::new(), String::new()),
            };
            SweepRow { family: family.name(), param: round_sig(x), symbol: spec.label(), class, is_cs, residual }
        })
        .collect();
    let io = |source| CliError::Io { path: out.to_path_buf(), source };
    let file = fs::File::create(out).map_err(io)?;
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(file);
    w.write_record(["family", "param", "symbol", "class", "is_cs", "residual"])?;
    for row in &rows {
        w.serialize(row)?;
    }
    w.flush().map_err(io)?;
    let text = format!("wrote {} rows to {}\n", rows.len(), out.display());
    Ok(Outcome { report: Report::new("sweep", opts.seed), code: EXIT_OK, text })
}

#[derive(Debug, Deserialize)]
struct CorpusLine {
    #[serde(flatten)]
    symbol: SymbolSpec,
    #[serde(default)]
    expected_cs: Option<bool>,
    #[serde(default)]
    label: Option<String>,
}

enum LineResult {
    Blank,
    Entry(CorpusEntry),
    Error(String),
}

fn corpus_line(line: usize, text: &str) -> LineResult {
    let text = text.trim();
    if text.is_empty() {
        return LineResult::Blank;
    }
    let parsed: CorpusLine = match serde_json::from_str(text) {
        Ok(p) => p,
        Err(e) => return LineResult::Error(format!("malformed line: {e}")),
    };
    let verdict = parsed.symbol.resolve().and_then(|phi| Ok(csym::decide(&phi)?));
    match verdict {
        Ok(v) => LineResult::Entry(CorpusEntry {
            line,
            label: parsed.label,
            is_cs: v.is_cs,
            expected_cs: parsed.expected_cs,
            class: v.class.name().to_string(),
        }),
        Err(e) => LineResult::Error(e.to_string()),
    }
}

pub fn cmd_corpus(input: &std::path::Path, seed: u64) -> Result<Outcome, CliError> {
    let content = fs::read_to_string(input).map_err(|source| CliError::Io { path: input.to_path_buf(), source })?;
    let lines: Vec<(usize, &str)> = content.lines().enumerate().map(|(i, l)| (i + 1, l)).collect();
    let results: Vec<(usize, LineResult)> = lines.par_iter().map(|&(i, l)| (i, corpus_line(i, l))).collect();

    let mut entries = Vec::new();
    let mut errors = Vec::new();
    for (line, r) in results {
        match r {
            LineResult::Blank => {}
            LineResult::Entry(e) => entries.push(e),
            LineResult::Error(message) => errors.push(CorpusIssue { line, message }),
        }
    }
    let mismatches: Vec<CorpusIssue> = entries
        .iter()
        .filter(|e| e.expected_cs.is_some_and(|x| x != e.is_cs))
        .map(|e| CorpusIssue {
            line: e.line,
            message: format!(
                "{}expected is_cs={} but got {}",
                e.label.as_ref().map(|l| format!("{l}: ")).unwrap_or_default(),
                e.expected_cs.unwrap_or_default(),
                e.is_cs
            ),
        })
        .collect();

    let mut text = format!("{} symbols, {} mismatches, {} errors\n", entries.len(), mismatches.len(), errors.len());
    for m in mismatches.iter().chain(&errors) {
        text.push_str(&format!("line {}: {}\n", m.line, m.message));
    }
    let code = if !errors.is_empty() {
        EXIT_USAGE
    } else if !mismatches.is_empty() {
        EXIT_VERIFY_FAILED
    } else {
        EXIT_OK
    };
    let mut report = Report::new("corpus", seed);
    report.corpus = Some(CorpusSection { total: entries.len(), entries, mismatches, errors });
    Ok(Outcome { report, code, text })
}

fn dispatch(cli: &Cli) -> Result<Outcome, CliError> {
    let opts = |restarts: usize, max_iters: usize| OptimizeOptions { restarts, max_iters, seed: cli.seed, ..Default::default() };
    match &cli.command {
        Command::Classify { symbol } => cmd_classify(&SymbolSpec::parse(symbol)?, cli.seed),
        Command::Verify { suite, a, b, c, truncation, k } => {
            let params = SuiteParams { a: *a, b: *b, c: *c, truncation: *truncation, k: *k };
            cmd_verify((*suite).into(), params, cli.seed)
        }
        Command::Residual { symbol, truncation_schedule, truncation, restarts, max_iters } => {
            let schedule = truncation_schedule.clone().map(|s| s.0).unwrap_or_else(|| vec![*truncation]);
            cmd_residual(&SymbolSpec::parse(symbol)?, &schedule, &opts(*restarts, *max_iters))
        }
        Command::Sweep { family, grid, out, residual_truncation, max_iters } => {
            cmd_sweep(*family, &grid.0, out, *residual_truncation, &opts(OptimizeOptions::default().restarts, *max_iters))
        }
        Command::Corpus { input } => cmd_corpus(input, cli.seed),
    }
}

/// Runs the command line `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = if e.use_stderr() { write!(err, "{e}") } else { write!(out, "{e}") };
            return code;
        }
    };
    match dispatch(&cli) {
        Ok(outcome) => {
            let body = if cli.json { outcome.report.to_stable_json() } else { outcome.text };
            let _ = out.write_all(body.as_bytes());
            outcome.code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn raw_and_named_specs() {
        let raw = SymbolSpec::parse(r#"{"a":[0.5,0],"b":[0.25,0],"c":[0,0],"d":[1,0]}"#).unwrap();
        assert!(matches!(raw, SymbolSpec::Raw { .. }));
        let inv = SymbolSpec::parse(r#"{"family":"involution","a":[0.5,0]}"#).unwrap();
        let phi = inv.resolve().unwrap();
        assert!(phi.compose(&phi).unwrap().is_identity());
        let missing = SymbolSpec::parse(r#"{"family":"elliptic3"}"#).unwrap();
        assert!(matches!(missing.resolve(), Err(CliError::MissingParam { param: "a", .. })));
        assert!(SymbolSpec::parse(r#"{"family":"nope"}"#).is_err());
    }

    #[test]
    fn rounding_keeps_fifteen_digits() {
        assert_eq!(round_sig(0.1 + 0.2), 0.3);
        assert_eq!(round_sig(1.0 / 3.0), 0.333333333333333);
        assert_eq!(round_sig(0.0), 0.0);
    }

    #[test]
    fn grids() {
        assert_eq!(parse_grid("").unwrap(), Vec::<f64>::new());
        assert_eq!(parse_grid("0:1:3").unwrap(), vec![0.0, 0.5, 1.0]);
        assert_eq!(parse_grid("0.1, 0.2").unwrap(), vec![0.1, 0.2]);
        assert!(parse_grid("x").is_err());
    }

    #[test]
    fn complex_arguments() {
        assert_eq!(parse_complex("0.5").unwrap(), Complex64::new(0.5, 0.0));
        assert_eq!(parse_complex("0.5,-0.2").unwrap(), Complex64::new(0.5, -0.2));
        assert!(parse_complex("1,2,3").is_err());
    }
}
