//! Command-line front end: argument parsing, verification suites and reports.
//!
//! Every command produces a [`Report`]; its JSON form has the top-level keys
//! `command`, `config`, `results`, `pass` and `duration_ms`, with each result
//! carrying `name`, `expected`, `computed`, `deviation` and `pass`. Keys are
//! emitted in sorted order.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use qsym_core::diagram::{catalan, image_algebra_dimension};
use qsym_core::fusion::{
    amenability_check, build_irreducibles, dimension_sequence, so3_moment_integral,
    su2_even_embedding_check, trivial_multiplicity, MAX_MOMENT, MIN_QUADRATURE_POINTS,
};
use qsym_core::homs::{end_dimension, gram_report, GramReport};
use qsym_core::tensor::{verify_frobenius, verify_jones_relations, RelationReport};
use qsym_core::{canonical_trace_weights, regular_rep_trace, AlgebraShape};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

pub const DEFAULT_MAX_K: usize = 6;
pub const MAX_L: usize = 3;
pub const MAX_LEVEL: usize = 30;
/// Environment variable that raises the `--k` bound. Runtime and memory grow
/// like `n^k · C_k`, so values above 6 are slow.
pub const MAX_K_ENV: &str = "QSYM_MAX_K";

/// Relative quadrature tolerance, scaled by `max(1, C_k)`.
const QUADRATURE_TOL: f64 = 1e-5;

#[derive(Debug, Parser)]
#[command(name = "qsym", version, about = "Invariants of quantum automorphism groups of finite-dimensional C*-algebras")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub options: Options,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Canonical trace weights against the regular-representation trace.
    Weights,
    /// Frobenius and Jones-projection relations of the structure maps.
    Verify,
    /// Gram ranks of the generators of Hom(0, k) for k = 0..=K.
    Homdim,
    /// Dimensions of End(l) for l = 1..=L, by the represented TL algebra and by bending.
    Enddim,
    /// Fusion moments, dimension function, amenability and the SU(2) even part.
    Fusion,
    /// All suites for one shape in a single report.
    ReportAll,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Weights => "weights",
            Command::Verify => "verify",
            Command::Homdim => "homdim",
            Command::Enddim => "enddim",
            Command::Fusion => "fusion",
            Command::ReportAll => "report-all",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct Options {
    /// Block sizes, e.g. `2,1` or `[2,1]`.
    #[arg(long, global = true)]
    pub shape: Option<String>,
    /// Largest k for homdim.
    #[arg(long, global = true, default_value_t = 5)]
    pub k: usize,
    /// Largest l for enddim.
    #[arg(long, global = true, default_value_t = 2)]
    pub l: usize,
    /// dim B for the fusion suite (defaults to the dimension of --shape).
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// Fusion truncation level.
    #[arg(long, global = true, default_value_t = 12)]
    pub level: usize,
    /// Absolute tolerance for relation checks.
    #[arg(long, global = true, default_value_t = 1e-10)]
    pub tol: f64,
    /// Relative singular-value threshold for ranks.
    #[arg(long = "rank-tol", global = true, default_value_t = 1e-8)]
    pub rank_tol: f64,
    /// Quadrature points for the moment integral.
    #[arg(long, global = true, default_value_t = 100_000)]
    pub quad: usize,
    /// Write the JSON report here (`-` for standard output).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

/// Validated options.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub shape: Option<AlgebraShape>,
    pub shape_spec: Option<String>,
    pub k: usize,
    pub l: usize,
    pub n: Option<usize>,
    pub level: usize,
    pub tol: f64,
    pub rank_tol: f64,
    pub quad: usize,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub max_k: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

fn usage(msg: impl Into<String>) -> UsageError {
    UsageError(msg.into())
}

pub fn max_k_from_env(value: Option<&str>) -> Result<usize, UsageError> {
    match value {
        None => Ok(DEFAULT_MAX_K),
        Some(s) => s
            .trim()
            .parse()
            .map_err(|_| usage(format!("{MAX_K_ENV} must be a non-negative integer, got {s:?}"))),
    }
}

impl RunConfig {
    pub fn from_options(command: Command, o: &Options, max_k: usize) -> Result<Self, UsageError> {
        let shape = match &o.shape {
            Some(spec) => Some(AlgebraShape::parse(spec).map_err(|e| usage(format!("--shape: {e}")))?),
            None => None,
        };
        let needs_shape = !matches!(command, Command::Fusion);
        if needs_shape && shape.is_none() {
            return Err(usage(format!("{} requires --shape", command.name())));
        }
        if command == Command::Fusion && shape.is_none() && o.n.is_none() {
            return Err(usage("fusion requires --n or --shape"));
        }
        if o.k > max_k {
            return Err(usage(format!(
                "--k {} exceeds the maximum {max_k} (raise it with {MAX_K_ENV})",
                o.k
            )));
        }
        if o.l == 0 || o.l > MAX_L {
            return Err(usage(format!("--l must be in 1..={MAX_L}, got {}", o.l)));
        }
        if o.level > MAX_LEVEL {
            return Err(usage(format!("--level must be at most {MAX_LEVEL}, got {}", o.level)));
        }
        if !(o.tol.is_finite() && o.tol > 0.0) {
            return Err(usage(format!("--tol must be positive, got {}", o.tol)));
        }
        if !(o.rank_tol > 0.0 && o.rank_tol < 1.0) {
            return Err(usage(format!("--rank-tol must be in (0, 1), got {}", o.rank_tol)));
        }
        if o.quad < MIN_QUADRATURE_POINTS {
            return Err(usage(format!(
                "--quad must be at least {MIN_QUADRATURE_POINTS}, got {}",
                o.quad
            )));
        }
        if let Some(n) = o.n {
            if n < 4 {
                return Err(usage(format!("--n must be at least 4, got {n}")));
            }
        }
        Ok(Self {
            shape,
            shape_spec: o.shape.clone(),
            k: o.k,
            l: o.l,
            n: o.n,
            level: o.level,
            tol: o.tol,
            rank_tol: o.rank_tol,
            quad: o.quad,
            out: o.out.clone(),
            format: o.format,
            max_k,
        })
    }

    fn shape(&self) -> &AlgebraShape {
        self.shape.as_ref().expect("validated: shape present")
    }

    fn fusion_n(&self) -> Option<usize> {
        self.n.or_else(|| self.shape.as_ref().map(AlgebraShape::total_dim))
    }

    pub fn to_json(&self) -> Value {
        json!({
            "shape": self.shape.as_ref().map(|s| s.blocks().to_vec()),
            "k": self.k,
            "l": self.l,
            "n": self.fusion_n(),
            "level": self.level,
            "tol": self.tol,
            "rank_tol": self.rank_tol,
            "quad": self.quad,
            "max_k": self.max_k,
            "out": self.out.as_ref().map(|p| p.display().to_string()),
            "format": match self.format {
                Format::Text => "text",
                Format::Json => "json",
            },
        })
    }
}

/// One row of a report.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: String,
    pub expected: Value,
    pub computed: Value,
    pub deviation: Option<f64>,
    pub pass: bool,
}

impl CheckResult {
    fn new(name: impl Into<String>, expected: Value, computed: Value, deviation: Option<f64>, pass: bool) -> Self {
        Self {
            name: name.into(),
            expected,
            computed,
            deviation,
            pass,
        }
    }

    fn error(name: impl Into<String>, expected: Value, err: impl std::fmt::Display) -> Self {
        Self::new(name, expected, json!({ "error": err.to_string() }), None, false)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "name": self.name,
            "expected": self.expected,
            "computed": self.computed,
            "deviation": self.deviation,
            "pass": self.pass,
        })
    }
}

#[derive(Debug, Clone)]
pub struct Report {
    pub command: String,
    pub config: Value,
    pub results: Vec<CheckResult>,
    pub duration_ms: u64,
}

impl Report {
    pub fn pass(&self) -> bool {
        self.results.iter().all(|r| r.pass)
    }

    pub fn exit_code(&self) -> i32 {
        if self.pass() {
            EXIT_PASS
        } else {
            EXIT_FAIL
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "command": self.command,
            "config": self.config,
            "results": self.results.iter().map(CheckResult::to_json).collect::<Vec<_>>(),
            "pass": self.pass(),
            "duration_ms": self.duration_ms,
        })
    }

    /// Pretty JSON with sorted keys and a trailing newline.
    pub fn to_json_string(&self) -> String {
        canonical_json(&self.to_json())
    }

    pub fn to_text(&self) -> String {
        let cell = |v: &Value| match v {
            Value::String(s) => s.clone(),
            Value::Null => "-".to_string(),
            other => other.to_string(),
        };
        let rows: Vec<[String; 5]> = self
            .results
            .iter()
            .map(|r| {
                [
                    r.name.clone(),
                    cell(&r.expected),
                    cell(&r.computed),
                    r.deviation.map_or("-".into(), |d| json!(d).to_string()),
                    if r.pass { "ok" } else { "FAIL" }.to_string(),
                ]
            })
            .collect();
        let header = ["check", "expected", "computed", "deviation", "pass"].map(String::from);
        let mut widths = header.clone().map(|h| h.chars().count());
        for row in &rows {
            for (w, c) in widths.iter_mut().zip(row) {
                *w = (*w).max(c.chars().count());
            }
        }
        let line = |row: &[String; 5]| {
            let cells: Vec<String> = row
                .iter()
                .zip(widths)
                .map(|(c, w)| format!("{c}{}", " ".repeat(w - c.chars().count())))
                .collect();
            cells.join("  ").trim_end().to_string()
        };
        let mut out = format!("qsym {}\n", self.command);
        out.push_str(&line(&header));
        out.push('\n');
        for row in &rows {
            out.push_str(&line(row));
            out.push('\n');
        }
        out.push_str(&format!(
            "{} ({} of {} checks passed, {} ms)\n",
            if self.pass() { "PASS" } else { "FAIL" },
            self.results.iter().filter(|r| r.pass).count(),
            self.results.len(),
            self.duration_ms
        ));
        out
    }
}

/// Pretty-printed JSON with sorted object keys and a trailing newline.
pub fn canonical_json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report values are serializable");
    s.push('\n');
    s
}

/// Integers above `u64::MAX` are written as decimal strings.
fn big(x: u128) -> Value {
    u64::try_from(x).map_or_else(|_| Value::String(x.to_string()), Value::from)
}

fn relation_rows(reports: Vec<RelationReport>) -> Vec<CheckResult> {
    reports
        .into_iter()
        .map(|r| {
            CheckResult::new(
                r.name,
                json!(format!("<= {:e}", r.tolerance)),
                json!(r.deviation),
                Some(r.deviation),
                r.pass,
            )
        })
        .collect()
}

pub fn cmd_weights(cfg: &RunConfig) -> Vec<CheckResult> {
    let shape = cfg.shape();
    let canonical = canonical_trace_weights(shape);
    let regular = regular_rep_trace(shape);
    let mut rows: Vec<CheckResult> = canonical
        .as_slice()
        .iter()
        .zip(regular.as_slice())
        .zip(shape.blocks())
        .enumerate()
        .map(|(g, ((c, r), m))| {
            CheckResult::new(
                format!("weight block {} (m = {m})", g + 1),
                json!(c.to_string()),
                json!(r.to_string()),
                None,
                c == r,
            )
        })
        .collect();
    let total = canonical.as_slice().iter().copied().sum::<num_rational::Rational64>();
    rows.push(CheckResult::new(
        "sum of weights",
        json!("1"),
        json!(total.to_string()),
        None,
        total == 1.into(),
    ));
    rows
}

pub fn cmd_verify(cfg: &RunConfig) -> Vec<CheckResult> {
    let shape = cfg.shape();
    let mut rows = relation_rows(verify_frobenius(shape, cfg.tol));
    rows.extend(relation_rows(verify_jones_relations(shape, cfg.tol)));
    rows
}

fn gram_row(name: String, expected: u128, r: &GramReport) -> CheckResult {
    let computed = if r.rank_stable {
        json!(r.rank)
    } else {
        json!({ "ranks": r.ranks, "tolerances": r.tolerances, "stable": false })
    };
    let deviation = (r.rank as f64 - expected as f64).abs();
    CheckResult::new(
        name,
        big(expected),
        computed,
        Some(deviation),
        r.rank_stable && r.rank as u128 == expected,
    )
}

pub fn cmd_homdim(cfg: &RunConfig) -> Vec<CheckResult> {
    let shape = cfg.shape();
    (0..=cfg.k)
        .map(|k| gram_row(format!("dim Hom(0,{k})"), catalan(k), &gram_report(shape, k, cfg.rank_tol)))
        .collect()
}

pub fn cmd_enddim(cfg: &RunConfig) -> Vec<CheckResult> {
    let shape = cfg.shape();
    let mut rows = Vec::new();
    for l in 1..=cfg.l {
        let expected = catalan(2 * l);
        let name = format!("dim TL image on B^{l}");
        rows.push(match image_algebra_dimension(shape, l, cfg.rank_tol) {
            Ok(d) => CheckResult::new(
                name,
                big(expected),
                json!(d),
                Some((d as f64 - expected as f64).abs()),
                d as u128 == expected,
            ),
            Err(e) => CheckResult::error(name, big(expected), e),
        });
        let name = format!("dim End({l}) by bending");
        rows.push(match end_dimension(shape, l, cfg.rank_tol) {
            Ok(r) => gram_row(name, expected, &r),
            Err(e) => CheckResult::error(name, big(expected), e),
        });
    }
    rows
}

pub fn cmd_fusion(cfg: &RunConfig) -> Vec<CheckResult> {
    let mut rows = Vec::new();
    for k in 0..=cfg.level {
        let c = catalan(k);
        let name = format!("trivial multiplicity k={k}");
        rows.push(match trivial_multiplicity(k) {
            Ok(m) => CheckResult::new(name, big(c), big(m), Some(m.abs_diff(c) as f64), m == c),
            Err(e) => CheckResult::error(name, big(c), e),
        });
        if k <= MAX_MOMENT {
            let name = format!("moment integral k={k}");
            rows.push(match so3_moment_integral(k, cfg.quad) {
                Ok(q) => {
                    let dev = (q - c as f64).abs();
                    CheckResult::new(name, big(c), json!(q), Some(dev), dev <= QUADRATURE_TOL * (c as f64).max(1.0))
                }
                Err(e) => CheckResult::error(name, big(c), e),
            });
        }
    }

    let n = cfg.fusion_n().expect("validated: n or shape present");
    let name = format!("dimension function n={n}");
    rows.push(match (dimension_sequence(n, cfg.level), build_irreducibles(n, cfg.level)) {
        (Ok(d), Ok(irr)) => {
            let built: Vec<u128> = irr.iter().map(|i| i.dimension).collect();
            let seq: Vec<Value> = d.as_slice().iter().map(|&x| big(x)).collect();
            let from_irr: Vec<Value> = built.iter().map(|&x| big(x)).collect();
            CheckResult::new(name, json!(seq), json!(from_irr), None, built == d.as_slice())
        }
        (Err(e), _) | (_, Err(e)) => CheckResult::error(name, Value::Null, e),
    });

    let name = format!("amenability n={n}");
    let expected = json!({ "amenable": n == 4 });
    rows.push(match amenability_check(n, cfg.level) {
        Ok(v) => {
            let witness = v.witness.map(|w| {
                json!({ "k": w.k, "dimension": big(w.dimension), "classical": big(w.classical) })
            });
            CheckResult::new(
                name,
                expected,
                json!({ "amenable": v.amenable, "witness": witness }),
                None,
                v.amenable == (n == 4),
            )
        }
        Err(e) => CheckResult::error(name, expected, e),
    });

    let name = "SU(2) even-part embedding";
    rows.push(match su2_even_embedding_check(cfg.level.max(2)) {
        Ok(ok) => CheckResult::new(name, json!(true), json!(ok), None, ok),
        Err(e) => CheckResult::error(name, json!(true), e),
    });
    rows
}

fn prefixed(prefix: &str, rows: Vec<CheckResult>) -> Vec<CheckResult> {
    rows.into_iter()
        .map(|mut r| {
            r.name = format!("{prefix}: {}", r.name);
            r
        })
        .collect()
}

pub fn cmd_report_all(cfg: &RunConfig) -> Vec<CheckResult> {
    let mut rows = prefixed("weights", cmd_weights(cfg));
    rows.extend(prefixed("verify", cmd_verify(cfg)));
    rows.extend(prefixed("homdim", cmd_homdim(cfg)));
    rows.extend(prefixed("enddim", cmd_enddim(cfg)));
    if cfg.fusion_n().is_some_and(|n| n >= 4) {
        rows.extend(prefixed("fusion", cmd_fusion(cfg)));
    } else {
        rows.push(CheckResult::error(
            "fusion",
            Value::Null,
            "the dimension function needs n >= 4",
        ));
    }
    rows
}

pub fn run_command(command: Command, cfg: &RunConfig) -> Report {
    let start = Instant::now();
    let results = match command {
        Command::Weights => cmd_weights(cfg),
        Command::Verify => cmd_verify(cfg),
        Command::Homdim => cmd_homdim(cfg),
        Command::Enddim => cmd_enddim(cfg),
        Command::Fusion => cmd_fusion(cfg),
        Command::ReportAll => cmd_report_all(cfg),
    };
    Report {
        command: command.name().to_string(),
        config: cfg.to_json(),
        results,
        duration_ms: start.elapsed().as_millis() as u64,
    }
}

/// Parses `args`, runs the command and writes output. Returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(stderr, "{text}")
            } else {
                write!(stdout, "{text}")
            };
            return code;
        }
    };
    let max_k = match max_k_from_env(std::env::var(MAX_K_ENV).ok().as_deref()) {
        Ok(m) => m,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return EXIT_USAGE;
        }
    };
    let cfg = match RunConfig::from_options(cli.command, &cli.options, max_k) {
        Ok(cfg) => cfg,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return EXIT_USAGE;
        }
    };
    let report = run_command(cli.command, &cfg);
    let json = report.to_json_string();
    let to_stdout = matches!(&cfg.out, Some(p) if p.as_os_str() == "-");
    if let Some(path) = cfg.out.as_ref().filter(|_| !to_stdout) {
        if let Err(e) = std::fs::write(path, &json) {
            let _ = writeln!(stderr, "error: cannot write {}: {e}", path.display());
            return EXIT_USAGE;
        }
    }
    let _ = if to_stdout || cfg.format == Format::Json {
        write!(stdout, "{json}")
    } else {
        write!(stdout, "{}", report.to_text())
    };
    report.exit_code()
}
