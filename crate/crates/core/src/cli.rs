//! Job configs, command implementations and verification suites behind the
//! `twomm` binary.
//!
//! Every command takes a [`JobConfig`] (from `--config`, then overridden by
//! flags) and returns an [`Outcome`] carrying the exit status and the text
//! to print. Exit codes: 0 success, 2 config error, 3 numeric
//! non-convergence, 4 verification failure.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::engines::{
    andreief_for, andreief_z, coupling_kernel_check, direct_z, double_series_z, exact_z, permutation_z,
    quadruple_series_z, radial_series_z, relative_difference, tau_from_andreief, tau_from_series, CoefficientTable,
    SeriesOptions, ZResult,
};
use crate::error::{Error, Result};
use crate::fermion::{
    formal_times, schur_product_vev, single_component_check, vandermonde_closed_form, vandermonde_vev,
    wick_determinant_check, IdentityCheck, Variant,
};
use crate::measures::{
    bimoment_window, exact_window, BimomentWindow, DeformationParams, MeasureSpec, QuadratureSpec, RSequence, Rect,
};
use crate::partitions::{enumerate, partitions_of, Partition};
use crate::poly::Var;
use crate::report::fmt_f64;
use crate::scalar::q;
use crate::schur::{
    cauchy_truncated, lr_expand, power_sum_times, schur_bialternant, schur_in_times, transpose_sign_check, TimeSequence,
};

// ---------------------------------------------------------------------------
// configuration

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Rational,
    #[default]
    Float,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Engine {
    Direct,
    Permutation,
    Andreief,
    DoubleSeries(Variant),
    QuadrupleSeries,
    RadialSeries,
}

impl Engine {
    pub fn parse(s: &str) -> Result<Engine> {
        Ok(match s {
            "direct" => Engine::Direct,
            "permutation" => Engine::Permutation,
            "andreief" => Engine::Andreief,
            "quadruple_series" | "quadruple" => Engine::QuadrupleSeries,
            "radial_series" | "radial" => Engine::RadialSeries,
            _ => {
                let tag = s
                    .strip_prefix("double_series")
                    .or_else(|| s.strip_prefix("series"))
                    .unwrap_or(s);
                match Variant::parse(tag) {
                    Some(v) => Engine::DoubleSeries(v),
                    None => return Err(Error::Config(format!("unknown engine {s:?}"))),
                }
            }
        })
    }

    pub fn name(&self) -> String {
        match self {
            Engine::Direct => "direct".into(),
            Engine::Permutation => "permutation".into(),
            Engine::Andreief => "andreief".into(),
            Engine::DoubleSeries(v) => format!("double_series{}", v.tag()),
            Engine::QuadrupleSeries => "quadruple_series".into(),
            Engine::RadialSeries => "radial_series".into(),
        }
    }

    pub fn is_series(&self) -> bool {
        matches!(
            self,
            Engine::DoubleSeries(_) | Engine::QuadrupleSeries | Engine::RadialSeries
        )
    }
}

fn default_engine() -> String {
    "andreief".into()
}

fn default_size() -> i64 {
    1
}

fn default_trunc() -> usize {
    8
}

/// One self-describing job.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    pub measure: MeasureSpec,
    #[serde(default)]
    pub deform: DeformationParams,
    #[serde(default = "default_engine")]
    pub engine: String,
    #[serde(rename = "N", default = "default_size")]
    pub size: i64,
    /// Series truncation: every partition weight is at most `d`.
    #[serde(default = "default_trunc")]
    pub d: usize,
    /// Series tolerance on the outer shell; unset means report only.
    #[serde(default)]
    pub tol: Option<f64>,
    #[serde(default)]
    pub quadrature: QuadratureSpec,
    #[serde(default)]
    pub mode: Mode,
    #[serde(default)]
    pub format: Format,
    #[serde(default)]
    pub out: Option<PathBuf>,
    /// Precomputed bimoment window for the determinant engines.
    #[serde(default)]
    pub window: Option<PathBuf>,
    /// Rectangle for `bimoments`.
    #[serde(default)]
    pub rect: Option<Rect>,
}

impl JobConfig {
    pub fn new(measure: MeasureSpec) -> Self {
        JobConfig {
            measure,
            deform: DeformationParams::none(),
            engine: default_engine(),
            size: 1,
            d: default_trunc(),
            tol: None,
            quadrature: QuadratureSpec::default(),
            mode: Mode::Float,
            format: Format::Json,
            out: None,
            window: None,
            rect: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn engine(&self) -> Result<Engine> {
        Engine::parse(&self.engine)
    }

    /// Engine/measure compatibility, checked before any computation.
    pub fn validate(&self) -> Result<()> {
        let engine = self.engine()?;
        let circle = matches!(self.measure, MeasureSpec::CircleProduct { .. });
        let tbar = !self.deform.tbar1.is_zero() || !self.deform.tbar2.is_zero();
        match engine {
            Engine::RadialSeries if !matches!(self.measure, MeasureSpec::RadialPlanar { .. }) => {
                return Err(Error::Config("radial_series needs a radial_planar measure".into()));
            }
            Engine::QuadrupleSeries if tbar && !circle => {
                return Err(Error::NegativeIndexUnsupported(-1, -1));
            }
            Engine::Direct if self.size > 2 => return Err(Error::NUnsupported(self.size)),
            _ => {}
        }
        if self.mode == Mode::Rational {
            if !matches!(engine, Engine::Andreief | Engine::Permutation) {
                return Err(Error::Config(format!("{} has no rational mode", engine.name())));
            }
            if self.deform.has_times() {
                return Err(Error::Config("rational mode needs an undeformed measure".into()));
            }
        }
        self.measure.validate(&self.deform)
    }
}

// ---------------------------------------------------------------------------
// command line

#[derive(Debug, Parser)]
#[command(
    name = "twomm",
    version,
    about = "Deformed two-matrix integrals and their Schur expansions"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Debug, Default, Args)]
pub struct Flags {
    /// JSON job config; flags override its fields.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub engine: Option<String>,
    #[arg(long = "N", global = true, allow_negative_numbers = true)]
    pub size: Option<i64>,
    #[arg(long = "n", global = true, allow_negative_numbers = true)]
    pub n: Option<i64>,
    #[arg(long = "m", global = true, allow_negative_numbers = true)]
    pub m: Option<i64>,
    /// Series truncation or verification degree budget.
    #[arg(long, global = true)]
    pub trunc: Option<usize>,
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true, value_enum)]
    pub mode: Option<Mode>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate Z_N with one engine.
    Zn,
    /// Evaluate a series engine and emit its coefficient table.
    Series,
    /// Emit a bimoment window.
    Bimoments {
        /// `I_LO,I_HI,K_LO,K_HI`, inclusive.
        #[arg(long, value_parser = parse_rect, allow_hyphen_values = true)]
        rect: Option<Rect>,
    },
    /// Print fermionic vacuum expectation values next to their Schur forms.
    FermionVev {
        /// `++`, `--`, `+-`, `-+`, or `single1` … `single4`.
        #[arg(long, default_value = "++", allow_hyphen_values = true)]
        identity: String,
        #[arg(long, default_value = "()")]
        lambda: Partition,
        #[arg(long, default_value = "()")]
        mu: Partition,
    },
    /// Run an invariant suite.
    Verify {
        #[arg(value_enum, default_value = "all")]
        suite: Suite,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Schur,
    Fermion,
    Engines,
    All,
}

pub fn parse_rect(s: &str) -> std::result::Result<Rect, String> {
    let v: Vec<i64> = s
        .split(',')
        .map(|p| p.trim().parse::<i64>().map_err(|e| format!("{p:?}: {e}")))
        .collect::<std::result::Result<_, _>>()?;
    match v[..] {
        [a, b, c, d] if a <= b && c <= d => Ok(Rect::new(a, b, c, d)),
        _ => Err("expected I_LO,I_HI,K_LO,K_HI with lo ≤ hi".into()),
    }
}

impl Flags {
    /// Config file (if any) with flag overrides applied.
    pub fn job(&self, fallback: impl FnOnce() -> Option<JobConfig>) -> Result<JobConfig> {
        let mut job = match &self.config {
            Some(p) => JobConfig::load(p)?,
            None => fallback().ok_or_else(|| Error::Config("--config is required".into()))?,
        };
        if let Some(e) = &self.engine {
            job.engine = e.clone();
        }
        if let Some(v) = self.size {
            job.size = v;
        }
        if let Some(v) = self.n {
            job.deform.n = v;
        }
        if let Some(v) = self.m {
            job.deform.m = v;
        }
        if let Some(v) = self.trunc {
            job.d = v;
        }
        if let Some(v) = self.tol {
            job.tol = Some(v);
        }
        if let Some(v) = self.mode {
            job.mode = v;
        }
        if let Some(v) = &self.out {
            job.out = Some(v.clone());
        }
        if let Some(v) = self.format {
            job.format = v;
        }
        Ok(job)
    }
}

// ---------------------------------------------------------------------------
// outcomes

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;
pub const EXIT_VERIFY: i32 = 4;

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::QuadratureNotConverged { .. } | Error::TruncationNotConverged { .. } | Error::Divergent(_) => {
            EXIT_NUMERIC
        }
        _ => EXIT_CONFIG,
    }
}

/// Machine-readable error object.
pub fn error_object(e: &Error) -> Value {
    json!({ "error": e.tag(), "message": e.to_string() })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome { code: EXIT_OK, stdout }
    }

    pub fn from_error(e: &Error) -> Self {
        Outcome {
            code: exit_code(e),
            stdout: error_object(e).to_string() + "\n",
        }
    }
}

/// Parses `args` and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                return Outcome::ok(e.to_string());
            }
            return Outcome::from_error(&Error::Config(e.to_string()));
        }
    };
    dispatch(&cli)
}

pub fn dispatch(cli: &Cli) -> Outcome {
    let result = match &cli.command {
        Command::Zn => cli.flags.job(|| None).and_then(|j| cmd_zn(&j)),
        Command::Series => cli.flags.job(|| None).and_then(|j| cmd_series(&j)),
        Command::Bimoments { rect } => cli.flags.job(|| None).and_then(|mut j| {
            if rect.is_some() {
                j.rect = *rect;
            }
            cmd_bimoments(&j)
        }),
        Command::FermionVev { identity, lambda, mu } => cmd_fermion_vev(
            identity,
            cli.flags.size.unwrap_or(1),
            lambda,
            mu,
            cli.flags.format.unwrap_or_default(),
        ),
        Command::Verify { suite } => Ok(cmd_verify(
            *suite,
            &Budget::from_flags(&cli.flags),
            cli.flags.format.unwrap_or_default(),
        )),
    };
    result.unwrap_or_else(|e| Outcome::from_error(&e))
}

fn emit(job: &JobConfig, body: &str, summary: String) -> Result<Outcome> {
    match &job.out {
        Some(p) => {
            std::fs::write(p, body)?;
            Ok(Outcome::ok(summary + "\n"))
        }
        None => Ok(Outcome::ok(body.to_string())),
    }
}

fn summary(z: &ZResult) -> String {
    let mut s = format!(
        "{} N={} n={} m={} value={} {}i",
        z.engine,
        z.size,
        z.n,
        z.m,
        fmt_f64(z.value.re),
        fmt_f64(z.value.im)
    );
    if let Some(e) = z.error_estimate {
        let _ = write!(s, " error_estimate={}", fmt_f64(e));
    }
    if let Some(x) = &z.exact {
        let _ = write!(s, " exact=({})^{}*{}", x.prefactor, x.power, x.rational);
    }
    s
}

pub fn zresult_csv(z: &ZResult) -> String {
    let opt = |x: Option<f64>| x.map(fmt_f64).unwrap_or_default();
    let exact = z
        .exact
        .as_ref()
        .map(|x| format!("({})^{}*{}", x.prefactor, x.power, x.rational))
        .unwrap_or_default();
    format!(
        "engine,N,n,m,re,im,deformation,truncation,error_estimate,exact\n{},{},{},{},{},{},{},{},{},{}\n",
        z.engine,
        z.size,
        z.n,
        z.m,
        fmt_f64(z.value.re),
        fmt_f64(z.value.im),
        z.deformation,
        z.truncation.map(|t| t.to_string()).unwrap_or_default(),
        opt(z.error_estimate),
        exact
    )
}

fn render_z(z: &ZResult, format: Format) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(z).expect("serializable") + "\n",
        Format::Csv => zresult_csv(z),
    }
}

fn render_table(t: &CoefficientTable, format: Format) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(&t.series.to_json()).expect("serializable") + "\n",
        Format::Csv => t.series.to_csv(),
    }
}

/// Evaluates the configured engine.
pub fn evaluate(job: &JobConfig) -> Result<(ZResult, Option<CoefficientTable>)> {
    job.validate()?;
    let engine = job.engine()?;
    let d = &job.deform;
    let opts = SeriesOptions {
        truncation: job.d,
        tol: job.tol,
    };
    if job.mode == Mode::Rational {
        let size = job.size.max(1);
        let w = exact_window(&job.measure, Rect::new(d.n, d.n + size - 1, d.m, d.m + size - 1))?;
        return Ok((exact_z(&engine.name(), &w, job.size, d.n, d.m)?, None));
    }
    let loaded = match &job.window {
        Some(p) => Some(BimomentWindow::load(p)?),
        None => None,
    };
    let window = |size: i64| -> Result<BimomentWindow> {
        if let Some(w) = &loaded {
            if w.measure != job.measure || w.deformation != d.times_only() {
                return Err(Error::Config(
                    "window file belongs to another measure or deformation".into(),
                ));
            }
            return Ok(w.clone());
        }
        let s = size.max(1);
        bimoment_window(
            &job.measure,
            Rect::new(d.n, d.n + s - 1, d.m, d.m + s - 1),
            d,
            &job.quadrature,
        )
    };
    Ok(match engine {
        Engine::Direct => (direct_z(&job.measure, d, job.size, &job.quadrature)?, None),
        Engine::Permutation => (permutation_z(&window(job.size)?, job.size, d.n, d.m)?, None),
        Engine::Andreief => (andreief_z(&window(job.size)?, job.size, d.n, d.m)?, None),
        Engine::DoubleSeries(v) => {
            let (z, t) = double_series_z(v, &job.measure, d, job.size, &opts, &job.quadrature)?;
            (z, Some(t))
        }
        Engine::QuadrupleSeries => {
            let (z, t) = quadruple_series_z(&job.measure, d, job.size, &opts, &job.quadrature)?;
            (z, Some(t))
        }
        Engine::RadialSeries => {
            let MeasureSpec::RadialPlanar { potential } = &job.measure else {
                unreachable!("validated")
            };
            (radial_series_z(potential, d, job.size, &opts)?, None)
        }
    })
}

/// Sibling path for a coefficient table next to the main output.
fn table_path(out: &Path, format: Format) -> PathBuf {
    let ext = match format {
        Format::Json => "table.json",
        Format::Csv => "table.csv",
    };
    out.with_extension(ext)
}

pub fn cmd_zn(job: &JobConfig) -> Result<Outcome> {
    let (z, table) = evaluate(job)?;
    if let (Some(out), Some(t)) = (&job.out, &table) {
        std::fs::write(table_path(out, job.format), render_table(t, job.format))?;
    }
    emit(job, &render_z(&z, job.format), summary(&z))
}

pub fn cmd_series(job: &JobConfig) -> Result<Outcome> {
    let mut job = job.clone();
    if !job.engine()?.is_series() {
        job.engine = Engine::DoubleSeries(Variant::PlusPlus).name();
    }
    let (z, table) = evaluate(&job)?;
    let body = match table {
        Some(t) => render_table(&t, job.format),
        None => render_z(&z, job.format),
    };
    emit(&job, &body, summary(&z))
}

pub fn cmd_bimoments(job: &JobConfig) -> Result<Outcome> {
    let rect = job
        .rect
        .ok_or_else(|| Error::Config("bimoments needs a rectangle (--rect)".into()))?;
    if job.mode == Mode::Rational {
        let w = exact_window(&job.measure, rect)?;
        let values: Vec<Vec<String>> = (rect.i_lo..=rect.i_hi)
            .map(|i| {
                (rect.k_lo..=rect.k_hi)
                    .map(|k| w.get(i, k).map(|v| v.to_string()))
                    .collect()
            })
            .collect::<Result<_>>()?;
        let body = serde_json::to_string_pretty(&json!({
            "rect": rect,
            "measure": job.measure,
            "prefactor": w.prefactor,
            "values": values,
        }))
        .expect("serializable")
            + "\n";
        return emit(
            job,
            &body,
            format!(
                "exact window {}x{} prefactor {}",
                rect.rows(),
                rect.cols(),
                w.prefactor.symbol
            ),
        );
    }
    let w = bimoment_window(&job.measure, rect, &job.deform, &job.quadrature)?;
    let line = format!(
        "window {}x{} error_estimate={}",
        rect.rows(),
        rect.cols(),
        fmt_f64(w.error_estimate())
    );
    emit(job, &(w.to_json_string() + "\n"), line)
}

pub fn cmd_fermion_vev(
    identity: &str,
    size: i64,
    lambda: &Partition,
    mu: &Partition,
    format: Format,
) -> Result<Outcome> {
    if size < 0 {
        return Err(Error::Config(format!("N = {size} must be non-negative")));
    }
    let check = match identity.strip_prefix("single") {
        Some(w) => {
            let which: u8 = w
                .parse()
                .map_err(|_| Error::Config(format!("unknown identity {identity:?}")))?;
            single_component_check(which, lambda, size as usize)?
        }
        None => {
            let v = Variant::parse(identity).ok_or_else(|| Error::Config(format!("unknown identity {identity:?}")))?;
            schur_product_vev(v, size as usize, lambda, mu)?
        }
    };
    let holds = check.holds();
    let body = match format {
        Format::Json => {
            json!({
                "label": check.label,
                "vev": check.oracle.to_string(),
                "schur": check.expected.to_string(),
                "holds": holds,
            })
            .to_string()
                + "\n"
        }
        Format::Csv => format!(
            "label,vev,schur,holds\n\"{}\",\"{}\",\"{}\",{}\n",
            check.label, check.oracle, check.expected, holds
        ),
    };
    Ok(Outcome {
        code: if holds { EXIT_OK } else { EXIT_VERIFY },
        stdout: body,
    })
}

// ---------------------------------------------------------------------------
// verification suites

/// Size and degree limits for [`cmd_verify`].
#[derive(Clone, Debug)]
pub struct Budget {
    /// Degree for the schur suite; partition weight for the fermion suite.
    pub degree: Option<usize>,
    pub size: Option<usize>,
}

impl Budget {
    fn from_flags(f: &Flags) -> Self {
        Budget {
            degree: f.trunc,
            size: f.size.map(|s| s.max(0) as usize),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub suite: &'static str,
    pub label: String,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    fn new(suite: &'static str, label: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        Check {
            suite,
            label: label.into(),
            pass,
            detail: detail.into(),
        }
    }

    fn from_result(suite: &'static str, label: impl Into<String>, r: Result<(bool, String)>) -> Self {
        match r {
            Ok((pass, detail)) => Check::new(suite, label, pass, detail),
            Err(e) => Check::new(suite, label, false, format!("{}: {e}", e.tag())),
        }
    }
}

/// Rational variables used by the exact schur checks.
fn sample_rationals(n: usize) -> Vec<BigRational> {
    [q(1, 2), q(-2, 3), q(3, 5), q(5, 7), q(-7, 4), q(2, 9)]
        .into_iter()
        .take(n)
        .collect()
}

fn exact_times(d: usize, seed: i64) -> TimeSequence<BigRational> {
    TimeSequence::new(
        (1..=d as i64)
            .map(|k| q(seed * k + 1 - 2 * (k % 2), k + seed))
            .collect(),
    )
}

/// Number of semistandard tableaux of `shape` with content `content`,
/// peeling off the largest letter as a horizontal strip.
fn kostka(shape: &[usize], content: &[usize]) -> u64 {
    let Some((&last, rest)) = content.split_last() else {
        return u64::from(shape.iter().all(|&p| p == 0));
    };
    let mut total = 0;
    let mut inner = shape.to_vec();
    fn strips(shape: &[usize], row: usize, left: usize, inner: &mut Vec<usize>, rest: &[usize], total: &mut u64) {
        if row == shape.len() {
            if left == 0 {
                *total += kostka(inner, rest);
            }
            return;
        }
        let floor = shape.get(row + 1).copied().unwrap_or(0);
        for take in 0..=(shape[row] - floor).min(left) {
            inner[row] = shape[row] - take;
            strips(shape, row + 1, left - take, inner, rest, total);
        }
        inner[row] = shape[row];
    }
    strips(shape, 0, last, &mut inner, rest, &mut total);
    total
}

/// Compositions of `w` bounded entrywise by `cap`.
fn bounded_compositions(cap: &[usize], w: usize) -> Vec<Vec<usize>> {
    if cap.is_empty() {
        return if w == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 0..=cap[0].min(w) {
        for mut tail in bounded_compositions(&cap[1..], w - first) {
            tail.insert(0, first);
            out.push(tail);
        }
    }
    out
}

/// Littlewood–Richardson coefficients through monomial expansions and the
/// unitriangular Kostka matrix, independent of the tableau-rule code.
pub fn lr_brute_force(lambda: &Partition, mu: &Partition) -> BTreeMap<Partition, u64> {
    let w = lambda.weight() + mu.weight();
    let len = lambda.len() + mu.len();
    // partitions of w with at most len parts, lexicographically decreasing
    let mut shapes: Vec<Partition> = partitions_of(w, len);
    shapes.sort_by(|a, b| b.parts().cmp(a.parts()));
    let padded = |p: &Partition| (0..len).map(|i| p.part(i)).collect::<Vec<_>>();
    let coeff_of = |nu: &Partition| -> i64 {
        let cap = padded(nu);
        let mut s = 0i64;
        for beta in bounded_compositions(&cap, lambda.weight()) {
            let gamma: Vec<usize> = cap.iter().zip(&beta).map(|(a, b)| a - b).collect();
            s += (kostka(lambda.parts(), &beta) * kostka(mu.parts(), &gamma)) as i64;
        }
        s
    };
    let mut c: BTreeMap<Partition, u64> = BTreeMap::new();
    for rho in &shapes {
        let mut v = coeff_of(rho);
        for (sigma, cs) in &c {
            v -= *cs as i64 * kostka(sigma.parts(), &padded(rho)) as i64;
        }
        assert!(v >= 0, "negative multiplicity for {rho}");
        if v > 0 {
            c.insert(rho.clone(), v as u64);
        }
    }
    c
}

pub fn schur_suite(d: usize, max_vars: usize) -> Vec<Check> {
    const S: &str = "schur";
    let mut out = Vec::new();
    for k in 0..=d {
        let (a, b) = cauchy_truncated(&exact_times(k, 1), &exact_times(k, 2), k);
        out.push(Check::new(
            S,
            format!("Cauchy–Littlewood kernel, rational times, d={k}"),
            a == b,
            format!("{a}"),
        ));
        let (a, b) = cauchy_truncated(&formal_times(Var::T1, k), &formal_times(Var::T2, k), k);
        out.push(Check::new(
            S,
            format!("Cauchy–Littlewood kernel, formal times, d={k}"),
            a == b,
            format!("{} terms", a.num_terms()),
        ));
    }
    let lambdas: Vec<Partition> = enumerate(d, d).collect();
    let bial: Vec<Check> = (1..=max_vars)
        .into_par_iter()
        .flat_map_iter(|n| {
            let x = sample_rationals(n);
            let t = power_sum_times(&x, d, false).expect("rational power sums");
            lambdas
                .iter()
                .filter(|l| l.len() <= n)
                .map(|l| {
                    let r = schur_bialternant(l, &x).map(|b| {
                        let jt = schur_in_times(l, &t);
                        (b == jt, format!("{b}"))
                    });
                    Check::from_result(S, format!("bialternant = Jacobi–Trudy, λ={l}, {n} variables"), r)
                })
                .collect::<Vec<_>>()
        })
        .collect();
    out.extend(bial);
    let t = formal_times(Var::T1, d);
    for l in &lambdas {
        out.push(Check::new(
            S,
            format!("transpose sign, λ={l}"),
            transpose_sign_check(l, &t),
            "",
        ));
    }
    let lr_max = d + 2;
    let pairs: Vec<(Partition, Partition)> = enumerate(lr_max, lr_max)
        .flat_map(|l| enumerate(lr_max - l.weight(), lr_max).map(move |m| (l.clone(), m)))
        .collect();
    let lr: Vec<Check> = pairs
        .par_iter()
        .map(|(l, m)| {
            let rule: BTreeMap<Partition, u64> = (*lr_expand(l, m)).clone();
            let brute = lr_brute_force(l, m);
            Check::new(
                S,
                format!("Littlewood–Richardson vs brute force, λ={l} μ={m}"),
                rule == brute,
                format!("{} terms", rule.len()),
            )
        })
        .collect();
    out.extend(lr);
    let c = crate::schur::lr_coefficient(
        &Partition::new(vec![2, 1]),
        &Partition::new(vec![2, 1]),
        &Partition::new(vec![3, 2, 1]),
    );
    out.push(Check::new(S, "c^(3,2,1)_(2,1),(2,1) = 2", c == 2, c.to_string()));
    out
}

fn identity_check(c: Result<IdentityCheck>, suite: &'static str, label: String) -> Check {
    Check::from_result(suite, label, c.map(|c| (c.holds(), c.label)))
}

pub fn fermion_suite(max_n: usize, max_weight: usize) -> Vec<Check> {
    const S: &str = "fermion";
    let mut jobs: Vec<(Option<Variant>, u8, usize, Partition, Partition)> = Vec::new();
    for n in 1..=max_n {
        for l in enumerate(max_weight, n) {
            for which in 1..=4u8 {
                jobs.push((None, which, n, l.clone(), Partition::empty()));
            }
            for m in enumerate(max_weight, n) {
                for v in Variant::ALL {
                    jobs.push((Some(v), 0, n, l.clone(), m.clone()));
                }
            }
        }
    }
    let mut out: Vec<Check> = jobs
        .par_iter()
        .map(|(v, which, n, l, m)| match v {
            None => identity_check(
                single_component_check(*which, l, *n),
                S,
                format!("single-component Schur vev {which}, N={n}, λ={l}"),
            ),
            Some(v) => identity_check(
                schur_product_vev(*v, *n, l, m),
                S,
                format!("two-component Schur product vev {}, N={n}, λ={l}, μ={m}", v.tag()),
            ),
        })
        .collect();
    let xs = [q(1, 2), q(-1, 3), q(2, 5)];
    let ys = [q(3, 4), q(1, 7), q(-2, 3)];
    for n in 1..=max_n.min(3) {
        for a in 0..=2 {
            for b in 0..=2 {
                let r = vandermonde_vev(&xs[..n], &ys[..n], a, b).map(|v| {
                    let c = vandermonde_closed_form(&xs[..n], &ys[..n], a, b);
                    (v == c, v.to_string())
                });
                out.push(Check::from_result(
                    S,
                    format!("Vandermonde vev, N={n}, n={a}, m={b}"),
                    r,
                ));
            }
        }
    }
    let w = vec![vec![(0, q(1, 1)), (2, q(1, 2))], vec![(1, q(-1, 3)), (-1, q(2, 1))]];
    let wb = vec![vec![(-1, q(1, 1)), (1, q(3, 2))], vec![(0, q(1, 1)), (-2, q(1, 5))]];
    out.push(Check::from_result(
        S,
        "Wick determinant for linear fermions",
        wick_determinant_check(&w, &wb).map(|(a, b)| (a == b, a.to_string())),
    ));
    out
}

fn close(a: Complex64, b: Complex64, tol: f64) -> (bool, String) {
    let e = relative_difference(a, b);
    (e <= tol, format!("rel {}", fmt_f64(e)))
}

fn c64(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

pub fn engines_suite(max_n: i64) -> Vec<Check> {
    const S: &str = "engines";
    let quad = QuadratureSpec::default();
    let none = DeformationParams::none();
    let mut out = Vec::new();
    let g = MeasureSpec::gaussian(0.5);
    let pi = std::f64::consts::PI;
    let closed = [
        c64(1.0),
        c64(2.0 * pi / 0.75f64.sqrt()),
        c64(8.0 * pi * pi * 0.5 / (0.75 * 0.75)),
    ];
    for size in 1..=max_n.min(2) {
        let r = (|| {
            let d = direct_z(&g, &none, size, &quad)?;
            Ok(close(d.value, closed[size as usize], 1e-8))
        })();
        out.push(Check::from_result(
            S,
            format!("gaussian direct quadrature vs closed form, N={size}"),
            r,
        ));
    }
    for size in 1..=max_n {
        let r = (|| {
            let w = bimoment_window(&g, Rect::square(0, size - 1), &none, &quad)?;
            let p = permutation_z(&w, size, 0, 0)?;
            let a = andreief_z(&w, size, 0, 0)?;
            Ok(close(p.value, a.value, 1e-12))
        })();
        out.push(Check::from_result(
            S,
            format!("gaussian permutation expansion = determinant, N={size}"),
            r,
        ));
    }
    let series_vs_det =
        |spec: &MeasureSpec, d: &DeformationParams, v: Variant, size: i64, trunc: usize| -> Result<(bool, String)> {
            let (z, _) = double_series_z(
                v,
                spec,
                d,
                size,
                &SeriesOptions {
                    truncation: trunc,
                    tol: None,
                },
                &quad,
            )?;
            let a = andreief_for(spec, d, size, &quad)?;
            Ok(close(z.value, a.value, 1e-6))
        };
    let gd = DeformationParams {
        t1: TimeSequence::single(1, c64(0.1)),
        t2: TimeSequence::single(1, c64(0.05)),
        ..Default::default()
    };
    for size in 1..=max_n {
        out.push(Check::from_result(
            S,
            format!("gaussian ++ double series vs deformed determinant, N={size}"),
            series_vs_det(&g, &gd, Variant::PlusPlus, size, 8),
        ));
    }
    let circle = MeasureSpec::circle(RSequence::Exponential { scale: 1.0 });
    let cd = DeformationParams {
        t1: TimeSequence::single(1, c64(0.1)),
        t2: TimeSequence::single(1, c64(0.05)),
        tbar1: TimeSequence::single(1, c64(0.05)),
        tbar2: TimeSequence::single(1, c64(0.05)),
        ..Default::default()
    };
    for size in 1..=max_n {
        for v in Variant::ALL {
            out.push(Check::from_result(
                S,
                format!("circle {} double series vs deformed determinant, N={size}", v.tag()),
                series_vs_det(&circle, &cd, v, size, 8),
            ));
        }
    }
    let qd = DeformationParams {
        t2: TimeSequence::single(1, c64(0.05)),
        t1: TimeSequence::single(1, c64(0.05)),
        ..cd.clone()
    };
    let r = (|| {
        let (z, _) = quadruple_series_z(
            &circle,
            &qd,
            1,
            &SeriesOptions {
                truncation: 4,
                tol: None,
            },
            &quad,
        )?;
        let a = andreief_for(&circle, &qd, 1, &quad)?;
        Ok(close(z.value, a.value, 1e-6))
    })();
    out.push(Check::from_result(
        S,
        "circle quadruple series vs deformed determinant, N=1",
        r,
    ));
    let r = (|| {
        let a = tau_from_series(
            &circle,
            &qd,
            1,
            &SeriesOptions {
                truncation: 12,
                tol: None,
            },
            &quad,
        )?;
        let b = tau_from_andreief(&circle, &qd, 1, &quad)?;
        Ok(close(a, b, 1e-8))
    })();
    out.push(Check::from_result(
        S,
        "τ normalisation: series route = determinant route, N=1",
        r,
    ));
    let r = coupling_kernel_check(&RSequence::Exponential { scale: 1.0 }, &[0.3, 0.1], &[0.2, -0.1], 12)
        .map(|k| (k.residual < 1e-10, format!("residual {}", fmt_f64(k.residual))));
    out.push(Check::from_result(S, "character coupling kernel, r(j)=1/j, N=2", r));
    let radial = MeasureSpec::RadialPlanar { potential: vec![-1.0] };
    let rd = DeformationParams {
        t1: TimeSequence::single(1, c64(0.1)),
        t2: TimeSequence::single(1, c64(0.08)),
        ..Default::default()
    };
    let r = (|| {
        let z = radial_series_z(
            &[-1.0],
            &rd,
            1,
            &SeriesOptions {
                truncation: 6,
                tol: None,
            },
        )?;
        let d = direct_z(&radial, &rd, 1, &quad)?;
        Ok(close(z.value, d.value, 1e-6))
    })();
    out.push(Check::from_result(S, "radial series vs polar quadrature, N=1", r));
    let r = (|| {
        let w = bimoment_window(&g, Rect::square(0, 3), &none, &quad)?;
        let a = andreief_z(&w, 2, 1, 0)?;
        let shifted = BimomentWindow {
            rect: Rect::new(0, 2, 0, 3),
            values: w.values[1..].to_vec(),
            ..w.clone()
        };
        let b = andreief_z(&shifted, 2, 0, 0)?;
        Ok((a.value == b.value, format!("{}", a.value)))
    })();
    out.push(Check::from_result(
        S,
        "index shift n → n+1 equals a row-shifted window",
        r,
    ));
    out
}

/// Runs a suite and renders one line (or JSON object) per check.
pub fn cmd_verify(suite: Suite, budget: &Budget, format: Format) -> Outcome {
    let mut checks = Vec::new();
    if matches!(suite, Suite::Schur | Suite::All) {
        checks.extend(schur_suite(budget.degree.unwrap_or(6), budget.size.unwrap_or(4)));
    }
    if matches!(suite, Suite::Fermion | Suite::All) {
        checks.extend(fermion_suite(budget.size.unwrap_or(3), budget.degree.unwrap_or(5)));
    }
    if matches!(suite, Suite::Engines | Suite::All) {
        checks.extend(engines_suite(budget.size.unwrap_or(2).max(1) as i64));
    }
    let failed = checks.iter().filter(|c| !c.pass).count();
    let body = match format {
        Format::Json => {
            serde_json::to_string_pretty(
                &json!({ "checks": checks, "passed": checks.len() - failed, "failed": failed }),
            )
            .expect("serializable")
                + "\n"
        }
        Format::Csv => {
            let mut s = String::from("suite,label,pass,detail\n");
            for c in &checks {
                let _ = writeln!(s, "{},\"{}\",{},\"{}\"", c.suite, c.label, c.pass, c.detail);
            }
            s
        }
    };
    Outcome {
        code: if failed == 0 { EXIT_OK } else { EXIT_VERIFY },
        stdout: body,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kostka_values() {
        assert_eq!(kostka(&[2, 1], &[1, 1, 1]), 2);
        assert_eq!(kostka(&[3, 2, 1], &[1; 6]), 16);
        assert_eq!(kostka(&[2, 2], &[2, 1, 1]), 1);
        assert_eq!(kostka(&[2], &[0, 2]), 1);
    }

    #[test]
    fn lr_brute_force_examples() {
        let c = lr_brute_force(&Partition::new(vec![2, 1]), &Partition::new(vec![2, 1]));
        assert_eq!(c[&Partition::new(vec![3, 2, 1])], 2);
        assert_eq!(c.values().sum::<u64>(), 8);
        let c = lr_brute_force(&Partition::new(vec![1]), &Partition::new(vec![1]));
        assert_eq!(c.len(), 2);
    }

    #[test]
    fn engine_names() {
        for s in [
            "direct",
            "andreief",
            "double_series+-",
            "series--",
            "quadruple",
            "radial_series",
        ] {
            let e = Engine::parse(s).unwrap();
            assert_eq!(Engine::parse(&e.name()).unwrap(), e);
        }
        assert!(Engine::parse("nope").is_err());
    }

    #[test]
    fn config_round_trip() {
        let text = r#"{"measure": {"kind": "gaussian_coupled", "c": 0.5}, "N": 2, "engine": "andreief"}"#;
        let job = JobConfig::from_json(text).unwrap();
        assert_eq!(job.size, 2);
        let again = JobConfig::from_json(&serde_json::to_string(&job).unwrap()).unwrap();
        assert_eq!(again, job);
        assert!(JobConfig::from_json(r#"{"measure": {"kind": "gaussian_coupled", "c": 0.5}, "bogus": 1}"#).is_err());
    }

    #[test]
    fn rect_flag() {
        assert_eq!(parse_rect("-1,2,0,3").unwrap(), Rect::new(-1, 2, 0, 3));
        assert!(parse_rect("1,0,0,0").is_err());
    }
}
