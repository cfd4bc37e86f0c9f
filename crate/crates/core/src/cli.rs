//! Command-line front end: configs, presets, commands and JSON reports.
//!
//! Exit codes: 0 success, 1 the example deviates from its expected verdict,
//! 2 invalid input or configuration, 3 numerical failure.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::classify::{
    classify, compact_support_riesz_check, perturbation_frame_check, spectral_bounds, ClassifyOptions,
    Verdict, DEFAULT_CLASS_TOL,
};
use crate::error::Error;
use crate::generator::{Generator, SampledSpatial};
use crate::lattice::LatticeSpec;
use crate::oracle::{gram_eigen_bounds, gram_matrix, project_onto_span, DEFAULT_MEMBER_TOL};
use crate::periodization::{autocorrelation, compute_phi, phi_fourier_coeffs, round_sig, PeriodizationTable};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DEVIATION: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

/// Names accepted by `--preset`.
pub const PRESETS: [&str; 6] = ["example", "sinc", "bspline1", "bspline3", "gauss", "sinc2d"];

/// Generator part of a [`RunConfig`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GeneratorSpec {
    /// `f̂ = χ` of `[lower, upper)`, mapped through `(A^T)^{-1}` when `dual`.
    FrequencyBox {
        lower: Vec<f64>,
        upper: Vec<f64>,
        #[serde(default)]
        dual: bool,
    },
    Sinc {
        dim: usize,
    },
    Bspline {
        dim: usize,
        order: u32,
    },
    Gaussian {
        dim: usize,
        width: f64,
    },
    /// CSV of `x_1,...,x_d,re,im` rows on a uniform grid.
    Sampled {
        path: PathBuf,
        #[serde(default)]
        band_limit: Option<f64>,
    },
}

impl GeneratorSpec {
    pub fn build(&self, lattice: &LatticeSpec) -> Result<Generator, Error> {
        match self {
            GeneratorSpec::FrequencyBox { lower, upper, dual } => {
                if *dual {
                    Generator::frequency_box_dual(lattice, lower.clone(), upper.clone())
                } else {
                    Generator::frequency_box(lower.clone(), upper.clone())
                }
            }
            GeneratorSpec::Sinc { dim } => Generator::sinc(*dim),
            GeneratorSpec::Bspline { dim, order } => Generator::bspline(*dim, *order),
            GeneratorSpec::Gaussian { dim, width } => Generator::gaussian(*dim, *width),
            GeneratorSpec::Sampled { path, band_limit } => {
                Ok(Generator::sampled(SampledSpatial::from_csv_path(path, *band_limit)?))
            }
        }
    }
}

fn default_class_tol() -> f64 {
    DEFAULT_CLASS_TOL
}

fn default_member_tol() -> f64 {
    DEFAULT_MEMBER_TOL
}

fn default_gram() -> usize {
    8
}

/// Everything a command needs, as read from `--config` or a preset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub generator: GeneratorSpec,
    /// Row-major lattice matrix `A`.
    pub lattice: Vec<Vec<f64>>,
    pub grid: usize,
    #[serde(default)]
    pub target_tail: Option<f64>,
    #[serde(default)]
    pub eps_zero: Option<f64>,
    #[serde(default = "default_class_tol")]
    pub class_tol: f64,
    #[serde(default = "default_gram")]
    pub gram_half_width: usize,
    #[serde(default = "default_member_tol")]
    pub member_tol: f64,
}

impl RunConfig {
    pub fn preset(name: &str) -> Option<Self> {
        let base = |generator, lattice: Vec<Vec<f64>>, grid| RunConfig {
            generator,
            lattice,
            grid,
            target_tail: None,
            eps_zero: None,
            class_tol: DEFAULT_CLASS_TOL,
            gram_half_width: default_gram(),
            member_tol: DEFAULT_MEMBER_TOL,
        };
        let unit = vec![vec![1.0]];
        Some(match name {
            "example" => base(
                GeneratorSpec::FrequencyBox {
                    lower: vec![-1.0 / 3.0],
                    upper: vec![1.0 / 3.0],
                    dual: true,
                },
                unit,
                1024,
            ),
            "sinc" => base(GeneratorSpec::Sinc { dim: 1 }, unit, 4096),
            "bspline1" => base(GeneratorSpec::Bspline { dim: 1, order: 1 }, unit, 4096),
            "bspline3" => base(GeneratorSpec::Bspline { dim: 1, order: 3 }, unit, 4096),
            "gauss" => base(GeneratorSpec::Gaussian { dim: 1, width: 1.0 }, unit, 4096),
            "sinc2d" => base(
                GeneratorSpec::Sinc { dim: 2 },
                vec![vec![1.0, 1.0], vec![0.0, 1.0]],
                256,
            ),
            _ => return None,
        })
    }

    pub fn from_json_file(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let mut cfg: RunConfig = serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        // sample paths are relative to the config file
        if let GeneratorSpec::Sampled { path: p, .. } = &mut cfg.generator {
            if p.is_relative() {
                if let Some(dir) = path.parent() {
                    *p = dir.join(&*p);
                }
            }
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(CliError::Config(format!("{name} must be positive, got {v}")))
            }
        };
        positive("class_tol", self.class_tol)?;
        positive("member_tol", self.member_tol)?;
        if let Some(t) = self.target_tail {
            positive("target_tail", t)?;
        }
        if let Some(e) = self.eps_zero {
            positive("eps_zero", e)?;
        }
        if self.grid < 2 || !self.grid.is_power_of_two() {
            return Err(Error::InvalidGrid(self.grid).into());
        }
        if self.gram_half_width < 1 {
            return Err(CliError::Config("gram_half_width must be at least 1".into()));
        }
        if let GeneratorSpec::Sampled { path, .. } = &self.generator {
            if !path.is_file() {
                return Err(CliError::Config(format!("sample file {} not found", path.display())));
            }
        }
        Ok(())
    }

    pub fn build(&self) -> Result<(LatticeSpec, Generator), CliError> {
        let lattice = LatticeSpec::new(&self.lattice)?;
        let g = self.generator.build(&lattice)?;
        if g.dim() != lattice.dim() {
            return Err(Error::DimensionMismatch {
                expected: lattice.dim(),
                found: g.dim(),
            }
            .into());
        }
        Ok((lattice, g))
    }

    fn classify_options(&self) -> ClassifyOptions {
        ClassifyOptions {
            eps_zero: self.eps_zero,
            class_tol: self.class_tol,
            ..Default::default()
        }
    }
}

/// Failures of a CLI run, each mapped to an exit code.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Library(Error),
    Io(String),
    Deviation(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Library(e)
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Library(e) if e.is_numerical() => EXIT_NUMERIC,
            CliError::Deviation(_) => EXIT_DEVIATION,
            _ => EXIT_CONFIG,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Library(e) if e.is_numerical() => write!(f, "numerical failure: {e}"),
            CliError::Library(e) => write!(f, "invalid input: {e}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
            CliError::Deviation(m) => write!(f, "deviation: {m}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// JSON run configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Built-in configuration: example, sinc, bspline1, bspline3, gauss, sinc2d.
    #[arg(long)]
    pub preset: Option<String>,
    /// Grid points per axis (power of two).
    #[arg(long)]
    pub grid: Option<usize>,
    /// Write output here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Certified truncation tail target.
    #[arg(long)]
    pub tail: Option<f64>,
    #[arg(long = "eps-zero")]
    pub eps_zero: Option<f64>,
    #[arg(long = "class-tol")]
    pub class_tol: Option<f64>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Classify the translate system from its periodization.
    Classify(Common),
    /// Dump the periodization grid.
    Phi(Common),
    /// Gram finite section and its extreme eigenvalues.
    Gram {
        #[command(flatten)]
        common: Common,
        /// Half-width M of the index box.
        #[arg(long)]
        m: Option<usize>,
    },
    /// Fourier coefficients of the periodization against autocorrelations.
    Coeffs {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        nmax: Option<usize>,
    },
    /// Periodization and frame check for f + T_{An} f.
    Perturb {
        #[command(flatten)]
        common: Common,
        /// Integer vector, e.g. `1` or `1,0`.
        #[arg(long, allow_hyphen_values = true)]
        n: String,
    },
    /// Project psi onto the closed span of the translates.
    Project {
        #[command(flatten)]
        common: Common,
        /// sinc | bspline:M | gauss:W | box:LO:HI | translate:K | csv:PATH[:BAND] | JSON.
        #[arg(long, allow_hyphen_values = true)]
        psi: String,
    },
    /// Reproduce the built-in example and check its verdict.
    Example {
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
}

#[derive(Debug, Clone, Parser)]
#[command(name = "translates", version, about = "Frame and Riesz classification of lattice translates")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

fn resolve(common: &Common) -> Result<RunConfig, CliError> {
    let mut cfg = match (&common.config, &common.preset) {
        (Some(_), Some(_)) => {
            return Err(CliError::Config("use either --config or --preset, not both".into()))
        }
        (Some(path), None) => RunConfig::from_json_file(path)?,
        (None, Some(name)) => RunConfig::preset(name).ok_or_else(|| {
            CliError::Config(format!("unknown preset '{name}' (known: {})", PRESETS.join(", ")))
        })?,
        (None, None) => return Err(CliError::Config("one of --config or --preset is required".into())),
    };
    if let Some(n) = common.grid {
        cfg.grid = n;
    }
    if let Some(t) = common.tail {
        cfg.target_tail = Some(t);
    }
    if let Some(e) = common.eps_zero {
        cfg.eps_zero = Some(e);
    }
    if let Some(c) = common.class_tol {
        cfg.class_tol = c;
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Parses `1`, `1,0`, `[1, 0]` or `-2 3`.
pub fn parse_int_vector(s: &str) -> Result<Vec<i64>, CliError> {
    let trimmed = s.trim().trim_start_matches('[').trim_end_matches(']');
    let parts: Vec<&str> = trimmed
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|p| !p.is_empty())
        .collect();
    if parts.is_empty() {
        return Err(CliError::Config(format!("empty integer vector '{s}'")));
    }
    parts
        .iter()
        .map(|p| {
            p.parse::<i64>()
                .map_err(|_| CliError::Config(format!("'{p}' is not an integer in '{s}'")))
        })
        .collect()
}

fn parse_f64_list(s: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Config(format!("'{p}' is not a number")))
        })
        .collect()
}

/// Builds `ψ` from a `--psi` spec relative to the configured generator.
pub fn parse_psi(spec: &str, g: &Generator, lattice: &LatticeSpec) -> Result<Generator, CliError> {
    let d = lattice.dim();
    let s = spec.trim();
    if s.starts_with('{') {
        let gs: GeneratorSpec =
            serde_json::from_str(s).map_err(|e| CliError::Config(format!("--psi: {e}")))?;
        return Ok(gs.build(lattice)?);
    }
    let (head, rest) = s.split_once(':').unwrap_or((s, ""));
    let bad = || CliError::Config(format!("cannot parse --psi '{spec}'"));
    let psi = match head {
        "self" => g.clone(),
        "sinc" => Generator::sinc(d)?,
        "bspline" => Generator::bspline(d, rest.parse().map_err(|_| bad())?)?,
        "gauss" => Generator::gaussian(d, rest.parse().map_err(|_| bad())?)?,
        "box" => {
            let (lo, hi) = rest.split_once(':').ok_or_else(bad)?;
            let mut lo = parse_f64_list(lo)?;
            let mut hi = parse_f64_list(hi)?;
            if lo.len() == 1 && d > 1 {
                lo = vec![lo[0]; d];
            }
            if hi.len() == 1 && d > 1 {
                hi = vec![hi[0]; d];
            }
            Generator::frequency_box(lo, hi)?
        }
        "translate" => {
            let k = parse_int_vector(rest)?;
            if k.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: k.len(),
                }
                .into());
            }
            g.translated(lattice.spatial_point(&k))?
        }
        "csv" => {
            let (path, band) = match rest.rsplit_once(':') {
                Some((p, b)) if b.parse::<f64>().is_ok() => (p, Some(b.parse::<f64>().unwrap())),
                _ => (rest, None),
            };
            Generator::sampled(SampledSpatial::from_csv_path(Path::new(path), band)?)
        }
        _ => return Err(bad()),
    };
    Ok(psi)
}

/// Rounds every float in `v` to 12 significant digits.
pub fn round_floats(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(x) = n.as_f64() {
                if let Some(r) = serde_json::Number::from_f64(round_sig(x)) {
                    *n = r;
                }
            }
        }
        Value::Array(a) => a.iter_mut().for_each(round_floats),
        Value::Object(o) => o.values_mut().for_each(round_floats),
        _ => {}
    }
}

fn complex_json(z: Complex64) -> Value {
    json!([z.re, z.im])
}

/// Report layout: command, the resolved config verbatim, then the rounded body.
fn report(command: &str, cfg: Option<&RunConfig>, mut body: Value) -> Value {
    round_floats(&mut body);
    let mut m = Map::new();
    m.insert("command".into(), json!(command));
    if let Some(cfg) = cfg {
        m.insert("config".into(), serde_json::to_value(cfg).expect("config serializes"));
    }
    if let Value::Object(b) = body {
        m.extend(b);
    }
    Value::Object(m)
}

fn emit(out: &Option<PathBuf>, stdout: &mut dyn Write, bytes: &[u8]) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, bytes).map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => stdout.write_all(bytes).map_err(|e| CliError::Io(e.to_string())),
    }
}

fn emit_json(out: &Option<PathBuf>, stdout: &mut dyn Write, v: &Value) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(v).expect("report serializes");
    text.push('\n');
    emit(out, stdout, text.as_bytes())
}

fn table_for(cfg: &RunConfig) -> Result<(LatticeSpec, Generator, PeriodizationTable), CliError> {
    let (lattice, g) = cfg.build()?;
    let table = compute_phi(&g, &lattice, cfg.grid, cfg.target_tail)?;
    Ok((lattice, g, table))
}

fn classification_body(cfg: &RunConfig) -> Result<Value, CliError> {
    let (lattice, g, table) = table_for(cfg)?;
    let opts = cfg.classify_options();
    let bounds = spectral_bounds(&table, opts.eps_zero)?;
    let c = classify(&table, &opts)?;
    let mut body = json!({
        "generator": g.tag(),
        "classification": c,
        "bounds": {
            "sup_all": bounds.sup_all,
            "inf_all": bounds.inf_all,
            "inf_offzero": bounds.inf_offzero,
            "excluded_points": bounds.excluded_points,
            "refined_jumps": bounds.boundary.len() / 2,
        },
        "riesz": c.verdict.is_riesz(),
    });
    if g.is_compactly_supported() {
        let r = compact_support_riesz_check(&g, &lattice, &table, cfg.eps_zero)?;
        body["compact_support_check"] = json!({
            "is_riesz": r.is_riesz,
            "min": r.min,
            "witness": r.witness,
        });
    }
    Ok(body)
}

fn cmd_classify(common: &Common, stdout: &mut dyn Write) -> Result<(), CliError> {
    let cfg = resolve(common)?;
    let body = classification_body(&cfg)?;
    emit_json(&common.out, stdout, &report("classify", Some(&cfg), body))
}

fn cmd_phi(common: &Common, stdout: &mut dyn Write) -> Result<(), CliError> {
    let cfg = resolve(common)?;
    let (_, _, table) = table_for(&cfg)?;
    match common.format.unwrap_or(Format::Csv) {
        Format::Json => emit_json(&common.out, stdout, &report("phi", Some(&cfg), json!({ "table": table.to_json() }))),
        _ => {
            let mut buf = Vec::new();
            table.write_csv(&mut buf)?;
            emit(&common.out, stdout, &buf)
        }
    }
}

fn cmd_gram(common: &Common, m: Option<usize>, stdout: &mut dyn Write) -> Result<(), CliError> {
    let mut cfg = resolve(common)?;
    if let Some(m) = m {
        cfg.gram_half_width = m;
    }
    cfg.validate()?;
    let (lattice, g) = cfg.build()?;
    let gram = gram_matrix(&g, &lattice, cfg.gram_half_width)?;
    match common.format.unwrap_or(Format::Json) {
        Format::Csv => {
            let mut buf = Vec::new();
            gram.write_csv(&mut buf)?;
            emit(&common.out, stdout, &buf)
        }
        _ => {
            let (lo, hi) = gram_eigen_bounds(&gram)?;
            let body = json!({
                "generator": g.tag(),
                "half_width": gram.half_width(),
                "order": gram.order(),
                "lambda_min": lo,
                "lambda_max": hi,
            });
            emit_json(&common.out, stdout, &report("gram", Some(&cfg), body))
        }
    }
}

fn cmd_coeffs(common: &Common, nmax: Option<usize>, stdout: &mut dyn Write) -> Result<(), CliError> {
    let cfg = resolve(common)?;
    let (lattice, g, table) = table_for(&cfg)?;
    let coeffs = phi_fourier_coeffs(&table, nmax.unwrap_or(2))?;
    let mut rows = Vec::new();
    let mut worst: f64 = 0.0;
    for (n, c) in coeffs.entries() {
        let a = autocorrelation(&g, &lattice, n)?;
        worst = worst.max((c - a).norm());
        rows.push(json!({
            "n": n,
            "dft": complex_json(*c),
            "autocorrelation": complex_json(a),
        }));
    }
    let body = json!({
        "generator": g.tag(),
        "n_max": coeffs.n_max(),
        "coefficients": rows,
        "max_deviation": worst,
    });
    emit_json(&common.out, stdout, &report("coeffs", Some(&cfg), body))
}

fn cmd_perturb(common: &Common, n: &str, stdout: &mut dyn Write) -> Result<(), CliError> {
    let cfg = resolve(common)?;
    let n = parse_int_vector(n)?;
    let (_, g, table) = table_for(&cfg)?;
    if n.len() != table.dim() {
        return Err(Error::DimensionMismatch {
            expected: table.dim(),
            found: n.len(),
        }
        .into());
    }
    let opts = cfg.classify_options();
    let original = classify(&table, &opts)?;
    let p = perturbation_frame_check(&table, &n, cfg.eps_zero, cfg.class_tol)?;
    let body = json!({
        "generator": g.tag(),
        "n": n,
        "original": original,
        "perturbed": p.classification,
        "frame_for_original_span": p.frame_for_original,
        "lower_on_original_support": p.lower_on_original,
        "upper_on_original_support": p.upper_on_original,
    });
    emit_json(&common.out, stdout, &report("perturb", Some(&cfg), body))
}

fn cmd_project(common: &Common, psi: &str, stdout: &mut dyn Write) -> Result<(), CliError> {
    let cfg = resolve(common)?;
    let (lattice, g, table) = table_for(&cfg)?;
    let psi_g = parse_psi(psi, &g, &lattice)?;
    let p = project_onto_span(&g, &lattice, &psi_g, &table, cfg.eps_zero, cfg.member_tol)?;
    if common.format == Some(Format::Csv) {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header: Vec<String> = (1..=table.dim()).map(|i| format!("gamma_{i}")).collect();
        header.extend(["re".to_string(), "im".to_string()]);
        let io = |e: csv::Error| CliError::Io(e.to_string());
        w.write_record(&header).map_err(io)?;
        for (flat, f) in p.multiplier.iter().enumerate() {
            if let Some(f) = f {
                let mut row: Vec<String> = table.gamma(flat).iter().map(|x| fmt(*x)).collect();
                row.push(fmt(f.re));
                row.push(fmt(f.im));
                w.write_record(&row).map_err(io)?;
            }
        }
        let buf = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
        return emit(&common.out, stdout, &buf);
    }
    let off_zero = p.multiplier.iter().filter(|f| f.is_some()).count();
    let body = json!({
        "generator": g.tag(),
        "psi": psi_g.tag(),
        "residual_norm_sq": p.residual_norm_sq,
        "psi_norm_sq": p.psi_norm_sq,
        "relative_residual": p.residual_norm_sq / p.psi_norm_sq,
        "is_member": p.is_member,
        "member_tol": cfg.member_tol,
        "off_zero_points": off_zero,
        "trunc_radius": p.trunc_radius,
    });
    emit_json(&common.out, stdout, &report("project", Some(&cfg), body))
}

fn fmt(x: f64) -> String {
    crate::periodization::fmt_num(x)
}

/// Tolerances the example must meet.
const EXAMPLE_BOUND_TOL: f64 = 1e-9;

fn cmd_example(format: Option<Format>, stdout: &mut dyn Write) -> Result<(), CliError> {
    let cfg = RunConfig::preset("example").expect("built-in preset");
    let (_, _, table) = table_for(&cfg)?;
    let c = classify(&table, &cfg.classify_options())?;
    let n = table.grid_res() as f64;
    let mut problems = Vec::new();
    if c.verdict != Verdict::ParsevalFrameSequence {
        problems.push(format!("verdict {} instead of ParsevalFrameSequence", c.verdict));
    }
    for (name, b) in [("lower", c.lower), ("upper", c.upper)] {
        match b {
            Some(v) if (v - 1.0).abs() <= EXAMPLE_BOUND_TOL => {}
            other => problems.push(format!("{name} bound {other:?} is not 1")),
        }
    }
    if (c.zero_fraction - 1.0 / 3.0).abs() > 2.0 / n {
        problems.push(format!("zero fraction {} is not 1/3", c.zero_fraction));
    }
    if c.verdict.is_riesz() {
        problems.push("classified as a Riesz sequence".into());
    }
    match format.unwrap_or(Format::Text) {
        Format::Json => {
            let body = json!({
                "classification": c,
                "riesz": c.verdict.is_riesz(),
                "matches_expected": problems.is_empty(),
            });
            emit_json(&None, stdout, &report("example", Some(&cfg), body))?;
        }
        _ => {
            let line = |b: Option<f64>| b.map_or("none".to_string(), |v| format!("{}", round_sig(v)));
            let text = format!(
                "verdict: {}\nbounds: lower = {}, upper = {}\nzero_fraction: {}\n{}\n",
                c.verdict,
                line(c.lower),
                line(c.upper),
                round_sig(c.zero_fraction),
                if c.verdict.is_riesz() {
                    "a Riesz sequence"
                } else {
                    "not a Riesz sequence"
                }
            );
            emit(&None, stdout, text.as_bytes())?;
        }
    }
    if problems.is_empty() {
        Ok(())
    } else {
        Err(CliError::Deviation(problems.join("; ")))
    }
}

/// Runs one command, writing its output to `stdout` and diagnostics to
/// `stderr`, and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = stderr.write_all(text.as_bytes());
            } else {
                let _ = stdout.write_all(text.as_bytes());
            }
            return code;
        }
    };
    let result = match &cli.command {
        Command::Classify(c) => cmd_classify(c, stdout),
        Command::Phi(c) => cmd_phi(c, stdout),
        Command::Gram { common, m } => cmd_gram(common, *m, stdout),
        Command::Coeffs { common, nmax } => cmd_coeffs(common, *nmax, stdout),
        Command::Perturb { common, n } => cmd_perturb(common, n, stdout),
        Command::Project { common, psi } => cmd_project(common, psi, stdout),
        Command::Example { format } => cmd_example(*format, stdout),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "translates: {e}");
            e.exit_code()
        }
    }
}
