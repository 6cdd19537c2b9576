//! Experiment configuration (TOML).
//!
//! ```toml
//! # germ: coefficients c_2, c_3, ... of f(w) = w + c_2 w^2 + c_3 w^3 + ...,
//! # or "geometric" (exact w/(1-w)) / "geometric-truncated"
//! germ = [1, [0.5, 0.0]]
//! # truncation = 30       # degree for "geometric-truncated"
//! # eval_radius = 0.5     # radius of validity for truncated germs
//!
//! # constant | linear | table | symmetric-pair | random | doubling | rotation
//! schedule = { kind = "constant", value = [0.3, 0.1] }
//! # schedule = { kind = "random", center = 0.2, radius = 0.5, bound = 0.7 }
//! # schedule = { kind = "doubling", mean = 0.3, sin = 0.2 }
//! # schedule = { kind = "symmetric-pair", base = "linear", slope = 0.9 }
//! # schedule = { kind = "table", table = "sigma.csv" }
//!
//! w0 = [-0.5, [-0.1, 0.3]] # complex numbers are reals or [re, im]
//! n = [100, 1000, 10000]
//! beta = 0.6             # must lie in (1/2, 2/3)
//! precision = "auto"     # auto | double | double-double
//! tol = 1e-9
//! diagnose = false
//! seed = 7
//! ensemble = 1           # random schedules: seeds seed, seed+1, ...
//! threads = 4
//!
//! [output]
//! csv = "sweep.csv"
//! trace = "trace.csv"
//! ppm = "render.ppm"
//! labels = "labels.csv"
//!
//! [render]
//! center = -0.5
//! width = 2.4
//! height = 2.4
//! px = 512
//! phases = [0.5]
//! m_max = 4
//! julia_iter = 500
//! ```
//!
//! `LAVAURS_PRECISION` overrides `precision`; `LAVAURS_THREADS` overrides
//! `threads`.

use std::fmt;
use std::ops::Range;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::Deserialize;
use sha2::{Digest, Sha256};
use toml::Spanned;

use crate::germ::{Germ, DEFAULT_EVAL_RADIUS};
use crate::implosion::{ImplosionOptions, DEFAULT_BETA};
use crate::julia::{GridSpec, LavaursRenderOptions};
use crate::precision::Precision;
use crate::schedule::{BaseOrbit, Observable, ScheduleKind, SigmaSchedule, Tail};

pub const ENV_PRECISION: &str = "LAVAURS_PRECISION";
pub const ENV_THREADS: &str = "LAVAURS_THREADS";

/// One invalid field.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigIssue {
    pub line: usize,
    pub column: usize,
    pub field: String,
    pub message: String,
}

impl fmt::Display for ConfigIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "line {}, column {}: `{}`: {}",
            self.line, self.column, self.field, self.message
        )
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{}", .0.iter().map(|i| i.to_string()).collect::<Vec<_>>().join("\n"))]
    Invalid(Vec<ConfigIssue>),
}

impl ConfigError {
    pub fn issues(&self) -> &[ConfigIssue] {
        match self {
            ConfigError::Invalid(v) => v,
            ConfigError::Io { .. } => &[],
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(untagged)]
enum RawComplex {
    Real(f64),
    Pair([f64; 2]),
}

impl From<RawComplex> for Complex64 {
    fn from(c: RawComplex) -> Self {
        match c {
            RawComplex::Real(x) => Complex64::new(x, 0.0),
            RawComplex::Pair([re, im]) => Complex64::new(re, im),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum RawGerm {
    Named(String),
    Coeffs(Vec<RawComplex>),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum OneOrMany {
    One(RawComplex),
    Many(Vec<RawComplex>),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSchedule {
    kind: Spanned<String>,
    value: Option<RawComplex>,
    slope: Option<f64>,
    bound: Option<Spanned<f64>>,
    table: Option<PathBuf>,
    base: Option<Spanned<String>>,
    defect: Option<RawComplex>,
    center: Option<RawComplex>,
    radius: Option<Spanned<f64>>,
    mean: Option<RawComplex>,
    sin: Option<RawComplex>,
    cos: Option<RawComplex>,
    theta: Option<f64>,
    x0: Option<f64>,
    tail_c: Option<RawComplex>,
    tail_alpha: Option<Spanned<f64>>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    csv: Option<PathBuf>,
    trace: Option<PathBuf>,
    ppm: Option<PathBuf>,
    labels: Option<PathBuf>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRender {
    center: Option<RawComplex>,
    width: Option<Spanned<f64>>,
    height: Option<Spanned<f64>>,
    px: Option<Spanned<usize>>,
    phases: Option<Vec<RawComplex>>,
    m_max: Option<usize>,
    delta: Option<Spanned<f64>>,
    julia_iter: Option<usize>,
    basin_iter: Option<usize>,
    petal_radius: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    germ: Spanned<RawGerm>,
    truncation: Option<Spanned<usize>>,
    eval_radius: Option<Spanned<f64>>,
    schedule: Spanned<RawSchedule>,
    w0: Spanned<OneOrMany>,
    n: Spanned<Vec<u64>>,
    beta: Option<Spanned<f64>>,
    precision: Option<Spanned<String>>,
    tol: Option<Spanned<f64>>,
    diagnose: Option<bool>,
    seed: Option<u64>,
    ensemble: Option<Spanned<usize>>,
    threads: Option<Spanned<usize>>,
    output: Option<RawOutput>,
    render: Option<Spanned<RawRender>>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct OutputPaths {
    pub csv: Option<PathBuf>,
    pub trace: Option<PathBuf>,
    pub ppm: Option<PathBuf>,
    pub labels: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RenderConfig {
    pub grid: GridSpec,
    pub phases: Vec<Complex64>,
    pub m_max: usize,
    pub delta: Option<f64>,
    pub julia_iter: usize,
    pub basin_iter: usize,
    pub petal_radius: f64,
}

impl Default for RenderConfig {
    fn default() -> Self {
        RenderConfig {
            grid: GridSpec::default_window(512),
            phases: vec![Complex64::default()],
            m_max: 4,
            delta: None,
            julia_iter: 500,
            basin_iter: 2000,
            petal_radius: 0.25,
        }
    }
}

impl RenderConfig {
    pub fn lavaurs_options(&self, u: Complex64) -> LavaursRenderOptions {
        LavaursRenderOptions {
            u,
            m_max: self.m_max,
            delta: self.delta,
            julia_iter: self.julia_iter,
            ..Default::default()
        }
    }
}

/// A validated experiment.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub germ: Germ,
    pub schedule: SigmaSchedule,
    /// One schedule per ensemble member for random kinds, else just the
    /// main schedule.
    pub schedules: Vec<(String, SigmaSchedule)>,
    pub w0: Vec<Complex64>,
    pub n: Vec<usize>,
    pub beta: f64,
    /// `None` selects automatically per `n`.
    pub precision: Option<Precision>,
    pub tol: f64,
    pub diagnose: bool,
    pub seed: u64,
    pub threads: Option<usize>,
    pub output: OutputPaths,
    pub render: RenderConfig,
    /// SHA-256 of the source text, hex.
    pub hash: String,
}

impl ExperimentConfig {
    pub fn implosion_options(&self) -> ImplosionOptions {
        ImplosionOptions {
            beta: self.beta,
            precision: self.precision,
            diagnose: self.diagnose,
            tol: self.tol,
        }
    }

    /// Short provenance string for output headers.
    pub fn provenance(&self) -> String {
        format!("config-sha256={}", self.hash)
    }

    /// Applies `LAVAURS_PRECISION` and `LAVAURS_THREADS` through `lookup`.
    pub fn apply_env(
        &mut self,
        lookup: impl Fn(&str) -> Option<String>,
    ) -> Result<(), ConfigError> {
        let issue = |field: &str, message: String| {
            ConfigError::Invalid(vec![ConfigIssue {
                line: 0,
                column: 0,
                field: field.into(),
                message,
            }])
        };
        if let Some(p) = lookup(ENV_PRECISION) {
            self.precision = parse_precision(&p).map_err(|m| issue(ENV_PRECISION, m))?;
        }
        if let Some(t) = lookup(ENV_THREADS) {
            let t: usize = t
                .trim()
                .parse()
                .map_err(|_| issue(ENV_THREADS, format!("`{t}` is not a thread count")))?;
            self.threads = (t > 0).then_some(t);
        }
        Ok(())
    }
}

fn parse_precision(s: &str) -> Result<Option<Precision>, String> {
    if s.trim().eq_ignore_ascii_case("auto") {
        Ok(None)
    } else {
        s.parse().map(Some)
    }
}

fn line_col(src: &str, offset: usize) -> (usize, usize) {
    let before = &src[..offset.min(src.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
    (line, column)
}

struct Issues<'a> {
    src: &'a str,
    list: Vec<ConfigIssue>,
}

impl Issues<'_> {
    fn push(&mut self, span: Range<usize>, field: &str, message: impl Into<String>) {
        let (line, column) = line_col(self.src, span.start);
        self.list.push(ConfigIssue {
            line,
            column,
            field: field.into(),
            message: message.into(),
        });
    }
}

pub fn parse_config(path: impl AsRef<Path>) -> Result<ExperimentConfig, ConfigError> {
    let path = path.as_ref();
    let src = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let base = path.parent().unwrap_or(Path::new("."));
    parse_config_str(&src, base)
}

/// Parses and validates `src`; relative table paths resolve against `base`.
pub fn parse_config_str(src: &str, base: &Path) -> Result<ExperimentConfig, ConfigError> {
    let raw: RawConfig = toml::from_str(src).map_err(|e| {
        let (line, column) = e.span().map_or((0, 0), |s| line_col(src, s.start));
        ConfigError::Invalid(vec![ConfigIssue {
            line,
            column,
            field: "<document>".into(),
            message: e.message().trim().to_string(),
        }])
    })?;
    let mut issues = Issues {
        src,
        list: Vec::new(),
    };

    let germ = build_germ(&raw, &mut issues);
    let seed = raw.seed.unwrap_or(0);
    let ensemble = match &raw.ensemble {
        Some(e) if *e.get_ref() == 0 => {
            issues.push(e.span(), "ensemble", "must be at least 1");
            1
        }
        Some(e) => *e.get_ref(),
        None => 1,
    };
    let schedules = build_schedules(&raw.schedule, seed, ensemble, base, &mut issues);

    let w0: Vec<Complex64> = match raw.w0.get_ref() {
        OneOrMany::One(c) => vec![(*c).into()],
        OneOrMany::Many(v) => v.iter().map(|&c| c.into()).collect(),
    };
    if w0.is_empty() || w0.iter().any(|w| !w.is_finite()) {
        issues.push(raw.w0.span(), "w0", "need at least one finite starting point");
    }

    let n: Vec<usize> = raw.n.get_ref().iter().map(|&v| v as usize).collect();
    if n.is_empty() || n.iter().any(|&v| v < 2) {
        issues.push(raw.n.span(), "n", "need a non-empty list of step counts >= 2");
    }

    let beta = match &raw.beta {
        Some(b) => {
            let v = *b.get_ref();
            if !(v > 0.5 && v < 2.0 / 3.0) {
                issues.push(b.span(), "beta", format!("{v} is outside (1/2, 2/3)"));
            }
            v
        }
        None => DEFAULT_BETA,
    };

    let precision = match &raw.precision {
        Some(p) => parse_precision(p.get_ref()).unwrap_or_else(|m| {
            issues.push(p.span(), "precision", m);
            None
        }),
        None => None,
    };

    let tol = match &raw.tol {
        Some(t) => {
            let v = *t.get_ref();
            if !(v > 0.0 && v < 1.0) {
                issues.push(t.span(), "tol", "must lie in (0, 1)");
            }
            v
        }
        None => crate::fatou::DEFAULT_TOL,
    };

    let threads = match &raw.threads {
        Some(t) if *t.get_ref() == 0 => None,
        Some(t) => Some(*t.get_ref()),
        None => None,
    };

    let render = build_render(raw.render.as_ref(), &mut issues);
    let out = raw.output.clone().unwrap_or_default();
    let output = OutputPaths {
        csv: out.csv,
        trace: out.trace,
        ppm: out.ppm,
        labels: out.labels,
    };

    if !issues.list.is_empty() {
        issues.list.sort_by_key(|i| (i.line, i.column));
        return Err(ConfigError::Invalid(issues.list));
    }
    let schedules = schedules.expect("schedule issues reported above");
    Ok(ExperimentConfig {
        germ: germ.expect("germ issues reported above"),
        schedule: schedules[0].1.clone(),
        schedules,
        w0,
        n,
        beta,
        precision,
        tol,
        diagnose: raw.diagnose.unwrap_or(false),
        seed,
        threads,
        output,
        render,
        hash: hex::encode(Sha256::digest(src.as_bytes())),
    })
}

fn build_germ(raw: &RawConfig, issues: &mut Issues) -> Option<Germ> {
    let span = raw.germ.span();
    let radius = raw.eval_radius.as_ref().map(|r| *r.get_ref());
    if let Some(r) = &raw.eval_radius {
        if !(*r.get_ref() > 0.0) {
            issues.push(r.span(), "eval_radius", "must be positive");
            return None;
        }
    }
    let result = match raw.germ.get_ref() {
        RawGerm::Named(name) => match name.as_str() {
            "geometric" => Ok(Germ::geometric()),
            "geometric-truncated" => {
                let d = raw.truncation.as_ref().map_or(30, |t| *t.get_ref());
                Germ::geometric_truncated(d, radius.unwrap_or(DEFAULT_EVAL_RADIUS))
            }
            "quadratic" => Ok(Germ::quadratic()),
            other => {
                issues.push(
                    span,
                    "germ",
                    format!(
                        "unknown germ `{other}` (expected a coefficient list, `quadratic`, \
                         `geometric` or `geometric-truncated`)"
                    ),
                );
                return None;
            }
        },
        RawGerm::Coeffs(c) => {
            let coeffs: Vec<Complex64> = c.iter().map(|&v| v.into()).collect();
            match radius {
                Some(r) => Germ::new(coeffs, r),
                None => Germ::polynomial(coeffs),
            }
        }
    };
    result
        .map_err(|e| issues.push(span, "germ", e.to_string()))
        .ok()
}

fn build_schedules(
    raw: &Spanned<RawSchedule>,
    seed: u64,
    ensemble: usize,
    base: &Path,
    issues: &mut Issues,
) -> Option<Vec<(String, SigmaSchedule)>> {
    let span = raw.span();
    let r = raw.get_ref();
    let c0 = Complex64::default();
    let get = |v: Option<RawComplex>| v.map(Complex64::from);
    let bound = r.bound.as_ref().map(|b| *b.get_ref());
    let tail = match (&r.tail_c, &r.tail_alpha) {
        (Some(c), Some(a)) => {
            let alpha = *a.get_ref();
            if !(alpha > 0.0 && alpha < 1.0) {
                issues.push(a.span(), "schedule.tail_alpha", "must lie in (0, 1)");
                return None;
            }
            Some(Tail {
                c: (*c).into(),
                alpha,
            })
        }
        (None, None) => None,
        _ => {
            issues.push(span, "schedule", "tail_c and tail_alpha go together");
            return None;
        }
    };
    let kind_name = r.kind.get_ref().as_str();
    let label = |k: usize| {
        if ensemble > 1 {
            format!("{kind_name}#{}", seed + k as u64)
        } else {
            kind_name.to_string()
        }
    };
    let trig = || Observable::Trig {
        mean: get(r.mean).unwrap_or(c0),
        sin_amp: get(r.sin).unwrap_or(c0),
        cos_amp: get(r.cos).unwrap_or(c0),
    };
    let kinds: Vec<ScheduleKind> = match kind_name {
        "constant" => vec![ScheduleKind::Constant(get(r.value).unwrap_or(c0))],
        "linear" => vec![ScheduleKind::Linear {
            slope: r.slope.unwrap_or(-1.0),
        }],
        "table" => {
            let Some(p) = &r.table else {
                issues.push(span, "schedule.table", "table kind needs a `table` path");
                return None;
            };
            let p = if p.is_relative() { base.join(p) } else { p.clone() };
            match SigmaSchedule::load_table(&p) {
                Ok(v) => vec![ScheduleKind::Tabulated(std::sync::Arc::new(v))],
                Err(e) => {
                    issues.push(span, "schedule.table", e.to_string());
                    return None;
                }
            }
        }
        "symmetric-pair" => {
            let inner = match r.base.as_ref().map(|b| b.get_ref().as_str()) {
                Some("constant") => ScheduleKind::Constant(get(r.value).unwrap_or(c0)),
                Some("linear") | None => ScheduleKind::Linear {
                    slope: r.slope.unwrap_or(-1.0),
                },
                Some(other) => {
                    let s = r.base.as_ref().map(|b| b.span()).unwrap_or(span);
                    issues.push(s, "schedule.base", format!("unknown base `{other}`"));
                    return None;
                }
            };
            vec![ScheduleKind::SymmetricPair {
                base: Box::new(inner),
                defect: get(r.defect).unwrap_or(c0),
            }]
        }
        "random" => {
            if bound.is_none() {
                issues.push(
                    span,
                    "schedule.bound",
                    "random schedules need an explicit bound M",
                );
                return None;
            }
            let Some(radius) = &r.radius else {
                issues.push(span, "schedule.radius", "random schedules need a disk radius");
                return None;
            };
            let dist = crate::schedule::Distribution::Disk {
                center: get(r.center).unwrap_or(c0),
                radius: *radius.get_ref(),
            };
            (0..ensemble)
                .map(|k| ScheduleKind::RandomIid {
                    seed: seed + k as u64,
                    dist: dist.clone(),
                })
                .collect()
        }
        "doubling" => (0..ensemble)
            .map(|k| ScheduleKind::OrbitDriven {
                base: BaseOrbit::doubling(seed + k as u64),
                observable: trig(),
            })
            .collect(),
        "rotation" => vec![ScheduleKind::OrbitDriven {
            base: BaseOrbit::rotation(
                r.theta.unwrap_or(crate::schedule::GOLDEN_ROTATION),
                r.x0.unwrap_or(0.0),
            ),
            observable: trig(),
        }],
        other => {
            issues.push(
                r.kind.span(),
                "schedule.kind",
                format!(
                    "unknown kind `{other}` (expected constant, linear, table, \
                     symmetric-pair, random, doubling or rotation)"
                ),
            );
            return None;
        }
    };
    let bound_span = r.bound.as_ref().map_or(span.clone(), |b| b.span());
    let mut out = Vec::with_capacity(kinds.len());
    for (k, kind) in kinds.into_iter().enumerate() {
        match SigmaSchedule::new(kind, bound, tail) {
            Ok(s) => out.push((label(k), s)),
            Err(e) => {
                issues.push(bound_span, "schedule", e.to_string());
                return None;
            }
        }
    }
    Some(out)
}

fn build_render(raw: Option<&Spanned<RawRender>>, issues: &mut Issues) -> RenderConfig {
    let mut cfg = RenderConfig::default();
    let Some(raw) = raw else {
        return cfg;
    };
    let r = raw.get_ref();
    let px = r.px.as_ref().map_or(512, |p| *p.get_ref());
    let positive = |v: &Option<Spanned<f64>>, name: &str, default: f64, issues: &mut Issues| {
        match v {
            Some(s) if !(*s.get_ref() > 0.0 && s.get_ref().is_finite()) => {
                issues.push(s.span(), name, "must be positive");
                default
            }
            Some(s) => *s.get_ref(),
            None => default,
        }
    };
    let width = positive(&r.width, "render.width", cfg.grid.width, issues);
    let height = positive(&r.height, "render.height", cfg.grid.height, issues);
    if let Some(p) = &r.px {
        if *p.get_ref() == 0 {
            issues.push(p.span(), "render.px", "must be at least 1");
        }
    }
    cfg.delta = r.delta.as_ref().map(|d| {
        if !(*d.get_ref() > 0.0) {
            issues.push(d.span(), "render.delta", "must be positive");
        }
        *d.get_ref()
    });
    cfg.grid = GridSpec {
        center: r.center.map_or(cfg.grid.center, Complex64::from),
        width,
        height,
        px_w: px.max(1),
        px_h: px.max(1),
    };
    if let Some(p) = &r.phases {
        cfg.phases = p.iter().map(|&c| c.into()).collect();
    }
    cfg.m_max = r.m_max.unwrap_or(cfg.m_max);
    cfg.julia_iter = r.julia_iter.unwrap_or(cfg.julia_iter);
    cfg.basin_iter = r.basin_iter.unwrap_or(cfg.basin_iter);
    cfg.petal_radius = r.petal_radius.unwrap_or(cfg.petal_radius);
    cfg
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(src: &str) -> Result<ExperimentConfig, ConfigError> {
        parse_config_str(src, Path::new("."))
    }

    const MINIMAL: &str = "germ = [1]\nschedule = { kind = \"constant\", value = 0 }\nw0 = -0.5\nn = [1000]\n";

    #[test]
    fn minimal_config_is_valid() {
        let c = parse(MINIMAL).unwrap();
        assert_eq!(c.n, vec![1000]);
        assert_eq!(c.w0, vec![Complex64::new(-0.5, 0.0)]);
        assert_eq!(c.beta, DEFAULT_BETA);
        assert_eq!(c.precision, None);
        assert_eq!(c.hash.len(), 64);
    }

    #[test]
    fn beta_outside_window_reports_its_line() {
        let src = format!("{MINIMAL}beta = 0.7\n");
        let err = parse(&src).unwrap_err();
        let issue = &err.issues()[0];
        assert_eq!(issue.field, "beta");
        assert_eq!(issue.line, 5);
    }

    #[test]
    fn random_kind_needs_bound() {
        let src = "germ = [1]\nw0 = -0.5\nn = [1000]\nschedule = { kind = \"random\", center = 0.2, radius = 0.5 }\n";
        let err = parse(src).unwrap_err();
        assert_eq!(err.issues()[0].field, "schedule.bound");
        assert_eq!(err.issues()[0].line, 4);
        let ok = src.replace("radius = 0.5", "radius = 0.5, bound = 0.7");
        assert!(parse(&ok).is_ok());
    }

    #[test]
    fn unknown_keys_rejected() {
        let src = format!("{MINIMAL}colour = 3\n");
        let err = parse(&src).unwrap_err();
        assert!(err.issues()[0].message.contains("colour"), "{err}");
        assert_eq!(err.issues()[0].line, 5);
    }

    #[test]
    fn every_bad_field_reported() {
        let src = "germ = [1]\nschedule = { kind = \"constant\" }\nw0 = -0.5\nn = [1]\nbeta = 0.9\ntol = 2.0\n";
        let err = parse(src).unwrap_err();
        let fields: Vec<_> = err.issues().iter().map(|i| i.field.as_str()).collect();
        assert_eq!(fields, ["n", "beta", "tol"]);
    }

    #[test]
    fn environment_overrides() {
        let mut c = parse(MINIMAL).unwrap();
        c.apply_env(|k| match k {
            ENV_PRECISION => Some("dd".into()),
            ENV_THREADS => Some("3".into()),
            _ => None,
        })
        .unwrap();
        assert_eq!(c.precision, Some(Precision::DoubleDouble));
        assert_eq!(c.threads, Some(3));
        assert!(c.apply_env(|_| Some("bogus".into())).is_err());
    }

    #[test]
    fn random_ensemble_expands_seeds() {
        let src = "germ = [1]\nw0 = -0.5\nn = [100]\nseed = 5\nensemble = 3\nschedule = { kind = \"random\", center = 0.2, radius = 0.5, bound = 0.7 }\n";
        let c = parse(src).unwrap();
        let labels: Vec<_> = c.schedules.iter().map(|(l, _)| l.as_str()).collect();
        assert_eq!(labels, ["random#5", "random#6", "random#7"]);
    }

    #[test]
    fn hash_tracks_text() {
        let a = parse(MINIMAL).unwrap().hash;
        let b = parse(&format!("{MINIMAL}# comment\n")).unwrap().hash;
        assert_ne!(a, b);
    }
}
