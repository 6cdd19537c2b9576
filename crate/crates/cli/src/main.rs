//! `lavaurs`: command-line driver for the implosion laboratory.
//!
//! Exit codes: 0 success, 1 invalid input, 2 numerical failure, 3 partial
//! (some runs degraded or failed).

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::json;

use lavaurs_core::config::{parse_config, ExperimentConfig, ENV_THREADS};
use lavaurs_core::fatou::{FatouSolver, DEFAULT_TOL};
use lavaurs_core::germ::Germ;
use lavaurs_core::implosion::{convergence_sweep, run_implosion, write_sweep_csv, SweepRow};
use lavaurs_core::julia::{render_basin, render_julia, render_julia_lavaurs, Bitmap, Label};
use lavaurs_core::verify::{verify, Suite};

const EXIT_INVALID: u8 = 1;
const EXIT_NUMERICAL: u8 = 2;
const EXIT_PARTIAL: u8 = 3;

#[derive(Parser)]
#[command(name = "lavaurs", version, about = "Non-autonomous parabolic implosion laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a Fatou coordinate.
    Fatou {
        /// Coefficients `c2,c3,...`, or `quadratic`, `geometric`, `geometric-truncated[:D]`.
        #[arg(long, default_value = "quadratic")]
        germ: String,
        /// Point `w`, e.g. `-0.5` or `-0.1+0.3i`.
        #[arg(long, allow_hyphen_values = true)]
        w: String,
        #[arg(long, value_enum, default_value_t = Coordinate::Attracting)]
        side: Coordinate,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Evaluate the Lavaurs map `L_u(w)`.
    Lavaurs {
        #[arg(long, default_value = "quadratic")]
        germ: String,
        #[arg(long, allow_hyphen_values = true, default_value = "0")]
        u: String,
        /// Repeat for several points.
        #[arg(long, allow_hyphen_values = true, required = true)]
        w: Vec<String>,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Run one perturbed orbit per `n` in the config and report JSON.
    Implode {
        config: PathBuf,
        /// Write the orbit trace of the largest `n` here (with diagnostics
        /// when `diagnose = true`).
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Convergence sweep over `n`, every `w0` and every ensemble member, as CSV.
    Sweep {
        config: PathBuf,
        /// Output file; defaults to `output.csv` of the config, else stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render a basin, Julia set or Julia-Lavaurs set as PPM.
    Render {
        config: PathBuf,
        #[arg(long, value_enum, default_value_t = RenderKind::Lavaurs)]
        kind: RenderKind,
        /// PPM path; defaults to `output.ppm` of the config.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Optional per-pixel label dump.
        #[arg(long)]
        labels: Option<PathBuf>,
    },
    /// Run self-check suites.
    Verify {
        #[arg(value_parser = Suite::from_str, default_value = "all")]
        suite: Suite,
        /// Keep orbits at n <= 1000.
        #[arg(long)]
        quick: bool,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        /// Write the JSON report here instead of stdout.
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Coordinate {
    /// `phi^i(w)`.
    Attracting,
    /// `(phi^o)^{-1}(w)`.
    RepellingInverse,
}

#[derive(Clone, Copy, ValueEnum)]
enum RenderKind {
    Basin,
    Julia,
    Lavaurs,
}

/// Failure carrying its exit code.
struct Failure(u8, String);

impl Failure {
    fn invalid(msg: impl ToString) -> Self {
        Failure(EXIT_INVALID, msg.to_string())
    }

    fn numerical(msg: impl ToString) -> Self {
        Failure(EXIT_NUMERICAL, msg.to_string())
    }
}

fn io_fail(path: &Path, e: impl std::fmt::Display) -> Failure {
    Failure::invalid(format!("{}: {e}", path.display()))
}

fn parse_complex(s: &str) -> Result<Complex64, Failure> {
    Complex64::from_str(s.trim()).map_err(|_| Failure::invalid(format!("`{s}` is not a complex number")))
}

fn parse_germ(text: &str) -> Result<Germ, Failure> {
    let text = text.trim();
    match text {
        "quadratic" => return Ok(Germ::quadratic()),
        "geometric" => return Ok(Germ::geometric()),
        _ => {}
    }
    if let Some(rest) = text.strip_prefix("geometric-truncated") {
        let degree = match rest.strip_prefix(':') {
            Some(d) => d.parse().map_err(|_| Failure::invalid(format!("bad degree `{d}`")))?,
            None if rest.is_empty() => 30,
            None => return Err(Failure::invalid(format!("unknown germ `{text}`"))),
        };
        return Germ::geometric_truncated(degree, 0.5).map_err(Failure::invalid);
    }
    let coeffs = text
        .split(',')
        .map(parse_complex)
        .collect::<Result<Vec<_>, _>>()?;
    Germ::polynomial(coeffs).map_err(Failure::invalid)
}

fn load(path: &Path) -> Result<ExperimentConfig, Failure> {
    let mut cfg = parse_config(path).map_err(Failure::invalid)?;
    cfg.apply_env(|k| std::env::var(k).ok()).map_err(Failure::invalid)?;
    init_threads(cfg.threads);
    Ok(cfg)
}

fn init_threads(threads: Option<usize>) {
    let n = threads.or_else(|| std::env::var(ENV_THREADS).ok()?.parse().ok());
    if let Some(n) = n.filter(|&n| n > 0) {
        // a second initialisation is harmless
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    File::create(path).map(BufWriter::new).map_err(|e| io_fail(path, e))
}

fn print_json(v: &serde_json::Value) {
    let mut out = io::stdout().lock();
    // a closed pipe downstream is not our failure
    let _ = writeln!(out, "{}", serde_json::to_string_pretty(v).expect("serializable"));
}

fn cmd_fatou(germ: &str, w: &str, side: Coordinate, tol: f64) -> Result<u8, Failure> {
    let solver = FatouSolver::new(parse_germ(germ)?).with_tol(tol);
    let w = parse_complex(w)?;
    let value = match side {
        Coordinate::Attracting => solver.attracting_coord(w),
        Coordinate::RepellingInverse => solver.repelling_inverse(w),
    }
    .map_err(Failure::numerical)?;
    print_json(&json!({ "input": w, "value": value }));
    Ok(0)
}

fn cmd_lavaurs(germ: &str, u: &str, ws: &[String], tol: f64) -> Result<u8, Failure> {
    if ws.is_empty() {
        return Err(Failure::invalid("need at least one --w"));
    }
    let solver = FatouSolver::new(parse_germ(germ)?).with_tol(tol);
    let u = parse_complex(u)?;
    let mut rows = Vec::new();
    let mut failures = 0;
    for w in ws {
        let w = parse_complex(w)?;
        match solver.lavaurs(u, w) {
            Ok(v) => rows.push(json!({ "w": w, "value": v })),
            Err(e) => {
                failures += 1;
                rows.push(json!({ "w": w, "error": e.to_string() }));
            }
        }
    }
    print_json(&json!({ "u": u, "results": rows }));
    Ok(match failures {
        0 => 0,
        f if f == ws.len() => EXIT_NUMERICAL,
        _ => EXIT_PARTIAL,
    })
}

fn cmd_implode(path: &Path, trace: Option<&Path>) -> Result<u8, Failure> {
    let cfg = load(path)?;
    let opts = cfg.implosion_options();
    let w0 = cfg.w0[0];
    let mut reports = Vec::new();
    let mut degraded = false;
    let mut last = None;
    for &n in &cfg.n {
        let r = run_implosion(&cfg.germ, &cfg.schedule, w0, n, &opts).map_err(Failure::numerical)?;
        degraded |= r.degraded;
        reports.push(serde_json::to_value(&r).expect("serializable"));
        last = Some(r);
    }
    let trace_path = trace.map(Path::to_path_buf).or(cfg.output.trace.clone());
    if let (Some(p), Some(r)) = (trace_path, last) {
        match &r.trace {
            Some(t) => t.write_csv(create(&p)?).map_err(|e| io_fail(&p, e))?,
            None => eprintln!("no trace kept: set `diagnose = true` to record one"),
        }
    }
    print_json(&json!({
        "config_sha256": cfg.hash,
        "w0": w0,
        "reports": reports,
    }));
    Ok(if degraded { EXIT_PARTIAL } else { 0 })
}

fn cmd_sweep(path: &Path, out: Option<&Path>) -> Result<u8, Failure> {
    let cfg = load(path)?;
    let opts = cfg.implosion_options();
    let mut rows: Vec<SweepRow> = Vec::new();
    for (label, s) in &cfg.schedules {
        for &w0 in &cfg.w0 {
            for mut row in convergence_sweep(&cfg.germ, s, w0, &cfg.n, &opts) {
                row.label = format!("{label} w0={w0}");
                rows.push(row);
            }
        }
    }
    let out = out.map(Path::to_path_buf).or(cfg.output.csv.clone());
    let prov = cfg.provenance();
    match &out {
        Some(p) => write_sweep_csv(&rows, create(p)?, Some(&prov)).map_err(|e| io_fail(p, e))?,
        None => write_sweep_csv(&rows, io::stdout().lock(), Some(&prov))
            .map_err(|e| Failure::invalid(e.to_string()))?,
    }
    let failed = rows.iter().filter(|r| r.outcome.is_err()).count();
    let degraded = rows
        .iter()
        .any(|r| r.outcome.as_ref().is_ok_and(|rep| rep.degraded));
    Ok(if failed == rows.len() {
        EXIT_NUMERICAL
    } else if failed > 0 || degraded {
        EXIT_PARTIAL
    } else {
        0
    })
}

fn write_bitmap(bmp: &Bitmap, ppm: &Path, labels: Option<&Path>) -> Result<(), Failure> {
    let mut w = create(ppm)?;
    bmp.write_ppm(&mut w).map_err(|e| io_fail(ppm, e))?;
    w.flush().map_err(|e| io_fail(ppm, e))?;
    if let Some(p) = labels {
        bmp.write_csv(create(p)?).map_err(|e| io_fail(p, e))?;
    }
    Ok(())
}

/// `render.ppm` becomes `render-1.ppm`, ... for extra phases.
fn indexed(path: &Path, i: usize) -> PathBuf {
    if i == 0 {
        return path.to_path_buf();
    }
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("render");
    let name = match path.extension().and_then(|e| e.to_str()) {
        Some(ext) => format!("{stem}-{i}.{ext}"),
        None => format!("{stem}-{i}"),
    };
    path.with_file_name(name)
}

fn cmd_render(
    path: &Path,
    kind: RenderKind,
    out: Option<&Path>,
    labels: Option<&Path>,
) -> Result<u8, Failure> {
    let cfg = load(path)?;
    let ppm = out
        .map(Path::to_path_buf)
        .or(cfg.output.ppm.clone())
        .ok_or_else(|| Failure::invalid("no output: pass --out or set output.ppm"))?;
    let labels = labels.map(Path::to_path_buf).or(cfg.output.labels.clone());
    let rc = &cfg.render;
    let mut summary = Vec::new();
    let bitmaps: Vec<(Complex64, Bitmap)> = match kind {
        RenderKind::Basin => vec![(
            Complex64::default(),
            render_basin(&cfg.germ, &rc.grid, rc.basin_iter, rc.petal_radius).map_err(Failure::invalid)?,
        )],
        RenderKind::Julia => vec![(
            Complex64::default(),
            render_julia(&cfg.germ, &rc.grid, rc.julia_iter).map_err(Failure::invalid)?,
        )],
        RenderKind::Lavaurs => rc
            .phases
            .iter()
            .map(|&u| {
                render_julia_lavaurs(&cfg.germ, &rc.grid, &rc.lavaurs_options(u))
                    .map(|b| (u, b))
                    .map_err(Failure::invalid)
            })
            .collect::<Result<_, _>>()?,
    };
    for (i, (u, bmp)) in bitmaps.iter().enumerate() {
        let p = indexed(&ppm, i);
        write_bitmap(bmp, &p, labels.as_deref().map(|l| indexed(l, i)).as_deref())?;
        let counts: serde_json::Map<String, serde_json::Value> = [
            Label::Basin,
            Label::JuliaNear,
            Label::LavaursHit,
            Label::Escapes,
            Label::Undecided,
        ]
        .iter()
        .map(|&l| (l.name().to_string(), json!(bmp.count(l))))
        .collect();
        summary.push(json!({ "u": u, "ppm": p, "labels": counts }));
    }
    print_json(&json!({ "config_sha256": cfg.hash, "renders": summary }));
    Ok(0)
}

fn cmd_verify(suite: Suite, quick: bool, tol: f64, out: Option<&Path>) -> Result<u8, Failure> {
    init_threads(None);
    let report = verify(suite, quick, tol);
    let value = serde_json::to_value(&report).expect("serializable");
    match out {
        Some(p) => {
            let mut w = create(p)?;
            writeln!(w, "{value:#}").map_err(|e| io_fail(p, e))?;
        }
        None => print_json(&value),
    }
    for c in report.failures() {
        eprintln!("FAIL {}/{}: {} (threshold {}) {}", c.suite, c.name, c.value, c.threshold, c.detail);
    }
    Ok(if report.passed { 0 } else { EXIT_NUMERICAL })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Fatou { germ, w, side, tol } => cmd_fatou(germ, w, *side, *tol),
        Command::Lavaurs { germ, u, w, tol } => cmd_lavaurs(germ, u, w, *tol),
        Command::Implode { config, trace } => cmd_implode(config, trace.as_deref()),
        Command::Sweep { config, out } => cmd_sweep(config, out.as_deref()),
        Command::Render {
            config,
            kind,
            out,
            labels,
        } => cmd_render(config, *kind, out.as_deref(), labels.as_deref()),
        Command::Verify {
            suite,
            quick,
            tol,
            json,
        } => cmd_verify(*suite, *quick, *tol, json.as_deref()),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(Failure(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
