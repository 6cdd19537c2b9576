//! Self-check suites with a machine-readable report.

use std::str::FromStr;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::fatou::FatouSolver;
use crate::germ::{basin_entry, Germ};
use crate::implosion::{fixed_point_drift, run_implosion, CoordinateFrame, ImplosionOptions};
use crate::julia::{render_julia, render_julia_lavaurs, GridSpec, Label, LavaursRenderOptions};
use crate::schedule::{phase, weighted_average, ScheduleKind, SigmaSchedule, UniversalWeight};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Fatou,
    Phase,
    Implosion,
    Julia,
    All,
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "fatou" => Ok(Suite::Fatou),
            "phase" => Ok(Suite::Phase),
            "implosion" => Ok(Suite::Implosion),
            "julia" => Ok(Suite::Julia),
            "all" => Ok(Suite::All),
            other => Err(format!(
                "unknown suite `{other}` (fatou, phase, implosion, julia, all)"
            )),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub suite: &'static str,
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub threshold: f64,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub suite: Suite,
    pub quick: bool,
    pub tol: f64,
    pub passed: bool,
    pub seconds: f64,
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

struct Recorder {
    suite: &'static str,
    checks: Vec<Check>,
}

impl Recorder {
    fn at_most(&mut self, name: impl Into<String>, value: f64, threshold: f64) {
        self.checks.push(Check {
            suite: self.suite,
            name: name.into(),
            passed: value <= threshold,
            value,
            threshold,
            detail: String::new(),
        });
    }

    fn holds(&mut self, name: impl Into<String>, ok: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            suite: self.suite,
            name: name.into(),
            passed: ok,
            value: f64::from(u8::from(ok)),
            threshold: 1.0,
            detail: detail.into(),
        });
    }

    fn failed(&mut self, name: impl Into<String>, err: impl std::fmt::Display) {
        self.holds(name, false, err.to_string());
    }
}

/// `count` seeded points of the parabolic basin of `g` inside `|w| <= radius`,
/// with `Re w <= re_max`.
pub fn basin_samples(g: &Germ, count: usize, seed: u64, radius: f64, re_max: f64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let mut tries = 0usize;
    while out.len() < count && tries < 10_000 * count.max(1) {
        tries += 1;
        let w = Complex64::new(rng.random_range(-radius..radius), rng.random_range(-radius..radius));
        if w.norm() > radius || w.re > re_max || w.norm() < 1e-3 {
            continue;
        }
        if basin_entry(g, w, 0.25, 5_000).entry().is_some() {
            out.push(w);
        }
    }
    out
}

fn fatou_suite(tol: f64, quick: bool) -> Vec<Check> {
    let mut r = Recorder {
        suite: "fatou",
        checks: Vec::new(),
    };
    let count = if quick { 50 } else { 300 };
    let cubic = Germ::polynomial(vec![Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)])
        .expect("valid germ");
    let truncated = Germ::geometric_truncated(30, 0.5).expect("valid germ");
    for (name, g, radius, re_max) in [
        ("w+w^2", Germ::quadratic(), 1.0, 0.5),
        ("w+w^2+w^3", cubic, 1.0, 0.5),
        ("geometric-30", truncated, 0.45, 0.0),
    ] {
        let solver = FatouSolver::new(g.clone()).with_tol(tol);
        let pts = basin_samples(&g, count, 11, radius, re_max);
        let mut worst: f64 = 0.0;
        let mut errors = 0;
        for &w in &pts {
            match solver.abel_residual(w) {
                Ok(v) => worst = worst.max(v),
                Err(_) => errors += 1,
            }
        }
        if errors > 0 {
            r.holds(format!("abel residual {name}"), false, format!("{errors} failures"));
        } else {
            r.at_most(format!("abel residual {name}"), worst, 10.0 * tol);
        }
        // two pullback depths reach (phi^o)^{-1} through different iterates
        let deep = solver.clone().with_pullback_floor(40.0);
        let mut worst: f64 = 0.0;
        for k in 0..20 {
            let z = Complex64::new(-8.0 - 0.5 * k as f64, 6.0 - 0.6 * k as f64);
            match (solver.repelling_inverse(z), deep.repelling_inverse(z)) {
                (Ok(a), Ok(b)) => worst = worst.max((a - b).norm() / b.norm()),
                (Err(e), _) | (_, Err(e)) => {
                    r.failed(format!("repelling inverse {name}"), e);
                    worst = f64::NAN;
                    break;
                }
            }
        }
        if !worst.is_nan() {
            r.at_most(format!("repelling inverse {name}"), worst, 10.0 * tol);
        }
    }

    let geo = FatouSolver::new(Germ::geometric()).with_tol(tol);
    let mut worst: f64 = 0.0;
    for w in basin_samples(&Germ::geometric(), count, 13, 2.0, 0.5) {
        match geo.lavaurs(Complex64::default(), w) {
            Ok(l) => worst = worst.max((l - w).norm()),
            Err(_) => worst = f64::INFINITY,
        }
    }
    r.at_most("geometric L_0 identity", worst, 1e-6);

    let q = Germ::quadratic();
    let solver = FatouSolver::new(q.clone()).with_tol(tol);
    let u = Complex64::new(0.3, 0.2);
    let mut worst: f64 = 0.0;
    for w in basin_samples(&q, 20, 17, 0.8, 0.0) {
        let lhs = q.evaluate(w).map(|fw| solver.lavaurs(u, fw));
        let rhs = solver.lavaurs(u, w).map(|l| q.evaluate(l));
        match (lhs, rhs) {
            (Ok(Ok(a)), Ok(Ok(b))) => worst = worst.max((a - b).norm() / (1.0 + b.norm())),
            _ => worst = f64::INFINITY,
        }
    }
    r.at_most("lavaurs semiconjugacy", worst, 1e-6);
    r.checks
}

fn phase_suite(quick: bool) -> Vec<Check> {
    let mut r = Recorder {
        suite: "phase",
        checks: Vec::new(),
    };
    let n = if quick { 10_000 } else { 100_000 };
    let c = Complex64::new(0.5, -0.25);
    match phase(&SigmaSchedule::constant(c), n) {
        Ok(p) => r.at_most("constant schedule", (p.u_n - c).norm(), 1e-12),
        Err(e) => r.failed("constant schedule", e),
    }
    match phase(&SigmaSchedule::linear(), n) {
        Ok(p) => r.at_most("linear schedule", (p.u_n + 0.5).norm(), 2.0 / n as f64),
        Err(e) => r.failed("linear schedule", e),
    }
    let pair = SigmaSchedule::symmetric_pair(
        ScheduleKind::Linear { slope: 0.9 },
        Complex64::default(),
    );
    match phase(&pair, n) {
        Ok(p) => r.at_most("symmetric pair", p.u_n.norm() * n as f64, 1e-6),
        Err(e) => r.failed("symmetric pair", e),
    }
    for n in [1000, if quick { 2000 } else { 10_000 }] {
        let s = SigmaSchedule::constant(Complex64::new(1.0, 0.0));
        let res = CoordinateFrame::new(&Germ::quadratic(), n, 0.6)
            .and_then(|fr| Ok((fr.phase_sum(&s)?, phase(&s, n)?.u_n)));
        match res {
            Ok((sum, u)) => r.at_most(format!("phase-sum identity n={n}"), (sum - u).norm(), 5.0 / n as f64),
            Err(e) => r.failed(format!("phase-sum identity n={n}"), e),
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let mut worst: f64 = 0.0;
    for _ in 0..if quick { 100 } else { 1000 } {
        let (b, limit) = cesaro_sequence(&mut rng, 10_000);
        worst = worst.max((weighted_average(&b, &UniversalWeight) - limit).norm());
    }
    r.at_most("weighted Cesaro average", worst, 1e-2);
    r.checks
}

/// A bounded sequence with a known Cesaro limit: periodic, quasi-periodic
/// or decaying perturbations of a random constant.
pub fn cesaro_sequence(rng: &mut impl Rng, n: usize) -> (Vec<Complex64>, Complex64) {
    let unit = |rng: &mut dyn rand::RngCore| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    };
    let limit = unit(rng);
    let b = match rng.random_range(0..3) {
        0 => {
            let period = rng.random_range(1..=50);
            let mut cycle: Vec<Complex64> = (0..period).map(|_| unit(rng)).collect();
            let mean = cycle.iter().sum::<Complex64>() / period as f64;
            cycle.iter_mut().for_each(|c| *c += limit - mean);
            (0..n).map(|k| cycle[k % period]).collect()
        }
        1 => {
            let theta: f64 = rng.random_range(0.01..0.99);
            let amp = unit(rng);
            (0..n)
                .map(|k| limit + amp * Complex64::from_polar(1.0, std::f64::consts::TAU * theta * k as f64))
                .collect()
        }
        _ => {
            let gamma: f64 = rng.random_range(1.0..2.0);
            let amp = unit(rng);
            (0..n).map(|k| limit + amp / ((k + 1) as f64).powf(gamma)).collect()
        }
    };
    (b, limit)
}

fn implosion_suite(tol: f64, quick: bool) -> Vec<Check> {
    let mut r = Recorder {
        suite: "implosion",
        checks: Vec::new(),
    };
    let opts = ImplosionOptions {
        tol,
        ..Default::default()
    };
    let ns: &[usize] = if quick { &[100, 1000] } else { &[100, 1000, 10_000] };
    let q = Germ::quadratic();
    let w0 = Complex64::new(-0.1, 0.3);
    for sigma in [Complex64::new(0.0, 0.0), Complex64::new(0.5, 0.0), Complex64::new(0.0, 0.3)] {
        let s = SigmaSchedule::constant(sigma);
        let errs: Result<Vec<f64>, _> = ns
            .iter()
            .map(|&n| run_implosion(&q, &s, w0, n, &opts).map(|rep| rep.error))
            .collect();
        match errs {
            Ok(e) => {
                let decreasing = e.windows(2).all(|p| p[1] < p[0]);
                r.holds(format!("errors decrease sigma={sigma}"), decreasing, format!("{e:?}"));
                let last = ns.len() - 1;
                r.at_most(format!("error*n sigma={sigma}"), e[last] * ns[last] as f64, 10.0);
            }
            Err(err) => r.failed(format!("errors decrease sigma={sigma}"), err),
        }
    }
    let geo = Germ::geometric();
    let pair = SigmaSchedule::symmetric_pair(ScheduleKind::Linear { slope: 0.9 }, Complex64::default());
    let n = *ns.last().unwrap_or(&1000);
    match run_implosion(&geo, &pair, Complex64::new(-0.5, 0.0), n, &opts) {
        Ok(rep) => r.at_most(format!("symmetric pair vs identity n={n}"), rep.error, 1e-2),
        Err(e) => r.failed("symmetric pair vs identity", e),
    }
    let s = SigmaSchedule::constant(Complex64::new(1.0, 0.0));
    for a in [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(0.0, 2.0)] {
        let g = Germ::polynomial(vec![Complex64::new(1.0, 0.0), a]).expect("valid germ");
        let res: Result<Vec<f64>, _> = [100usize, 1000, 10_000]
            .iter()
            .map(|&n| {
                CoordinateFrame::new(&g, n, 0.6).and_then(|fr| fixed_point_drift(&fr, &s, n / 2).map(|d| d.residual))
            })
            .collect();
        match res {
            Ok(v) => {
                let slope = -(v[2].ln() - v[0].ln()) / (100f64.ln());
                r.holds(format!("drift exponent a={a}"), slope >= 3.5, format!("slope {slope:.3}"));
            }
            Err(e) => r.failed(format!("drift exponent a={a}"), e),
        }
    }
    r.checks
}

fn julia_suite(quick: bool) -> Vec<Check> {
    let mut r = Recorder {
        suite: "julia",
        checks: Vec::new(),
    };
    let px = if quick { 64 } else { 160 };
    let q = Germ::quadratic();
    let grid = GridSpec::default_window(px);
    let opts = LavaursRenderOptions {
        u: Complex64::new(0.5, 0.0),
        m_max: 2,
        ..Default::default()
    };
    let run = || render_julia_lavaurs(&q, &grid, &opts);
    match (run(), run(), render_julia(&q, &grid, opts.julia_iter)) {
        (Ok(a), Ok(b), Ok(j)) => {
            r.holds("render determinism", a.to_ppm() == b.to_ppm(), "");
            let contained = j
                .labels
                .iter()
                .zip(&a.labels)
                .all(|(&jl, &al)| jl != Label::JuliaNear || al == Label::LavaursHit);
            r.holds("J(q) inside J_Lav", contained, "");
            match render_julia_lavaurs(&q, &grid, &LavaursRenderOptions { m_max: 4, ..opts }) {
                Ok(c) => {
                    let mono = a
                        .labels
                        .iter()
                        .zip(&c.labels)
                        .all(|(&x, &y)| x != Label::LavaursHit || y == Label::LavaursHit);
                    r.holds("hit set grows with m_max", mono, "");
                }
                Err(e) => r.failed("hit set grows with m_max", e),
            }
        }
        _ => r.failed("render determinism", "render failed"),
    }
    r.checks
}

/// Runs `suite`; `quick` keeps every orbit at `n <= 1000`.
pub fn verify(suite: Suite, quick: bool, tol: f64) -> VerifyReport {
    let start = Instant::now();
    let mut checks = Vec::new();
    let all = suite == Suite::All;
    if all || suite == Suite::Fatou {
        checks.extend(fatou_suite(tol, quick));
    }
    if all || suite == Suite::Phase {
        checks.extend(phase_suite(quick));
    }
    if all || suite == Suite::Implosion {
        checks.extend(implosion_suite(tol, quick));
    }
    if all || suite == Suite::Julia {
        checks.extend(julia_suite(quick));
    }
    VerifyReport {
        suite,
        quick,
        tol,
        passed: checks.iter().all(|c| c.passed),
        seconds: start.elapsed().as_secs_f64(),
        checks,
    }
}
