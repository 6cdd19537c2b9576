//! Acceptance suite: one PASS/FAIL line per target.
//!
//! Runs without the libtest harness so every line is printed. Targets known
//! to be out of reach print FAIL with their measurements but do not fail the
//! run unless `--strict` is passed; their reachable parts are still enforced.

use std::f64::consts::TAU;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use lavaurs_core::fatou::FatouSolver;
use lavaurs_core::germ::{basin_entry, Germ};
use lavaurs_core::implosion::{
    fixed_point_drift, run_implosion, run_prop_a, CoordinateFrame, ImplosionOptions,
};
use lavaurs_core::julia::{render_julia, render_julia_lavaurs, GridSpec, Label, LavaursRenderOptions};
use lavaurs_core::precision::Precision;
use lavaurs_core::schedule::{
    phase, weight_g, BaseOrbit, Observable, ScheduleKind, SigmaSchedule,
};
use num_complex::{c64, Complex64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    /// Whether a FAIL is a documented limitation rather than a regression.
    known_limit: bool,
    /// Parts that must hold even when `known_limit` is set.
    core_ok: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: String) -> Self {
        Outcome {
            pass,
            known_limit: false,
            core_ok: pass,
            detail,
        }
    }
}

fn quadratic_plus_cubic() -> Germ {
    Germ::polynomial(vec![c64(1.0, 0.0), c64(1.0, 0.0)]).unwrap()
}

fn truncated_geometric() -> Germ {
    Germ::geometric_truncated(30, 0.5).unwrap()
}

/// Uniform draws from a box, kept if they enter the petal within `cap` steps.
fn basin_points(g: &Germ, count: usize, seed: u64, lo: Complex64, hi: Complex64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let w = c64(rng.random_range(lo.re..hi.re), rng.random_range(lo.im..hi.im));
        if w.norm() > 1e-3 && basin_entry(g, w, 0.25, 5000).entry().is_some() {
            out.push(w);
        }
    }
    out
}

fn abel_residual() -> Outcome {
    let start = Instant::now();
    let mut worst = Vec::new();
    for (name, g, lo, hi) in [
        ("w+w^2", Germ::quadratic(), c64(-1.4, -1.1), c64(0.4, 1.1)),
        ("w+w^2+w^3", quadratic_plus_cubic(), c64(-1.4, -1.1), c64(0.4, 1.1)),
        ("geometric-30", truncated_geometric(), c64(-0.45, -0.45), c64(0.0, 0.45)),
    ] {
        let pts: Vec<_> = basin_points(&g, 1000, 1, lo, hi)
            .into_iter()
            .filter(|w| w.norm() <= 0.45 || g.is_polynomial())
            .collect();
        let solver = FatouSolver::new(g).with_tol(1e-9);
        let m = pts
            .iter()
            .map(|&w| solver.abel_residual(w).unwrap_or(f64::INFINITY))
            .fold(0.0, f64::max);
        worst.push(format!("{name}: {m:.2e} over {}", pts.len()));
        if m > 1e-8 {
            return Outcome::new(false, worst.join(", "));
        }
    }
    let t = start.elapsed();
    Outcome::new(t < Duration::from_secs(30), format!("{} in {t:.1?}", worst.join(", ")))
}

fn geometric_identity() -> Outcome {
    let start = Instant::now();
    let g = Germ::geometric();
    let solver = FatouSolver::new(g.clone()).with_tol(1e-9);
    let pts = basin_points(&g, 1000, 2, c64(-3.0, -2.0), c64(1.0, 2.0));
    let sup = pts
        .iter()
        .map(|&w| solver.lavaurs(Complex64::default(), w).map_or(f64::INFINITY, |l| (l - w).norm()))
        .fold(0.0, f64::max);
    let t = start.elapsed();
    Outcome::new(
        sup <= 1e-6 && t < Duration::from_secs(60),
        format!("sup |L_0(w) - w| = {sup:.2e} over 1000 samples in {t:.1?}"),
    )
}

fn convergence() -> Outcome {
    let start = Instant::now();
    let g = Germ::quadratic();
    let opts = ImplosionOptions {
        precision: Some(Precision::DoubleDouble),
        ..Default::default()
    };
    let ns = [100usize, 1000, 10_000];
    let mut decreasing = true;
    let mut threshold = true;
    let mut rate_ok = true;
    let mut lines = Vec::new();
    for sigma in [c64(0.0, 0.0), c64(0.5, 0.0), c64(0.0, 0.3)] {
        let s = SigmaSchedule::constant(sigma);
        let e: Vec<f64> = ns
            .iter()
            .map(|&n| run_implosion(&g, &s, c64(-0.5, 0.0), n, &opts).map_or(f64::INFINITY, |r| r.error))
            .collect();
        decreasing &= e.windows(2).all(|p| p[1] < p[0]);
        threshold &= e[2] <= 1e-2;
        // first-order decay: the error times n settles to a constant
        let (c1, c2) = (e[1] * 1e3, e[2] * 1e4);
        rate_ok &= (c2 / c1 - 1.0).abs() < 0.05;
        lines.push(format!("sigma={sigma}: {:.3e} {:.3e} {:.3e} (n*err {c2:.0})", e[0], e[1], e[2]));
    }
    let t = start.elapsed();
    let core_ok = decreasing && rate_ok && t < Duration::from_secs(300);
    Outcome {
        pass: core_ok && threshold,
        known_limit: !threshold,
        core_ok,
        detail: format!(
            "{}; decreasing={decreasing}, 1/n rate={rate_ok}, err<=1e-2 at n=1e4: {threshold}; {t:.1?}",
            lines.join("; ")
        ),
    }
}

fn phase_sum_identity() -> Outcome {
    let s = SigmaSchedule::constant(c64(1.0, 0.0));
    let mut pass = true;
    let mut parts = Vec::new();
    for n in [1000usize, 10_000] {
        let fr = CoordinateFrame::new(&Germ::quadratic(), n, 0.6).unwrap();
        let d = (fr.phase_sum(&s).unwrap() - phase(&s, n).unwrap().u_n).norm();
        pass &= d <= 5.0 / n as f64;
        parts.push(format!("n={n}: {d:.2e}"));
    }
    Outcome::new(pass, parts.join(", "))
}

fn skew_product() -> Outcome {
    let p = [c64(-1.0, 0.0)];
    let z0 = c64(0.1, 0.0);
    let w0 = c64(-0.1, 0.3);
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, q) in [("w+w^2", Germ::quadratic()), ("geometric-30", truncated_geometric())] {
        let a = run_prop_a(&p, &q, z0, w0, 1000);
        let b = run_prop_a(&p, &q, z0, w0, 10_000);
        match (a, b) {
            (Ok(a), Ok(b)) => {
                let u_ok = (a.induced_phase + 1.0).norm() <= 5e-2;
                pass &= a.error <= 2e-2 && b.error < a.error && u_ok;
                parts.push(format!(
                    "{name}: err {:.3e} -> {:.3e}, u_N+1 = {:.2e} at N=2000",
                    a.error,
                    b.error,
                    (a.induced_phase + 1.0).norm()
                ));
            }
            (a, b) => {
                pass = false;
                parts.push(format!("{name}: {:?} {:?}", a.err(), b.err()));
            }
        }
    }
    Outcome::new(pass, parts.join("; "))
}

fn symmetric_pair() -> Outcome {
    let g = Germ::geometric();
    let s = SigmaSchedule::symmetric_pair(ScheduleKind::Linear { slope: 0.9 }, Complex64::default());
    let w0 = c64(-0.5, 0.0);
    let mut un = Vec::new();
    let mut errs = Vec::new();
    for n in [100usize, 1000, 10_000] {
        let r = run_implosion(&g, &s, w0, n, &ImplosionOptions::default());
        let r = match r {
            Ok(r) => r,
            Err(e) => return Outcome::new(false, e.to_string()),
        };
        un.push(r.u_n.norm() * n as f64);
        // L_0 is the identity for this germ
        errs.push((r.w_final - w0).norm());
    }
    let bounded = un.iter().all(|&v| v <= 1.0);
    Outcome::new(
        bounded && errs[2] <= 1e-2,
        format!("max n|u_n| = {:.1e}, errors {:.2e} {:.2e} {:.2e}", un.iter().fold(0.0f64, |a, &b| a.max(b)), errs[0], errs[1], errs[2]),
    )
}

fn random_schedules() -> Outcome {
    let g = Germ::quadratic();
    let w0 = c64(-0.1, 0.3);
    let solver = FatouSolver::new(g.clone());
    let target = solver.lavaurs(c64(0.2, 0.0), w0).unwrap();
    let mut worst: f64 = 0.0;
    let mut worst_un: f64 = 0.0;
    for seed in 0..32 {
        let s = SigmaSchedule::random_disk(seed, c64(0.2, 0.0), 0.5).unwrap();
        match run_implosion(&g, &s, w0, 10_000, &ImplosionOptions::default()) {
            Ok(r) => {
                worst = worst.max((r.w_final - target).norm());
                worst_un = worst_un.max(r.error);
            }
            Err(e) => return Outcome::new(false, format!("seed {seed}: {e}")),
        }
    }
    Outcome::new(
        worst <= 3e-2,
        format!("max |w_n - L_0.2(w0)| = {worst:.2e}, max |w_n - L_un(w0)| = {worst_un:.2e} over 32 seeds"),
    )
}

fn ergodic_schedule() -> Outcome {
    let sigma = Observable::Trig {
        mean: c64(0.3, 0.0),
        sin_amp: c64(0.2, 0.0),
        cos_amp: Complex64::default(),
    };
    let s = SigmaSchedule::orbit_driven(BaseOrbit::doubling(2024), sigma);
    let u = phase(&s, 100_000).unwrap().u_n;
    let phase_err = (u - 0.3).norm();
    let g = Germ::quadratic();
    let w0 = c64(-0.1, 0.3);
    let r = match run_implosion(&g, &s, w0, 10_000, &ImplosionOptions::default()) {
        Ok(r) => r,
        Err(e) => return Outcome::new(false, e.to_string()),
    };
    let vs_mean = (r.w_final - FatouSolver::new(g).lavaurs(c64(0.3, 0.0), w0).unwrap()).norm();
    Outcome::new(
        phase_err <= 1e-2 && r.error <= 3e-2,
        format!(
            "|u_n - 0.3| = {phase_err:.2e} at n=1e5, implosion error {:.2e} at n=1e4 ({vs_mean:.2e} against L_0.3)",
            r.error
        ),
    )
}

fn drift_exponent() -> Outcome {
    let s = SigmaSchedule::constant(c64(1.0, 0.0));
    let mut pass = true;
    let mut parts = Vec::new();
    for a in [c64(0.0, 0.0), c64(1.0, 0.0), c64(0.0, 2.0)] {
        let g = Germ::polynomial(vec![c64(1.0, 0.0), a]).unwrap();
        let pts: Vec<(f64, f64)> = [100usize, 1000, 10_000]
            .iter()
            .map(|&n| {
                let fr = CoordinateFrame::new(&g, n, 0.6).unwrap();
                let r = fixed_point_drift(&fr, &s, n / 2).unwrap().residual;
                ((n as f64).ln(), r.ln())
            })
            .collect();
        // least-squares slope of log residual against log n
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / 3.0;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / 3.0;
        let num: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let den: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        let slope = -num / den;
        pass &= slope >= 3.5;
        parts.push(format!("a={a}: {slope:.3}"));
    }
    Outcome::new(pass, parts.join(", "))
}

fn linear_march() -> Outcome {
    let g = Germ::quadratic();
    let opts = ImplosionOptions {
        diagnose: true,
        ..Default::default()
    };
    let mut pass = true;
    let mut parts = Vec::new();
    for sigma in [c64(0.0, 0.0), c64(0.5, 0.0), c64(0.0, 0.3)] {
        let s = SigmaSchedule::constant(sigma);
        let c: Vec<f64> = [1000usize, 10_000]
            .iter()
            .map(|&n| {
                run_implosion(&g, &s, c64(-0.5, 0.0), n, &opts)
                    .ok()
                    .and_then(|r| r.residual_stats)
                    .map_or(f64::INFINITY, |st| st.march_constant)
            })
            .collect();
        pass &= c[1] <= 50.0 && c[1] <= 2.0 * c[0].max(1e-3);
        parts.push(format!("sigma={sigma}: {:.3} -> {:.3}", c[0], c[1]));
    }
    Outcome::new(pass, parts.join(", "))
}

/// Bounded sequences with a known Cesaro limit.
fn cesaro_family(rng: &mut ChaCha8Rng, n: usize) -> (Vec<Complex64>, Complex64) {
    let mut unit = || c64(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    let limit = unit();
    let amp = unit();
    let kind = rng.random_range(0..3);
    let b = match kind {
        0 => {
            let period = rng.random_range(2..=40);
            let mut cycle: Vec<Complex64> = (0..period).map(|_| c64(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
            let mean = cycle.iter().sum::<Complex64>() / period as f64;
            cycle.iter_mut().for_each(|c| *c += limit - mean);
            (0..n).map(|k| cycle[k % period]).collect()
        }
        1 => {
            let theta: f64 = rng.random_range(0.01..0.99);
            (0..n).map(|k| limit + amp * Complex64::from_polar(1.0, TAU * theta * k as f64)).collect()
        }
        _ => {
            let gamma: f64 = rng.random_range(1.0..2.0);
            (0..n).map(|k| limit + amp * ((k + 1) as f64).powf(-gamma)).collect()
        }
    };
    (b, limit)
}

fn weighted_cesaro() -> Outcome {
    let n = 10_000;
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let (b, limit) = cesaro_family(&mut rng, n);
        // direct sum, independent of the library's averaging routine
        let avg = b
            .iter()
            .enumerate()
            .map(|(k, &bk)| bk * weight_g((k + 1) as f64 / n as f64))
            .sum::<Complex64>()
            / n as f64;
        let lib = lavaurs_core::schedule::weighted_average(&b, &lavaurs_core::schedule::UniversalWeight);
        worst = worst.max((avg - limit).norm()).max((lib - limit).norm());
    }
    Outcome::new(worst <= 1e-2, format!("max |avg - L| = {worst:.2e} over 1000 sequences"))
}

fn renderer() -> Outcome {
    let q = Germ::quadratic();
    let grid = GridSpec::default_window(512);
    let opts = LavaursRenderOptions {
        u: c64(0.5, 0.0),
        ..Default::default()
    };
    let start = Instant::now();
    let a = render_julia_lavaurs(&q, &grid, &opts).unwrap();
    let b = render_julia_lavaurs(&q, &grid, &opts).unwrap();
    let j = render_julia(&q, &grid, opts.julia_iter).unwrap();
    let identical = a.to_ppm() == b.to_ppm();
    let j_pixels = j.count(Label::JuliaNear);
    let contained = j
        .labels
        .iter()
        .zip(&a.labels)
        .all(|(&x, &y)| x != Label::JuliaNear || y == Label::LavaursHit);
    Outcome::new(
        identical && contained && j_pixels > 0,
        format!(
            "byte-identical={identical}, J pixels {j_pixels} all hit={contained}, hits {} ({:.1?})",
            a.count(Label::LavaursHit),
            start.elapsed()
        ),
    )
}

type Target = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let strict = std::env::args().any(|a| a == "--strict");
    let filter: Option<String> = std::env::args()
        .skip(1)
        .find(|a| !a.starts_with("--"));
    let targets: [Target; 12] = [
        ("abel-residual", abel_residual),
        ("geometric-identity", geometric_identity),
        ("convergence", convergence),
        ("phase-sum-identity", phase_sum_identity),
        ("skew-product", skew_product),
        ("symmetric-pair", symmetric_pair),
        ("random-schedules", random_schedules),
        ("ergodic-schedule", ergodic_schedule),
        ("drift-exponent", drift_exponent),
        ("linear-march", linear_march),
        ("weighted-cesaro", weighted_cesaro),
        ("renderer", renderer),
    ];
    let mut failed = false;
    for (i, (name, f)) in targets.iter().enumerate() {
        if filter.as_ref().is_some_and(|p| !name.contains(p.as_str())) {
            continue;
        }
        let o = f();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        let note = if !o.pass && o.known_limit { " [known limit]" } else { "" };
        println!("{tag} {:>2} {name}{note}: {}", i + 1, o.detail);
        if !o.pass && (strict || !o.known_limit || !o.core_ok) {
            failed = true;
        }
    }
    if failed {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
