//! Non-autonomous implosion experiments and the coordinate instrumentation
//! used to follow an orbit through the eggbeater.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::{Complex, Complex64};
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::fatou::{FatouError, FatouSolver};
use crate::germ::{
    basin_entry, fmt_f, nonautonomous_orbit_in, BasinOutcome, Germ, OrbitError, OrbitTrace,
    DEFAULT_PETAL_RADIUS,
};
use crate::precision::{lift, lower, DoubleDouble, Precision, Real};
use crate::schedule::{phase, ScheduleError, SigmaSchedule};

/// Default window exponent, `k_n = floor(n^beta)`.
pub const DEFAULT_BETA: f64 = 0.6;
/// Iterates allowed for the basin pre-check of `w0`.
pub const BASIN_CHECK_ITER: usize = 100_000;

#[derive(Debug, Error)]
pub enum ImplosionError {
    #[error("beta must lie in (1/2, 2/3), got {0}")]
    InvalidBeta(f64),
    #[error("n must be at least 4, got {0}")]
    InvalidN(usize),
    #[error("{0} is a pole of the coordinate")]
    Pole(Complex64),
    #[error("{0} is an integer, where the coordinate is singular")]
    IntegerArgument(Complex64),
    #[error("Newton inversion of chi failed at {0}")]
    NewtonFailed(Complex64),
    #[error("w0 = {0} is not in the parabolic basin")]
    NotInBasin(Complex64),
    #[error("orbit escaped at step {index} of {n}")]
    Escaped { index: usize, n: usize },
    #[error("base orbit of z0 = {0} does not converge to 0")]
    BaseNotInBasin(Complex64),
    #[error(transparent)]
    Orbit(#[from] OrbitError),
    #[error(transparent)]
    Fatou(#[from] FatouError),
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
}

fn cot(z: Complex64) -> Complex64 {
    z.cos() / z.sin()
}

fn is_integer(w: Complex64) -> bool {
    w.im == 0.0 && w.re.fract() == 0.0
}

/// The perturbed fixed points `zeta^+-`, the window `k_n` and the
/// coordinates `psi`, `chi`, `phi = chi o psi` at scale `n`.
#[derive(Debug, Clone)]
pub struct CoordinateFrame {
    germ: Germ,
    n: usize,
    beta: f64,
    k_n: usize,
    zeta_plus: Complex64,
    zeta_minus: Complex64,
    cube_ratio: f64,
    log_ratio: f64,
}

impl CoordinateFrame {
    pub fn new(germ: &Germ, n: usize, beta: f64) -> Result<Self, ImplosionError> {
        if !(beta > 0.5 && beta < 2.0 / 3.0) {
            return Err(ImplosionError::InvalidBeta(beta));
        }
        if n < 4 {
            return Err(ImplosionError::InvalidN(n));
        }
        let nf = n as f64;
        let k_n = (nf.powf(beta).floor() as usize).clamp(1, n / 2);
        let a = germ.a();
        let shift = a * (PI * PI / (2.0 * nf * nf));
        let kf = k_n as f64;
        Ok(CoordinateFrame {
            germ: germ.clone(),
            n,
            beta,
            k_n,
            zeta_plus: Complex64::new(0.0, PI / nf) + shift,
            zeta_minus: Complex64::new(0.0, -PI / nf) + shift,
            cube_ratio: kf.powi(3) / (nf * nf),
            log_ratio: nf * (nf / kf).ln() / (kf * kf),
        })
    }

    pub fn germ(&self) -> &Germ {
        &self.germ
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn k_n(&self) -> usize {
        self.k_n
    }

    pub fn zeta_plus(&self) -> Complex64 {
        self.zeta_plus
    }

    pub fn zeta_minus(&self) -> Complex64 {
        self.zeta_minus
    }

    /// `(k_n^3 / n^2, n log(n/k_n) / k_n^2)`, both tending to 0.
    pub fn window_ratios(&self) -> (f64, f64) {
        (self.cube_ratio, self.log_ratio)
    }

    /// `psi(w) = (1/2 pi i) log((w - zeta+)/(w - zeta-))`, taken with the
    /// argument in `(0, 2 pi]` so the real axis lands in `(0, 1)`.
    pub fn psi(&self, w: Complex64) -> Result<Complex64, ImplosionError> {
        if w == self.zeta_plus || w == self.zeta_minus {
            return Err(ImplosionError::Pole(w));
        }
        let ratio = (w - self.zeta_plus) / (self.zeta_minus - w);
        Ok(0.5 + ratio.ln() / Complex64::new(0.0, 2.0 * PI))
    }

    /// `psi^{-1}(W) = -(pi/n) cot(pi W) + a pi^2/(2 n^2)`.
    pub fn psi_inverse(&self, w: Complex64) -> Result<Complex64, ImplosionError> {
        if is_integer(w) {
            return Err(ImplosionError::IntegerArgument(w));
        }
        let nf = self.n as f64;
        Ok(-(PI / nf) * cot(PI * w) + self.germ.a() * (PI * PI / (2.0 * nf * nf)))
    }

    /// `chi(W) = W - (1-a)/n log sin(pi W)`.
    pub fn chi(&self, w: Complex64) -> Result<Complex64, ImplosionError> {
        let s = (PI * w).sin();
        if is_integer(w) || s == Complex64::default() {
            return Err(ImplosionError::IntegerArgument(w));
        }
        Ok(w - (1.0 - self.germ.a()) / self.n as f64 * s.ln())
    }

    /// Newton inverse of `chi`, seeded at `W`.
    pub fn chi_inverse(&self, target: Complex64) -> Result<Complex64, ImplosionError> {
        let c = (1.0 - self.germ.a()) / self.n as f64;
        let mut u = target;
        for _ in 0..60 {
            let step = (self.chi(u)? - target) / (1.0 - c * PI * cot(PI * u));
            u -= step;
            if !u.is_finite() {
                break;
            }
            if step.norm() <= 1e-15 * (1.0 + u.norm()) {
                return Ok(u);
            }
        }
        Err(ImplosionError::NewtonFailed(target))
    }

    pub fn phi(&self, w: Complex64) -> Result<Complex64, ImplosionError> {
        self.chi(self.psi(w)?)
    }

    pub fn phi_inverse(&self, target: Complex64) -> Result<Complex64, ImplosionError> {
        self.psi_inverse(self.chi_inverse(target)?)
    }

    /// Open rectangle `Re W in (k_n/10n, 1 - k_n/10n)`, `|Im W| < 1`.
    pub fn in_rn(&self, w: Complex64) -> bool {
        let margin = self.k_n as f64 / (10.0 * self.n as f64);
        w.re > margin && w.re < 1.0 - margin && w.im.abs() < 1.0
    }

    /// `H_{k,n}(w) = delta_k/(2 i pi n^3) (1/(w - zeta+) - 1/(w - zeta-))`
    /// with `delta_k = 2 pi^2 sigma_k`.
    pub fn h_value(&self, sigma_k: Complex64, w: Complex64) -> Result<Complex64, ImplosionError> {
        if w == self.zeta_plus || w == self.zeta_minus {
            return Err(ImplosionError::Pole(w));
        }
        let nf = self.n as f64;
        let delta = 2.0 * PI * PI * sigma_k;
        let diff = (w - self.zeta_plus).inv() - (w - self.zeta_minus).inv();
        Ok(delta / Complex64::new(0.0, 2.0 * PI * nf.powi(3)) * diff)
    }

    /// `n sum_k H_{k,n}(-(pi/n) cot((k+1) pi/n))`; the `k = n-1` term is 0.
    pub fn phase_sum(&self, s: &SigmaSchedule) -> Result<Complex64, ImplosionError> {
        let nf = self.n as f64;
        let mut acc = Complex64::default();
        for k in 0..self.n - 1 {
            let theta = (k + 1) as f64 * PI / nf;
            let w = Complex64::new(-(PI / nf) / theta.tan(), 0.0);
            acc += self.h_value(s.sigma(k, self.n)?, w)?;
        }
        Ok(acc * nf)
    }
}

/// `f_k(zeta^+-) - zeta^+-` against the prediction `delta_k / n^3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DriftReport {
    pub plus: Complex64,
    pub minus: Complex64,
    pub predicted: Complex64,
    /// `max(|plus - predicted|, |minus - predicted|)`.
    pub residual: f64,
}

/// Evaluates the drift in double-double, where the `1/n^2` terms cancel.
pub fn fixed_point_drift(
    fr: &CoordinateFrame,
    s: &SigmaSchedule,
    k: usize,
) -> Result<DriftReport, ImplosionError> {
    type D = DoubleDouble;
    let n = D::from_f64(fr.n as f64);
    let pi = D::PI;
    let a: Complex<D> = lift(fr.germ.a());
    let shift = a * (pi * pi / (D::from_f64(2.0) * n * n));
    let eps = s.epsilon_in::<D>(k, fr.n)?;
    let sigma: Complex<D> = lift(s.sigma(k, fr.n)?);
    let predicted = sigma * (D::from_f64(2.0) * pi * pi / (n * n * n));
    let drift = |zeta: Complex<D>| fr.germ.displacement_in(zeta) + eps * eps;
    let plus = drift(Complex::new(D::zero(), pi / n) + shift);
    let minus = drift(Complex::new(D::zero(), -(pi / n)) + shift);
    let residual = lower(plus - predicted).norm().max(lower(minus - predicted).norm());
    Ok(DriftReport {
        plus: lower(plus),
        minus: lower(minus),
        predicted: lower(predicted),
        residual,
    })
}

/// Coordinate readings for one step of a diagnosed orbit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StepDiagnostic {
    pub k: usize,
    /// `U_k = psi(w_k)`.
    pub u: Complex64,
    /// `W_k = phi(w_k)`.
    pub w: Complex64,
    /// `A_k = U_{k+1} - U_k`.
    pub a_k: Complex64,
    /// `A~_k = W_{k+1} - W_k`.
    pub a_tilde_k: Complex64,
    pub in_rn: bool,
    /// `H_{k,n}(w_{k+1})`.
    pub h_value: Complex64,
    /// `A_k - (1/n - (1-a) w_k/n + H_{k,n}(w_{k+1}))`.
    pub residual_a: Complex64,
    /// `A~_k - (1/n + H_{k,n}(-(pi/n) cot(pi W_{k+1})))`.
    pub residual_tilde: Complex64,
}

impl StepDiagnostic {
    pub const CSV_COLUMNS: [&'static str; 15] = [
        "U_re", "U_im", "W_re", "W_im", "A_re", "A_im", "At_re", "At_im", "in_Rn", "H_re",
        "H_im", "resA_re", "resA_im", "resAt_re", "resAt_im",
    ];

    pub fn csv_fields(&self) -> Vec<String> {
        let mut out = Vec::with_capacity(Self::CSV_COLUMNS.len());
        for z in [self.u, self.w, self.a_k, self.a_tilde_k] {
            out.push(fmt_f(z.re));
            out.push(fmt_f(z.im));
        }
        out.push(u8::from(self.in_rn).to_string());
        for z in [self.h_value, self.residual_a, self.residual_tilde] {
            out.push(fmt_f(z.re));
            out.push(fmt_f(z.im));
        }
        out
    }
}

/// Summary of the diagnosed middle window `k_n <= k <= n - k_n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResidualStats {
    pub max_residual_a: f64,
    pub max_residual_tilde: f64,
    /// `max_j |W_j - W_{k_n} - (j - k_n)/n| n^2 / j`.
    pub march_constant: f64,
    /// `k_n w_{k_n}`, close to -1.
    pub entry_ratio: Complex64,
    /// `k_n w_{n-k_n}`, close to 1.
    pub exit_ratio: Complex64,
    /// `min_k n |w_k - zeta^+-|` over the window.
    pub zeta_separation: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImplosionOptions {
    pub beta: f64,
    /// `None` picks double-double when the expected residual scale
    /// `n^{-1-2 beta}` drops below `10^3 eps n`.
    pub precision: Option<Precision>,
    pub diagnose: bool,
    pub tol: f64,
}

impl Default for ImplosionOptions {
    fn default() -> Self {
        ImplosionOptions {
            beta: DEFAULT_BETA,
            precision: None,
            diagnose: false,
            tol: crate::fatou::DEFAULT_TOL,
        }
    }
}

impl ImplosionOptions {
    pub fn effective_precision(&self, n: usize) -> Precision {
        self.precision.unwrap_or_else(|| {
            let nf = n as f64;
            if nf.powf(-1.0 - 2.0 * self.beta) < 1e3 * f64::EPSILON * nf {
                Precision::DoubleDouble
            } else {
                Precision::Double
            }
        })
    }
}

/// Outcome of one perturbed-orbit experiment.
#[derive(Debug, Clone, Serialize)]
pub struct ImplosionReport {
    pub n: usize,
    pub k_n: usize,
    pub precision: Precision,
    pub u_n: Complex64,
    /// `w_n^{(n)}`.
    pub w_final: Complex64,
    /// `L_{u_n}(w_0)`.
    pub lavaurs_value: Complex64,
    pub error: f64,
    /// First window index with `W_k` outside `R_n`.
    pub rn_exit: Option<usize>,
    /// First window index where `U_k` jumps by more than 1/2.
    pub branch_jump: Option<usize>,
    pub degraded: bool,
    pub residual_stats: Option<ResidualStats>,
    #[serde(skip)]
    pub trace: Option<OrbitTrace<f64>>,
}

fn run_orbit(
    g: &Germ,
    s: &SigmaSchedule,
    w0: Complex64,
    n: usize,
    precision: Precision,
) -> Result<OrbitTrace<f64>, ImplosionError> {
    let trace = match precision {
        Precision::Double => nonautonomous_orbit_in::<f64>(g, w0, s, n)?,
        Precision::DoubleDouble => {
            let t = nonautonomous_orbit_in::<DoubleDouble>(g, lift(w0), s, n)?;
            OrbitTrace {
                points: t.points_f64(),
                n: t.n,
                entered_petal_at: t.entered_petal_at,
                escaped_at: t.escaped_at,
                diagnostics: None,
            }
        }
    };
    if let Some(index) = trace.escaped_at {
        return Err(ImplosionError::Escaped { index, n });
    }
    Ok(trace)
}

/// Window scan: `R_n` exits and branch jumps of `U_k`, plus optional
/// per-step diagnostics.
struct WindowScan {
    rn_exit: Option<usize>,
    branch_jump: Option<usize>,
    diagnostics: Option<(Vec<StepDiagnostic>, ResidualStats)>,
}

fn scan_window(
    fr: &CoordinateFrame,
    s: &SigmaSchedule,
    points: &[Complex64],
    diagnose: bool,
) -> Result<WindowScan, ImplosionError> {
    let n = fr.n;
    let nf = n as f64;
    let k_n = fr.k_n;
    let hi = n - k_n;
    let a = fr.germ.a();
    let mut rn_exit = None;
    let mut branch_jump = None;
    let mut diags = Vec::new();
    let mut max_a: f64 = 0.0;
    let mut max_t: f64 = 0.0;
    let mut march: f64 = 0.0;
    let mut separation = f64::INFINITY;

    let mut u_cur = fr.psi(points[k_n])?;
    let mut w_cur = fr.chi(u_cur)?;
    let w_start = w_cur;
    for k in k_n..=hi {
        if rn_exit.is_none() && !fr.in_rn(w_cur) {
            rn_exit = Some(k);
        }
        if diagnose {
            let j = k as f64;
            march = march.max((w_cur - w_start - (k - k_n) as f64 / nf).norm() * nf * nf / j);
            let wk = points[k];
            separation = separation
                .min(nf * (wk - fr.zeta_plus).norm())
                .min(nf * (wk - fr.zeta_minus).norm());
        }
        if k == hi {
            break;
        }
        let u_next = fr.psi(points[k + 1])?;
        let w_next = fr.chi(u_next)?;
        if branch_jump.is_none() && (u_next - u_cur).norm() > 0.5 {
            branch_jump = Some(k);
        }
        if diagnose {
            let sigma = s.sigma(k, n)?;
            let a_k = u_next - u_cur;
            let a_tilde = w_next - w_cur;
            let h = fr.h_value(sigma, points[k + 1])?;
            let residual_a = a_k - (1.0 / nf - (1.0 - a) * points[k] / nf + h);
            let w_hat = -(PI / nf) * cot(PI * w_next);
            let residual_tilde = a_tilde - (1.0 / nf + fr.h_value(sigma, w_hat)?);
            max_a = max_a.max(residual_a.norm());
            max_t = max_t.max(residual_tilde.norm());
            diags.push(StepDiagnostic {
                k,
                u: u_cur,
                w: w_cur,
                a_k,
                a_tilde_k: a_tilde,
                in_rn: fr.in_rn(w_cur),
                h_value: h,
                residual_a,
                residual_tilde,
            });
        }
        u_cur = u_next;
        w_cur = w_next;
    }
    let diagnostics = diagnose.then(|| {
        let kf = k_n as f64;
        (
            diags,
            ResidualStats {
                max_residual_a: max_a,
                max_residual_tilde: max_t,
                march_constant: march,
                entry_ratio: points[k_n] * kf,
                exit_ratio: points[hi] * kf,
                zeta_separation: separation,
            },
        )
    });
    Ok(WindowScan {
        rn_exit,
        branch_jump,
        diagnostics,
    })
}

/// Runs `n` perturbed steps from `w0` and compares with `L_{u_n}(w_0)`.
pub fn run_implosion(
    g: &Germ,
    s: &SigmaSchedule,
    w0: Complex64,
    n: usize,
    opts: &ImplosionOptions,
) -> Result<ImplosionReport, ImplosionError> {
    let solver = FatouSolver::new(g.clone()).with_tol(opts.tol);
    run_implosion_with(&solver, s, w0, n, opts)
}

/// As [`run_implosion`], reusing a solver.
pub fn run_implosion_with(
    solver: &FatouSolver,
    s: &SigmaSchedule,
    w0: Complex64,
    n: usize,
    opts: &ImplosionOptions,
) -> Result<ImplosionReport, ImplosionError> {
    let g = solver.germ();
    let fr = CoordinateFrame::new(g, n, opts.beta)?;
    match basin_entry(g, w0, DEFAULT_PETAL_RADIUS, BASIN_CHECK_ITER) {
        BasinOutcome::Entered(_) => {}
        _ => return Err(ImplosionError::NotInBasin(w0)),
    }
    let precision = opts.effective_precision(n);
    let mut trace = run_orbit(g, s, w0, n, precision)?;
    let u_n = phase(s, n)?.u_n;
    let lavaurs_value = solver.lavaurs(u_n, w0)?;
    let w_final = *trace.points.last().expect("non-empty trace");
    let scan = scan_window(&fr, s, &trace.points, opts.diagnose)?;
    let (residual_stats, keep_trace) = match scan.diagnostics {
        Some((diags, stats)) => {
            trace.diagnostics = Some(diags);
            (Some(stats), Some(trace))
        }
        None => (None, None),
    };
    Ok(ImplosionReport {
        n,
        k_n: fr.k_n,
        precision,
        u_n,
        w_final,
        lavaurs_value,
        error: (w_final - lavaurs_value).norm(),
        rn_exit: scan.rn_exit,
        branch_jump: scan.branch_jump,
        degraded: scan.rn_exit.is_some() || scan.branch_jump.is_some(),
        residual_stats,
        trace: keep_trace,
    })
}

/// One row of a sweep; failures are kept rather than aborting the sweep.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub n: usize,
    pub label: String,
    pub outcome: Result<ImplosionReport, String>,
}

/// Runs [`run_implosion`] for every `n` in parallel.
pub fn convergence_sweep(
    g: &Germ,
    s: &SigmaSchedule,
    w0: Complex64,
    ns: &[usize],
    opts: &ImplosionOptions,
) -> Vec<SweepRow> {
    let solver = FatouSolver::new(g.clone()).with_tol(opts.tol);
    ns.par_iter()
        .map(|&n| SweepRow {
            n,
            label: String::new(),
            outcome: run_implosion_with(&solver, s, w0, n, opts).map_err(|e| e.to_string()),
        })
        .collect()
}

/// Runs one experiment per labelled schedule at a common `n`.
pub fn ensemble(
    g: &Germ,
    schedules: &[(String, SigmaSchedule)],
    w0: Complex64,
    n: usize,
    opts: &ImplosionOptions,
) -> Vec<SweepRow> {
    let solver = FatouSolver::new(g.clone()).with_tol(opts.tol);
    schedules
        .par_iter()
        .map(|(label, s)| SweepRow {
            n,
            label: label.clone(),
            outcome: run_implosion_with(&solver, s, w0, n, opts).map_err(|e| e.to_string()),
        })
        .collect()
}

pub const SWEEP_COLUMNS: [&str; 15] = [
    "label", "n", "k_n", "precision", "u_re", "u_im", "w_final_re", "w_final_im", "lavaurs_re",
    "lavaurs_im", "error", "rn_exit", "degraded", "max_residual_tilde", "status",
];

/// Writes sweep rows as CSV, preceded by `# <provenance>` when given.
pub fn write_sweep_csv<W: Write>(
    rows: &[SweepRow],
    mut out: W,
    provenance: Option<&str>,
) -> csv::Result<()> {
    if let Some(p) = provenance {
        writeln!(out, "# {p}")?;
    }
    let mut wtr = csv::Writer::from_writer(out);
    wtr.write_record(SWEEP_COLUMNS)?;
    for row in rows {
        let rec: Vec<String> = match &row.outcome {
            Ok(r) => vec![
                row.label.clone(),
                r.n.to_string(),
                r.k_n.to_string(),
                r.precision.to_string(),
                fmt_f(r.u_n.re),
                fmt_f(r.u_n.im),
                fmt_f(r.w_final.re),
                fmt_f(r.w_final.im),
                fmt_f(r.lavaurs_value.re),
                fmt_f(r.lavaurs_value.im),
                fmt_f(r.error),
                r.rn_exit.map(|k| k.to_string()).unwrap_or_default(),
                u8::from(r.degraded).to_string(),
                r.residual_stats
                    .map(|s| fmt_f(s.max_residual_tilde))
                    .unwrap_or_default(),
                if r.degraded { "degraded" } else { "ok" }.to_string(),
            ],
            Err(e) => {
                let mut v = vec![row.label.clone(), row.n.to_string()];
                v.extend(std::iter::repeat_n(String::new(), SWEEP_COLUMNS.len() - 3));
                v.push(format!("failed: {e}"));
                v
            }
        };
        wtr.write_record(&rec)?;
    }
    wtr.flush()?;
    Ok(())
}

/// Result of the skew-product experiment `F(z, w) = (p(z), q(w) + pi^2 z / 4)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PropAResult {
    pub n: usize,
    /// `p^{n^2}(z0)`.
    pub z_start: Complex64,
    /// Second coordinate after `2n + 1` steps.
    pub w_out: Complex64,
    /// Phase of the induced schedule over `N = 2n` steps.
    pub induced_phase: Complex64,
    /// `L_0(w0)` for `q`.
    pub target: Complex64,
    pub error: f64,
}

fn horner(coeffs: &[Complex64], z: Complex<DoubleDouble>) -> Complex<DoubleDouble> {
    // p(z) = z + sum_j coeffs[j] z^{j+2}
    let mut acc = Complex::<DoubleDouble>::zero();
    for c in coeffs.iter().rev() {
        acc = acc * z + lift(*c);
    }
    z + acc * z * z
}

/// Iterates the skew product from `(p^{n^2}(z0), w0)` for `2n + 1` steps.
///
/// `p_coeffs` are the Taylor coefficients of `p` from `z^2` on, the first
/// being `-1`.
pub fn run_prop_a(
    p_coeffs: &[Complex64],
    q: &Germ,
    z0: Complex64,
    w0: Complex64,
    n: usize,
) -> Result<PropAResult, ImplosionError> {
    if p_coeffs.first() != Some(&Complex64::new(-1.0, 0.0)) {
        return Err(ImplosionError::BaseNotInBasin(z0));
    }
    if n == 0 {
        return Err(ImplosionError::InvalidN(n));
    }
    let solver = FatouSolver::new(q.clone());
    let target = solver.lavaurs(Complex64::default(), w0)?;

    let p64 = |z: Complex64| {
        z + p_coeffs
            .iter()
            .rev()
            .fold(Complex64::default(), |acc, c| acc * z + c)
            * z
            * z
    };
    let mut z = z0;
    for _ in 0..n * n {
        z = p64(z);
        if !z.is_finite() || z.norm() > 10.0 {
            return Err(ImplosionError::BaseNotInBasin(z0));
        }
    }
    if z.norm() * (n * n) as f64 > 10.0 {
        return Err(ImplosionError::BaseNotInBasin(z0));
    }
    let z_start = z;

    type D = DoubleDouble;
    let quarter_pi2 = D::PI * D::PI / D::from_f64(4.0);
    let big_n = 2 * n;
    let nf = big_n as f64;
    let mut zd: Complex<D> = lift(z_start);
    let mut w: Complex<D> = lift(w0);
    let mut sigmas = Vec::with_capacity(big_n);
    for j in 0..=big_n {
        if j < big_n {
            let eps = 0.5 * PI * lower(zd).sqrt();
            sigmas.push((eps - PI / nf) * nf * nf / PI);
        }
        w = q.evaluate_in(w).map_err(|_| ImplosionError::Escaped { index: j + 1, n: big_n + 1 })?
            + zd * quarter_pi2;
        zd = horner(p_coeffs, zd);
    }
    let induced = SigmaSchedule::tabulated(sigmas);
    let induced_phase = phase(&induced, big_n)?.u_n;
    let w_out = lower(w);
    Ok(PropAResult {
        n,
        z_start,
        w_out,
        induced_phase,
        target,
        error: (w_out - target).norm(),
    })
}
