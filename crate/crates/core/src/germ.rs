//! Parabolic germs `f(w) = w + w^2 + a w^3 + ...`, petals, basin entry and
//! autonomous / non-autonomous orbits.

use std::io::Write;

use num_complex::{Complex, Complex64};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::implosion::StepDiagnostic;
use crate::precision::{lift, lower, Real};
use crate::schedule::{ScheduleError, SigmaSchedule};

/// Default Taylor degree for truncated germs.
pub const DEFAULT_DEGREE: usize = 15;
/// Default radius of validity for truncated evaluation.
pub const DEFAULT_EVAL_RADIUS: f64 = 0.5;
/// Default attracting petal radius for the normalized family.
pub const DEFAULT_PETAL_RADIUS: f64 = 0.25;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GermError {
    #[error("germ has no coefficients; expected at least c2 = 1")]
    Empty,
    #[error("germ is not normalized: c2 = {0}, expected exactly 1")]
    NotNormalized(Complex64),
    #[error("eval_radius must be positive, got {0}")]
    BadRadius(f64),
    #[error("coefficient c{index} is not finite")]
    NonFinite { index: usize },
    #[error("|w| = {modulus} exceeds eval_radius {radius}")]
    OutOfRange { modulus: f64, radius: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GermForm {
    /// `w + sum_{j=2..D} c_j w^j`, exact when the germ is a genuine polynomial.
    Taylor,
    /// The closed form `w / (1 - w)`, whose Fatou coordinates are both `-1/w`.
    Geometric,
}

/// A normalized parabolic germ.
#[derive(Debug, Clone, PartialEq)]
pub struct Germ {
    form: GermForm,
    // c2, c3, ..., cD
    coeffs: Vec<Complex64>,
    a: Complex64,
    eval_radius: f64,
}

impl Germ {
    /// Validates a coefficient list `[c2, c3, ..., cD]` with `c2 == 1` exactly.
    pub fn new(coeffs: Vec<Complex64>, eval_radius: f64) -> Result<Self, GermError> {
        let first = *coeffs.first().ok_or(GermError::Empty)?;
        if first != Complex64::new(1.0, 0.0) {
            return Err(GermError::NotNormalized(first));
        }
        if !(eval_radius > 0.0) {
            return Err(GermError::BadRadius(eval_radius));
        }
        if let Some(i) = coeffs.iter().position(|c| !c.is_finite()) {
            return Err(GermError::NonFinite { index: i + 2 });
        }
        let a = coeffs.get(1).copied().unwrap_or_default();
        Ok(Germ {
            form: GermForm::Taylor,
            coeffs,
            a,
            eval_radius,
        })
    }

    /// A genuine polynomial germ; evaluation is exact everywhere.
    pub fn polynomial(coeffs: Vec<Complex64>) -> Result<Self, GermError> {
        Germ::new(coeffs, f64::INFINITY)
    }

    /// `w + w^2`.
    pub fn quadratic() -> Self {
        Germ::polynomial(vec![Complex64::new(1.0, 0.0)]).expect("valid")
    }

    /// Exact `w / (1 - w)`.
    pub fn geometric() -> Self {
        Germ {
            form: GermForm::Geometric,
            coeffs: vec![Complex64::new(1.0, 0.0); DEFAULT_DEGREE - 1],
            a: Complex64::new(1.0, 0.0),
            eval_radius: f64::INFINITY,
        }
    }

    /// Taylor truncation of `w / (1 - w)` at degree `degree`.
    pub fn geometric_truncated(degree: usize, eval_radius: f64) -> Result<Self, GermError> {
        Germ::new(
            vec![Complex64::new(1.0, 0.0); degree.max(2) - 1],
            eval_radius,
        )
    }

    pub fn form(&self) -> GermForm {
        self.form
    }

    /// `[c2, ..., cD]`.
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// The cubic coefficient `a`.
    pub fn a(&self) -> Complex64 {
        self.a
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() + 1
    }

    pub fn eval_radius(&self) -> f64 {
        self.eval_radius
    }

    pub fn is_polynomial(&self) -> bool {
        self.form == GermForm::Taylor && self.eval_radius.is_infinite()
    }

    /// Taylor coefficient `c_j` for `j >= 2` (zero past the truncation).
    pub fn taylor_coefficient(&self, j: usize) -> Complex64 {
        match self.form {
            GermForm::Geometric if j >= 2 => Complex64::new(1.0, 0.0),
            _ if j >= 2 => self.coeffs.get(j - 2).copied().unwrap_or_default(),
            _ if j == 1 => Complex64::new(1.0, 0.0),
            _ => Complex64::default(),
        }
    }

    /// Radius beyond which an orbit is declared escaped.
    ///
    /// Truncated germs use `eval_radius`. Polynomials use a bound `R` with
    /// `|f(w)| > 2|w|` whenever `|w| > R`, so orbits past it diverge.
    pub fn escape_radius(&self) -> f64 {
        match self.form {
            GermForm::Geometric => f64::INFINITY,
            GermForm::Taylor if self.eval_radius.is_finite() => self.eval_radius,
            GermForm::Taylor => {
                let lead = self.coeffs.last().map(|c| c.norm()).unwrap_or(0.0);
                if lead == 0.0 {
                    return f64::INFINITY;
                }
                let rest: f64 =
                    1.0 + self.coeffs[..self.coeffs.len() - 1].iter().map(|c| c.norm()).sum::<f64>();
                ((2.0 + rest) / lead).max(2.0)
            }
        }
    }

    /// `f(w)`, checking the radius of validity.
    pub fn evaluate(&self, w: Complex64) -> Result<Complex64, GermError> {
        self.evaluate_in(w)
    }

    pub fn evaluate_in<T: Real>(&self, w: Complex<T>) -> Result<Complex<T>, GermError> {
        self.check_radius(w)?;
        if self.form == GermForm::Geometric && lower(w).norm() >= 0.5 {
            // Moebius form away from 0; the pole goes to a huge finite value
            // whose image is -1 to working precision
            let one = Complex::new(T::one(), T::zero());
            let mut den = one - w;
            if den.re == T::zero() && den.im == T::zero() {
                den = Complex::new(T::from_f64(1e-150), T::zero());
            }
            return Ok(w / den);
        }
        Ok(w + self.displacement_in(w))
    }

    /// `f(w) - w`, computed without cancellation and without a radius check.
    pub fn displacement_in<T: Real>(&self, w: Complex<T>) -> Complex<T> {
        match self.form {
            GermForm::Taylor => {
                let mut acc = Complex::new(T::zero(), T::zero());
                for c in self.coeffs.iter().rev() {
                    acc = acc * w + lift::<T>(*c);
                }
                acc * w * w
            }
            GermForm::Geometric => {
                let one = Complex::new(T::one(), T::zero());
                w * w / (one - w)
            }
        }
    }

    pub fn displacement(&self, w: Complex64) -> Complex64 {
        self.displacement_in(w)
    }

    /// `f(w) + eps^2`.
    pub fn perturbed_step(&self, w: Complex64, eps: Complex64) -> Result<Complex64, GermError> {
        self.perturbed_step_in(w, eps)
    }

    pub fn perturbed_step_in<T: Real>(
        &self,
        w: Complex<T>,
        eps: Complex<T>,
    ) -> Result<Complex<T>, GermError> {
        Ok(self.evaluate_in(w)? + eps * eps)
    }

    fn check_radius<T: Real>(&self, w: Complex<T>) -> Result<(), GermError> {
        let z = lower(w);
        let modulus = z.norm();
        if modulus.is_nan() || modulus > self.escape_radius_for_eval() {
            return Err(GermError::OutOfRange {
                modulus,
                radius: self.eval_radius,
            });
        }
        Ok(())
    }

    fn escape_radius_for_eval(&self) -> f64 {
        if self.form == GermForm::Geometric {
            f64::INFINITY
        } else {
            self.eval_radius
        }
    }

    /// Checks forward invariance of the attracting petal of radius `r` by
    /// sampling `samples` points on a circle just inside its boundary.
    pub fn validate_petal(&self, r: f64, samples: usize) -> Result<(), PetalViolation> {
        let petal = Petal::attracting(r);
        for i in 0..samples {
            let t = std::f64::consts::TAU * (i as f64 + 0.5) / samples as f64;
            let w = Complex64::new(-r, 0.0) + Complex64::from_polar(r * (1.0 - 1e-9), t);
            match self.evaluate(w) {
                Ok(fw) if petal.contains(fw) => {}
                Ok(fw) => return Err(PetalViolation { point: w, image: Some(fw) }),
                Err(_) => return Err(PetalViolation { point: w, image: None }),
            }
        }
        Ok(())
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
#[error("attracting petal not forward invariant: f({point}) = {image:?}")]
pub struct PetalViolation {
    pub point: Complex64,
    pub image: Option<Complex64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PetalKind {
    Attracting,
    Repelling,
}

/// Open disk `{|w + r| < r}` (attracting) or `{|w - r| < r}` (repelling).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Petal {
    pub kind: PetalKind,
    pub r: f64,
}

impl Petal {
    pub fn attracting(r: f64) -> Self {
        Petal {
            kind: PetalKind::Attracting,
            r,
        }
    }

    pub fn repelling(r: f64) -> Self {
        Petal {
            kind: PetalKind::Repelling,
            r,
        }
    }

    pub fn contains(&self, w: Complex64) -> bool {
        let center = match self.kind {
            PetalKind::Attracting => -self.r,
            PetalKind::Repelling => self.r,
        };
        (w - center).norm() < self.r
    }
}

/// Outcome of [`basin_entry`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasinOutcome {
    /// First `m` with `f^m(w0)` in the attracting petal.
    Entered(usize),
    /// The orbit left the escape radius at this iterate.
    Escaped(usize),
    /// Neither happened within `max_iter`.
    Undecided,
}

impl BasinOutcome {
    pub fn entry(self) -> Option<usize> {
        match self {
            BasinOutcome::Entered(m) => Some(m),
            _ => None,
        }
    }

    pub fn escaped(self) -> bool {
        matches!(self, BasinOutcome::Escaped(_))
    }
}

/// Smallest `m <= max_iter` with `f^m(w0)` in the attracting petal of radius `r`.
pub fn basin_entry(g: &Germ, w0: Complex64, r: f64, max_iter: usize) -> BasinOutcome {
    let petal = Petal::attracting(r);
    let escape = g.escape_radius();
    let mut w = w0;
    for m in 0..=max_iter {
        if petal.contains(w) {
            return BasinOutcome::Entered(m);
        }
        if !(w.norm() <= escape) {
            return BasinOutcome::Escaped(m);
        }
        if m == max_iter {
            break;
        }
        w = match g.evaluate(w) {
            Ok(v) => v,
            Err(_) => return BasinOutcome::Escaped(m + 1),
        };
    }
    BasinOutcome::Undecided
}

/// `f^m(w)` for `m` steps, stopping with an error on escape.
pub fn iterate(g: &Germ, w: Complex64, m: usize) -> Result<Complex64, GermError> {
    (0..m).try_fold(w, |w, _| g.evaluate(w))
}

/// A recorded non-autonomous orbit `w_0, ..., w_N`.
#[derive(Debug, Clone)]
pub struct OrbitTrace<T: Real = f64> {
    pub points: Vec<Complex<T>>,
    /// Ambient scale `n` of the schedule.
    pub n: usize,
    /// First index inside the default attracting petal.
    pub entered_petal_at: Option<usize>,
    /// Index of the step whose evaluation failed (outside the radius of
    /// validity or overflow), if any; the trace then ends at the last valid
    /// point.
    pub escaped_at: Option<usize>,
    pub diagnostics: Option<Vec<StepDiagnostic>>,
}

impl<T: Real> OrbitTrace<T> {
    pub fn is_complete(&self) -> bool {
        self.escaped_at.is_none() && self.points.len() == self.n + 1
    }

    pub fn last(&self) -> Complex<T> {
        *self.points.last().expect("trace always holds w0")
    }

    pub fn points_f64(&self) -> Vec<Complex64> {
        self.points.iter().map(|&p| lower(p)).collect()
    }

    /// CSV with columns `k,re,im` plus diagnostic columns when present.
    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut wtr = csv::Writer::from_writer(out);
        let diag = self.diagnostics.as_deref().unwrap_or(&[]);
        let mut header = vec!["k", "re", "im"];
        if !diag.is_empty() {
            header.extend(StepDiagnostic::CSV_COLUMNS);
        }
        wtr.write_record(&header)?;
        let mut di = diag.iter().peekable();
        for (k, p) in self.points.iter().enumerate() {
            let p = lower(*p);
            let mut row = vec![k.to_string(), fmt_f(p.re), fmt_f(p.im)];
            if !diag.is_empty() {
                match di.peek() {
                    Some(d) if d.k == k => {
                        row.extend(d.csv_fields());
                        di.next();
                    }
                    _ => row.extend(std::iter::repeat_n(String::new(), StepDiagnostic::CSV_COLUMNS.len())),
                }
            }
            wtr.write_record(&row)?;
        }
        wtr.flush()?;
        Ok(())
    }
}

pub(crate) fn fmt_f(x: f64) -> String {
    format!("{x:.17e}")
}

#[derive(Debug, Error)]
pub enum OrbitError {
    #[error("n must be at least 1")]
    ZeroSteps,
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
}

/// Runs `w_{k+1} = f(w_k) + eps_{k,n}^2` for `k = 0..n-1`.
pub fn nonautonomous_orbit(
    g: &Germ,
    w0: Complex64,
    s: &SigmaSchedule,
    n: usize,
) -> Result<OrbitTrace<f64>, OrbitError> {
    nonautonomous_orbit_in::<f64>(g, lift(w0), s, n)
}

pub fn nonautonomous_orbit_in<T: Real>(
    g: &Germ,
    w0: Complex<T>,
    s: &SigmaSchedule,
    n: usize,
) -> Result<OrbitTrace<T>, OrbitError> {
    if n == 0 {
        return Err(OrbitError::ZeroSteps);
    }
    let petal = Petal::attracting(DEFAULT_PETAL_RADIUS);
    let mut points = Vec::with_capacity(n + 1);
    points.push(w0);
    let mut entered = petal.contains(lower(w0)).then_some(0);
    let mut escaped_at = None;
    let mut w = w0;
    for k in 0..n {
        let eps = s.epsilon_in::<T>(k, n)?;
        match g.perturbed_step_in(w, eps) {
            Ok(next) if lower(next).is_finite() => {
                w = next;
                points.push(w);
                if entered.is_none() && petal.contains(lower(w)) {
                    entered = Some(k + 1);
                }
            }
            _ => {
                escaped_at = Some(k + 1);
                break;
            }
        }
    }
    Ok(OrbitTrace {
        points,
        n,
        entered_petal_at: entered,
        escaped_at,
        diagnostics: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::precision::DoubleDouble;
    use num_complex::c64;
    use rand::{Rng, SeedableRng};
    use std::f64::consts::PI;

    #[test]
    fn minimal_normal_form() {
        let g = Germ::new(vec![c64(1.0, 0.0)], 0.5).unwrap();
        assert_eq!(g.a(), c64(0.0, 0.0));
        assert_eq!(g.degree(), 2);
    }

    #[test]
    fn geometric_coefficients_give_unit_cubic_term() {
        let g = Germ::geometric_truncated(30, 0.5).unwrap();
        assert_eq!(g.a(), c64(1.0, 0.0));
        assert_eq!(g.degree(), 30);
    }

    #[test]
    fn rejects_unnormalized_and_bad_radius() {
        assert_eq!(
            Germ::new(vec![c64(0.5, 0.0)], 0.5),
            Err(GermError::NotNormalized(c64(0.5, 0.0)))
        );
        assert_eq!(Germ::new(vec![], 0.5), Err(GermError::Empty));
        assert!(matches!(Germ::new(vec![c64(1.0, 0.0)], 0.0), Err(GermError::BadRadius(_))));
        assert!(matches!(Germ::new(vec![c64(1.0, 0.0)], -1.0), Err(GermError::BadRadius(_))));
    }

    #[test]
    fn evaluate_examples() {
        let g = Germ::quadratic();
        assert_eq!(g.evaluate(c64(0.0, 0.0)).unwrap(), c64(0.0, 0.0));
        assert_eq!(g.evaluate(c64(-0.5, 0.0)).unwrap(), c64(-0.25, 0.0));

        let geo = Germ::geometric_truncated(30, 0.5).unwrap();
        let v = geo.evaluate(c64(0.1, 0.0)).unwrap();
        assert!((v - c64(0.1 / 0.9, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn exact_geometric_steps_over_its_pole() {
        let g = Germ::geometric();
        let v = g.evaluate(c64(1.0, 0.0)).unwrap();
        let back = g.evaluate(v).unwrap();
        assert!((back - c64(-1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn evaluate_outside_radius_is_an_error() {
        let g = Germ::new(vec![c64(1.0, 0.0)], 0.5).unwrap();
        assert!(matches!(g.evaluate(c64(0.6, 0.0)), Err(GermError::OutOfRange { .. })));
    }

    #[test]
    fn perturbed_step_examples() {
        let g = Germ::quadratic();
        let v = g.perturbed_step(c64(0.0, 0.0), c64(PI / 10.0, 0.0)).unwrap();
        assert!((v - c64(PI * PI / 100.0, 0.0)).norm() < 1e-15);
        assert_eq!(g.perturbed_step(c64(-0.5, 0.0), c64(0.0, 0.0)).unwrap(), c64(-0.25, 0.0));
        let eps = PI / 100.0;
        let v = g.perturbed_step(c64(-0.5, 0.0), c64(eps, 0.0)).unwrap();
        // direct arithmetic
        let expect = -0.5 + 0.25 + eps * eps;
        assert!((v.re - expect).abs() < 1e-16 && v.im == 0.0);
        assert!((v.re - (-0.25 + PI * PI / 1e4)).abs() < 1e-15);
    }

    #[test]
    fn petal_membership() {
        let at = Petal::attracting(0.25);
        assert!(at.contains(c64(-0.25, 0.0)));
        assert!(!at.contains(c64(0.0, 0.0)));
        assert!(Petal::repelling(0.25).contains(c64(0.25, 0.0)));
        assert!(!Petal::repelling(0.25).contains(c64(-0.1, 0.0)));
    }

    #[test]
    fn basin_entry_examples() {
        let g = Germ::quadratic();
        assert_eq!(basin_entry(&g, c64(-0.1, 0.0), 0.25, 100), BasinOutcome::Entered(0));
        assert!(basin_entry(&g, c64(0.5, 0.0), 0.25, 1000).escaped());

        // brute-force oracle: iterate and test the disk directly
        let mut w = c64(-0.9, 0.0);
        let mut m = 0;
        while (w + 0.25).norm() >= 0.25 {
            w = w + w * w;
            m += 1;
        }
        assert_eq!(basin_entry(&g, c64(-0.9, 0.0), 0.25, 100), BasinOutcome::Entered(m));
        assert!(m > 0);
    }

    #[test]
    fn basin_entry_escape_and_undecided_are_distinct() {
        let g = Germ::quadratic();
        // 0.01 creeps upward slowly under w + w^2
        assert_eq!(basin_entry(&g, c64(0.01, 0.0), 0.25, 5), BasinOutcome::Undecided);
        assert!(matches!(basin_entry(&g, c64(0.01, 0.0), 0.25, 10_000), BasinOutcome::Escaped(_)));
    }

    #[test]
    fn basin_entry_shifts_by_one_under_f() {
        let g = Germ::quadratic();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..500 {
            let w0 = c64(rng.random_range(-1.2..0.3), rng.random_range(-0.8..0.8));
            if let BasinOutcome::Entered(m) = basin_entry(&g, w0, 0.25, 10_000) {
                let fw = g.evaluate(w0).unwrap();
                assert_eq!(
                    basin_entry(&g, fw, 0.25, 10_000),
                    BasinOutcome::Entered(m.saturating_sub(1))
                );
            }
        }
    }

    #[test]
    fn attracting_petal_is_forward_invariant_for_quadratic() {
        let g = Germ::quadratic();
        g.validate_petal(0.25, 4096).unwrap();
        let petal = Petal::attracting(0.25);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let mut checked = 0;
        while checked < 10_000 {
            let w = c64(rng.random_range(-0.5..0.0), rng.random_range(-0.25..0.25));
            if !petal.contains(w) {
                continue;
            }
            assert!(petal.contains(g.evaluate(w).unwrap()), "{w}");
            checked += 1;
        }
    }

    #[test]
    fn unperturbed_schedule_unrolls_to_definition() {
        let g = Germ::quadratic();
        let s = SigmaSchedule::constant(c64(0.0, 0.0));
        let n = 50;
        let trace = nonautonomous_orbit(&g, c64(-0.5, 0.0), &s, n).unwrap();
        assert!(trace.is_complete());
        for k in 0..n {
            let eps = s.epsilon(k, n).unwrap();
            assert_eq!(eps, c64(PI / n as f64, 0.0));
            let expect = g.evaluate(trace.points[k]).unwrap() + eps * eps;
            // stored values are exactly what was computed
            assert_eq!(trace.points[k + 1], expect);
        }
    }

    #[test]
    fn single_step_orbit() {
        let g = Germ::quadratic();
        let s = SigmaSchedule::constant(c64(0.0, 0.0));
        let trace = nonautonomous_orbit(&g, c64(-0.5, 0.0), &s, 1).unwrap();
        assert!((trace.points[1] - c64(-0.25 + PI * PI, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn escaping_orbit_keeps_partial_trace() {
        let g = Germ::new(vec![c64(1.0, 0.0)], 0.5).unwrap();
        let s = SigmaSchedule::constant(c64(0.0, 0.0));
        let trace = nonautonomous_orbit(&g, c64(0.4, 0.0), &s, 10).unwrap();
        assert!(!trace.is_complete());
        let at = trace.escaped_at.unwrap();
        assert_eq!(trace.points.len(), at);
    }

    #[test]
    fn double_double_orbit_tracks_double_orbit() {
        let g = Germ::quadratic();
        let s = SigmaSchedule::constant(c64(0.5, 0.0));
        let n = 1000;
        let a = nonautonomous_orbit(&g, c64(-0.5, 0.0), &s, n).unwrap();
        let b = nonautonomous_orbit_in::<DoubleDouble>(&g, lift(c64(-0.5, 0.0)), &s, n).unwrap();
        let diff = (a.last() - lower(b.last())).norm();
        // f64 rounding is amplified through the eggbeater; ~2e-9 at n = 1000
        assert!(diff < 1e-7, "{diff}");
    }

    #[test]
    fn trace_csv_has_header_and_rows() {
        let g = Germ::quadratic();
        let s = SigmaSchedule::constant(c64(0.0, 0.0));
        let trace = nonautonomous_orbit(&g, c64(-0.5, 0.0), &s, 3).unwrap();
        let mut buf = Vec::new();
        trace.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], "k,re,im");
        assert_eq!(lines.len(), 5);
        assert!(lines[1].starts_with("0,-5.0"));
    }

    #[test]
    fn polynomial_escape_radius_is_rigorous() {
        let g = Germ::polynomial(vec![c64(1.0, 0.0), c64(0.01, 0.0)]).unwrap();
        let r = g.escape_radius();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..1000 {
            let w = Complex64::from_polar(r * rng.random_range(1.0..3.0), rng.random_range(0.0..6.3));
            assert!(g.evaluate(w).unwrap().norm() > 2.0 * w.norm() - 1e-9);
        }
    }
}
