//! Perturbation schedules `sigma_{k,n}`, the resulting `eps_{k,n}`, and the
//! limiting phase `u_n = (1/n) sum_k sigma_{k,n} G((k+1)/n)`.

use std::f64::consts::{PI, TAU};
use std::path::Path;
use std::sync::Arc;

use num_complex::{Complex, Complex64};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::precision::{lift, Real};

#[derive(Debug, Error)]
pub enum ScheduleError {
    #[error("index k = {k} outside 0..{n}")]
    KOutOfRange { k: usize, n: usize },
    #[error("tabulated schedule has {len} entries, k = {k} requested")]
    TableTooShort { k: usize, len: usize },
    #[error("schedule values reach {max} which exceeds the declared bound {bound}")]
    BoundViolated { max: f64, bound: f64 },
    #[error("tail exponent alpha must lie in (0, 1), got {0}")]
    InvalidTail(f64),
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("base orbit precomputed for {horizon} steps, k = {k} requested")]
    BaseOrbitTooShort { k: usize, horizon: usize },
    #[error("base orbit escaped at step {0}")]
    BaseOrbitEscaped(usize),
    #[error("schedule table: {0}")]
    Table(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// `G(x) = 2 sin^2(pi x)`.
pub fn weight_g(x: f64) -> f64 {
    let s = (PI * x).sin();
    2.0 * s * s
}

/// A `C^1` weight on `[0, 1]` together with a bound on its derivative.
pub trait SmoothWeight {
    fn value(&self, x: f64) -> f64;
    fn derivative_bound(&self) -> f64;
}

/// The universal weight `G`.
#[derive(Debug, Clone, Copy, Default)]
pub struct UniversalWeight;

impl SmoothWeight for UniversalWeight {
    fn value(&self, x: f64) -> f64 {
        weight_g(x)
    }
    fn derivative_bound(&self) -> f64 {
        TAU
    }
}

/// A closure weight with a caller-supplied derivative bound.
pub struct FnWeight<F> {
    pub f: F,
    pub derivative_bound: f64,
}

impl<F: Fn(f64) -> f64> SmoothWeight for FnWeight<F> {
    fn value(&self, x: f64) -> f64 {
        (self.f)(x)
    }
    fn derivative_bound(&self) -> f64 {
        self.derivative_bound
    }
}

/// `(1/n) sum_{k=1..n} b_k g(k/n)` with `b[0] = b_1`.
pub fn weighted_average(b: &[Complex64], g: &impl SmoothWeight) -> Complex64 {
    let n = b.len();
    if n == 0 {
        return Complex64::default();
    }
    let nf = n as f64;
    let sum: Complex64 = b
        .iter()
        .enumerate()
        .map(|(i, &bk)| bk * g.value((i + 1) as f64 / nf))
        .sum();
    sum / nf
}

/// Bounded distributions for iid schedules.
#[derive(Debug, Clone, PartialEq)]
pub enum Distribution {
    /// Uniform on the closed disk.
    Disk { center: Complex64, radius: f64 },
    /// Finite support with nonnegative weights.
    Discrete {
        values: Vec<Complex64>,
        weights: Vec<f64>,
    },
}

impl Distribution {
    fn validate(&self) -> Result<(), ScheduleError> {
        match self {
            Distribution::Disk { radius, center } => {
                if !(*radius >= 0.0) || !radius.is_finite() || !center.is_finite() {
                    return Err(ScheduleError::InvalidDistribution(format!(
                        "disk radius must be finite and >= 0, got {radius}"
                    )));
                }
            }
            Distribution::Discrete { values, weights } => {
                if values.is_empty() || values.len() != weights.len() {
                    return Err(ScheduleError::InvalidDistribution(
                        "discrete distribution needs matching non-empty values and weights".into(),
                    ));
                }
                if weights.iter().any(|w| !(*w >= 0.0)) || weights.iter().sum::<f64>() <= 0.0 {
                    return Err(ScheduleError::InvalidDistribution(
                        "discrete weights must be >= 0 with positive total".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    fn sup(&self) -> f64 {
        match self {
            Distribution::Disk { center, radius } => center.norm() + radius,
            Distribution::Discrete { values, .. } => {
                values.iter().map(|v| v.norm()).fold(0.0, f64::max)
            }
        }
    }

    pub fn mean(&self) -> Complex64 {
        match self {
            Distribution::Disk { center, .. } => *center,
            Distribution::Discrete { values, weights } => {
                let total: f64 = weights.iter().sum();
                values.iter().zip(weights).map(|(v, w)| v * *w).sum::<Complex64>() / total
            }
        }
    }

    fn sample(&self, u1: f64, u2: f64) -> Complex64 {
        match self {
            Distribution::Disk { center, radius } => {
                center + Complex64::from_polar(radius * u1.sqrt(), TAU * u2)
            }
            Distribution::Discrete { values, weights } => {
                let total: f64 = weights.iter().sum();
                let mut acc = 0.0;
                let target = u1 * total;
                for (v, w) in values.iter().zip(weights) {
                    acc += w;
                    if target < acc {
                        return *v;
                    }
                }
                *values.last().expect("validated non-empty")
            }
        }
    }
}

fn unit_f64(x: u64) -> f64 {
    (x >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Draws `(u1, u2)` for index `k` of stream `seed`, independent of call order.
fn counter_uniforms(seed: u64, k: usize) -> (f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_word_pos(4 * k as u128);
    let a = rng.next_u64();
    let b = rng.next_u64();
    (unit_f64(a), unit_f64(b))
}

/// Golden-ratio rotation number.
pub const GOLDEN_ROTATION: f64 = 0.618_033_988_749_894_9;

/// Base dynamical system driving an orbit schedule.
///
/// Circle maps report their point as the angle coordinate `x` in `[0, 1)` on
/// the real axis.
#[derive(Debug, Clone)]
pub enum BaseOrbit {
    /// `x -> 2x mod 1`, started at the point whose binary digits are the
    /// ChaCha bit stream of `seed` (a Lebesgue-typical start).
    Doubling { seed: u64 },
    /// `x -> x + theta mod 1`.
    Rotation { theta: f64, x0: f64 },
    /// Complex polynomial `p(z) = sum_j coeffs[j] z^j`, precomputed.
    Polynomial {
        coeffs: Vec<Complex64>,
        z0: Complex64,
        points: Arc<Vec<Complex64>>,
    },
}

impl BaseOrbit {
    pub fn doubling(seed: u64) -> Self {
        BaseOrbit::Doubling { seed }
    }

    pub fn rotation(theta: f64, x0: f64) -> Self {
        BaseOrbit::Rotation { theta, x0 }
    }

    /// Precomputes `horizon` points of the orbit of `z0` under `p`.
    pub fn polynomial(
        coeffs: Vec<Complex64>,
        z0: Complex64,
        horizon: usize,
    ) -> Result<Self, ScheduleError> {
        let mut points = Vec::with_capacity(horizon);
        let mut z = z0;
        for k in 0..horizon {
            if !z.is_finite() || z.norm() > 1e150 {
                return Err(ScheduleError::BaseOrbitEscaped(k));
            }
            points.push(z);
            z = coeffs.iter().rev().fold(Complex64::default(), |acc, c| acc * z + c);
        }
        Ok(BaseOrbit::Polynomial {
            coeffs,
            z0,
            points: Arc::new(points),
        })
    }

    /// `T^k(start)`.
    pub fn point(&self, k: usize) -> Result<Complex64, ScheduleError> {
        match self {
            BaseOrbit::Doubling { seed } => Ok(Complex64::new(doubling_point(*seed, k), 0.0)),
            BaseOrbit::Rotation { theta, x0 } => {
                let x = ((k as f64 * theta).fract() + x0).rem_euclid(1.0);
                Ok(Complex64::new(x, 0.0))
            }
            BaseOrbit::Polynomial { points, .. } => {
                points
                    .get(k)
                    .copied()
                    .ok_or(ScheduleError::BaseOrbitTooShort {
                        k,
                        horizon: points.len(),
                    })
            }
        }
    }

    fn sup_modulus(&self) -> f64 {
        match self {
            BaseOrbit::Polynomial { points, .. } => {
                points.iter().map(|p| p.norm()).fold(0.0, f64::max)
            }
            _ => 1.0,
        }
    }
}

fn chacha_word(seed: u64, index: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_d0b1_1a9e_0000);
    rng.set_word_pos(2 * index as u128);
    rng.next_u64()
}

/// Binary digits `b_k b_{k+1} ... b_{k+52}` of the seeded start, as a fraction.
fn doubling_point(seed: u64, k: usize) -> f64 {
    let word = k / 64;
    let off = (k % 64) as u32;
    let hi = chacha_word(seed, word);
    let bits = if off == 0 {
        hi
    } else {
        (hi << off) | (chacha_word(seed, word + 1) >> (64 - off))
    };
    unit_f64(bits)
}

/// Observable evaluated along a base orbit.
#[derive(Debug, Clone, PartialEq)]
pub enum Observable {
    /// `mean + sin_amp sin(2 pi x) + cos_amp cos(2 pi x)` with `x = Re(point)`.
    Trig {
        mean: Complex64,
        sin_amp: Complex64,
        cos_amp: Complex64,
    },
    /// `sum_j coeffs[j] z^j`.
    Polynomial { coeffs: Vec<Complex64> },
}

impl Observable {
    pub fn eval(&self, point: Complex64) -> Complex64 {
        match self {
            Observable::Trig {
                mean,
                sin_amp,
                cos_amp,
            } => {
                let t = TAU * point.re;
                mean + sin_amp * t.sin() + cos_amp * t.cos()
            }
            Observable::Polynomial { coeffs } => coeffs
                .iter()
                .rev()
                .fold(Complex64::default(), |acc, c| acc * point + c),
        }
    }

    /// The observable multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Observable {
        match self {
            Observable::Trig {
                mean,
                sin_amp,
                cos_amp,
            } => Observable::Trig {
                mean: mean * factor,
                sin_amp: sin_amp * factor,
                cos_amp: cos_amp * factor,
            },
            Observable::Polynomial { coeffs } => Observable::Polynomial {
                coeffs: coeffs.iter().map(|c| c * factor).collect(),
            },
        }
    }

    /// Integral against Lebesgue measure on the circle (trig observables only).
    pub fn circle_integral(&self) -> Option<Complex64> {
        match self {
            Observable::Trig { mean, .. } => Some(*mean),
            Observable::Polynomial { .. } => None,
        }
    }

    fn sup_on(&self, radius: f64) -> f64 {
        match self {
            Observable::Trig {
                mean,
                sin_amp,
                cos_amp,
            } => mean.norm() + sin_amp.norm() + cos_amp.norm(),
            Observable::Polynomial { coeffs } => coeffs
                .iter()
                .enumerate()
                .map(|(j, c)| c.norm() * radius.powi(j as i32))
                .sum(),
        }
    }
}

/// How `sigma_{k,n}` is produced.
#[derive(Debug, Clone)]
pub enum ScheduleKind {
    Constant(Complex64),
    /// `sigma_k = values[k]`, independent of `n`.
    Tabulated(Arc<Vec<Complex64>>),
    /// `sigma_{k,n} = slope * k / n`.
    Linear { slope: f64 },
    /// Exact pairs `sigma_k + sigma_{n-2-k} = defect / n`, first half from `base`.
    SymmetricPair {
        base: Box<ScheduleKind>,
        defect: Complex64,
    },
    /// Iid draws, `sigma_k` depends only on `(seed, k)`.
    RandomIid { seed: u64, dist: Distribution },
    /// `sigma_k = observable(T^k z)`.
    OrbitDriven {
        base: BaseOrbit,
        observable: Observable,
    },
}

impl ScheduleKind {
    fn sup(&self) -> f64 {
        match self {
            ScheduleKind::Constant(v) => v.norm(),
            ScheduleKind::Tabulated(vals) => vals.iter().map(|v| v.norm()).fold(0.0, f64::max),
            ScheduleKind::Linear { slope } => slope.abs(),
            ScheduleKind::SymmetricPair { base, defect } => base.sup() + defect.norm(),
            ScheduleKind::RandomIid { dist, .. } => dist.sup(),
            ScheduleKind::OrbitDriven { base, observable } => {
                observable.sup_on(base.sup_modulus())
            }
        }
    }

    fn value(&self, k: usize, n: usize) -> Result<Complex64, ScheduleError> {
        match self {
            ScheduleKind::Constant(v) => Ok(*v),
            ScheduleKind::Tabulated(vals) => {
                vals.get(k)
                    .copied()
                    .ok_or(ScheduleError::TableTooShort { k, len: vals.len() })
            }
            ScheduleKind::Linear { slope } => Ok(Complex64::new(slope * k as f64 / n as f64, 0.0)),
            ScheduleKind::SymmetricPair { base, defect } => {
                if k + 1 >= n {
                    return Ok(Complex64::default());
                }
                let mirror = n - 2 - k;
                let nf = n as f64;
                Ok(match k.cmp(&mirror) {
                    std::cmp::Ordering::Less => base.value(k, n)?,
                    std::cmp::Ordering::Greater => defect / nf - base.value(mirror, n)?,
                    std::cmp::Ordering::Equal => defect / (2.0 * nf),
                })
            }
            ScheduleKind::RandomIid { seed, dist } => {
                let (u1, u2) = counter_uniforms(*seed, k);
                Ok(dist.sample(u1, u2))
            }
            ScheduleKind::OrbitDriven { base, observable } => Ok(observable.eval(base.point(k)?)),
        }
    }
}

/// Optional `c / n^{2 + alpha}` term in `eps_{k,n}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tail {
    pub c: Complex64,
    pub alpha: f64,
}

/// A uniformly bounded schedule `sigma_{k,n}` with optional tail.
#[derive(Debug, Clone)]
pub struct SigmaSchedule {
    kind: ScheduleKind,
    bound: f64,
    tail: Option<Tail>,
}

impl SigmaSchedule {
    /// Builds a schedule; `bound` defaults to the structural supremum and must
    /// dominate it when given.
    pub fn new(
        kind: ScheduleKind,
        bound: Option<f64>,
        tail: Option<Tail>,
    ) -> Result<Self, ScheduleError> {
        if let ScheduleKind::RandomIid { dist, .. } = &kind {
            dist.validate()?;
        }
        if let Some(t) = tail {
            if !(t.alpha > 0.0 && t.alpha < 1.0) {
                return Err(ScheduleError::InvalidTail(t.alpha));
            }
        }
        let sup = kind.sup();
        let bound = match bound {
            Some(b) if b + 1e-12 < sup || !b.is_finite() => {
                return Err(ScheduleError::BoundViolated { max: sup, bound: b })
            }
            Some(b) => b,
            None => sup,
        };
        Ok(SigmaSchedule { kind, bound, tail })
    }

    pub fn constant(value: Complex64) -> Self {
        SigmaSchedule::new(ScheduleKind::Constant(value), None, None).expect("finite constant")
    }

    /// `sigma_{k,n} = -k/n`.
    pub fn linear() -> Self {
        SigmaSchedule::new(ScheduleKind::Linear { slope: -1.0 }, None, None).expect("valid")
    }

    pub fn tabulated(values: Vec<Complex64>) -> Self {
        SigmaSchedule::new(ScheduleKind::Tabulated(Arc::new(values)), None, None)
            .expect("finite table")
    }

    pub fn symmetric_pair(base: ScheduleKind, defect: Complex64) -> Self {
        SigmaSchedule::new(
            ScheduleKind::SymmetricPair {
                base: Box::new(base),
                defect,
            },
            None,
            None,
        )
        .expect("valid")
    }

    pub fn random_disk(seed: u64, center: Complex64, radius: f64) -> Result<Self, ScheduleError> {
        SigmaSchedule::new(
            ScheduleKind::RandomIid {
                seed,
                dist: Distribution::Disk { center, radius },
            },
            None,
            None,
        )
    }

    pub fn orbit_driven(base: BaseOrbit, observable: Observable) -> Self {
        SigmaSchedule::new(ScheduleKind::OrbitDriven { base, observable }, None, None)
            .expect("valid")
    }

    /// Loads `k, re, im` rows (header optional, `k` contiguous from 0).
    pub fn load_table(path: impl AsRef<Path>) -> Result<Vec<Complex64>, ScheduleError> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_path(path)?;
        let mut out = Vec::new();
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec?;
            if line == 0 && rec.get(0).is_some_and(|f| f.parse::<usize>().is_err()) {
                continue;
            }
            let field = |i: usize| -> Result<&str, ScheduleError> {
                rec.get(i).ok_or_else(|| {
                    ScheduleError::Table(format!("row {}: expected 3 columns", line + 1))
                })
            };
            let k: usize = field(0)?
                .parse()
                .map_err(|_| ScheduleError::Table(format!("row {}: bad index", line + 1)))?;
            if k != out.len() {
                return Err(ScheduleError::Table(format!(
                    "row {}: index {k} out of sequence (expected {})",
                    line + 1,
                    out.len()
                )));
            }
            let num = |s: &str| -> Result<f64, ScheduleError> {
                s.parse()
                    .map_err(|_| ScheduleError::Table(format!("row {}: bad number `{s}`", line + 1)))
            };
            out.push(Complex64::new(num(field(1)?)?, num(field(2)?)?));
        }
        Ok(out)
    }

    pub fn kind(&self) -> &ScheduleKind {
        &self.kind
    }

    /// `M` with `|sigma_{k,n}| <= M`.
    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn tail(&self) -> Option<Tail> {
        self.tail
    }

    pub fn with_tail(mut self, tail: Tail) -> Result<Self, ScheduleError> {
        if !(tail.alpha > 0.0 && tail.alpha < 1.0) {
            return Err(ScheduleError::InvalidTail(tail.alpha));
        }
        self.tail = Some(tail);
        Ok(self)
    }

    pub fn sigma(&self, k: usize, n: usize) -> Result<Complex64, ScheduleError> {
        if k >= n {
            return Err(ScheduleError::KOutOfRange { k, n });
        }
        let v = self.kind.value(k, n)?;
        if v.norm() > self.bound * (1.0 + 1e-12) + 1e-300 {
            return Err(ScheduleError::BoundViolated {
                max: v.norm(),
                bound: self.bound,
            });
        }
        Ok(v)
    }

    /// `pi/n + pi sigma_{k,n}/n^2 + tail`.
    pub fn epsilon(&self, k: usize, n: usize) -> Result<Complex64, ScheduleError> {
        self.epsilon_in::<f64>(k, n)
    }

    pub fn epsilon_in<T: Real>(&self, k: usize, n: usize) -> Result<Complex<T>, ScheduleError> {
        let sigma = lift::<T>(self.sigma(k, n)?);
        let nt = T::from_f64(n as f64);
        let pi = T::pi();
        let mut eps = Complex::new(pi / nt, T::zero()) + sigma * (pi / (nt * nt));
        if let Some(t) = self.tail {
            eps = eps + lift::<T>(t.c / (n as f64).powf(2.0 + t.alpha));
        }
        Ok(eps)
    }

    /// All `sigma_{0..n-1, n}`.
    pub fn sigmas(&self, n: usize) -> Result<Vec<Complex64>, ScheduleError> {
        (0..n).map(|k| self.sigma(k, n)).collect()
    }
}

/// The phase `u_n`, optionally with running partial sums.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseResult {
    pub u_n: Complex64,
    pub n: usize,
    pub partial_sums: Option<Vec<Complex64>>,
}

/// `u_n = (1/n) sum_{k=0}^{n-1} sigma_{k,n} G((k+1)/n)`.
pub fn phase(s: &SigmaSchedule, n: usize) -> Result<PhaseResult, ScheduleError> {
    phase_impl(s, n, false)
}

pub fn phase_with_partials(s: &SigmaSchedule, n: usize) -> Result<PhaseResult, ScheduleError> {
    phase_impl(s, n, true)
}

fn phase_impl(s: &SigmaSchedule, n: usize, keep: bool) -> Result<PhaseResult, ScheduleError> {
    if n == 0 {
        return Err(ScheduleError::KOutOfRange { k: 0, n: 0 });
    }
    let nf = n as f64;
    let mut acc = Complex64::default();
    let mut partials = keep.then(|| Vec::with_capacity(n));
    for k in 0..n {
        acc += s.sigma(k, n)? * weight_g((k + 1) as f64 / nf);
        if let Some(p) = partials.as_mut() {
            p.push(acc / nf);
        }
    }
    Ok(PhaseResult {
        u_n: acc / nf,
        n,
        partial_sums: partials,
    })
}
