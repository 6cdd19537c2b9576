//! Attracting Fatou coordinates, the inverse repelling coordinate and
//! Lavaurs maps `L_u = (phi^o)^{-1} o T_u o phi^i`.
//!
//! Both coordinates are normalized by
//! `phi(w) = -1/w + (1-a) log(-+w) + o(1)`. Near 0 we use the formal Abel
//! series `-1/w + A log(-+w) + sum_j b_j w^j`, whose coefficients are
//! solved order by order from the Taylor coefficients of the germ, and reach
//! arbitrary points by iterating `f` forward.

use num_complex::Complex64;
use thiserror::Error;

use crate::germ::{Germ, GermError, Petal};

/// Default target accuracy.
pub const DEFAULT_TOL: f64 = 1e-9;
/// Default cap on forward iterates in one evaluation.
pub const DEFAULT_MAX_DEPTH: usize = 1 << 22;
/// Default order of the Abel series.
pub const DEFAULT_SERIES_ORDER: usize = 12;
/// Radius of the petal where the series is trusted.
pub const DEFAULT_PROBE_RADIUS: f64 = 0.05;
/// Minimal `|Re|` of the pulled-back repelling seed.
pub const DEFAULT_PULLBACK_FLOOR: f64 = 10.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FatouError {
    #[error("point {0} is not in the parabolic basin (orbit escaped or hit the fixed point)")]
    NotInBasin(Complex64),
    #[error("no convergence within {depth} iterates at {w}")]
    NotConverged { w: Complex64, depth: usize },
    #[error("Newton inversion failed for target {0}")]
    NewtonFailed(Complex64),
    #[error("value {0} out of numerical range")]
    Overflow(Complex64),
    #[error("{0} lies on the branch cut of the {1} logarithm")]
    BranchCut(Complex64, Side),
    #[error(transparent)]
    Germ(#[from] GermError),
}

/// Which petal a coordinate belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Attracting,
    Repelling,
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Side::Attracting => "attracting",
            Side::Repelling => "repelling",
        })
    }
}

fn check_cut(w: Complex64, side: Side) -> Result<(), FatouError> {
    let on_cut = w.im == 0.0
        && match side {
            Side::Attracting => w.re >= 0.0,
            Side::Repelling => w.re <= 0.0,
        };
    if on_cut || !w.is_finite() {
        Err(FatouError::BranchCut(w, side))
    } else {
        Ok(())
    }
}

/// Two-term asymptotic `-1/w + (1-a) log(-+w)` with the principal log.
pub fn approx_abel(g: &Germ, w: Complex64, side: Side) -> Result<Complex64, FatouError> {
    check_cut(w, side)?;
    let log_arg = match side {
        Side::Attracting => -w,
        Side::Repelling => w,
    };
    Ok(-w.inv() + (1.0 - g.a()) * log_arg.ln())
}

// Truncated power series in w, index = power.

fn ps_mul(x: &[Complex64], y: &[Complex64]) -> Vec<Complex64> {
    let n = x.len();
    let mut out = vec![Complex64::default(); n];
    for (i, xi) in x.iter().enumerate() {
        if *xi == Complex64::default() {
            continue;
        }
        for (j, yj) in y.iter().enumerate().take(n - i) {
            out[i + j] += xi * yj;
        }
    }
    out
}

/// Formal Abel series `-1/w + A log(-+w) + sum_{j=1}^J b_j w^j`.
#[derive(Debug, Clone, PartialEq)]
pub struct AbelSeries {
    log_coeff: Complex64,
    b: Vec<Complex64>,
}

impl AbelSeries {
    pub fn for_germ(g: &Germ, order: usize) -> Self {
        let len = order + 3;
        // h = f/w - 1 = sum_{i>=1} c_{i+1} w^i
        let mut h = vec![Complex64::default(); len];
        for (i, hi) in h.iter_mut().enumerate().skip(1) {
            *hi = g.taylor_coefficient(i + 1);
        }
        let log_coeff = 1.0 - g.a();

        // powers of h; h has no constant term so h^k vanishes below order k
        let mut powers = vec![{
            let mut one = vec![Complex64::default(); len];
            one[0] = Complex64::new(1.0, 0.0);
            one
        }];
        for k in 1..len {
            let next = ps_mul(&powers[k - 1], &h);
            powers.push(next);
        }

        // total = (h/(1+h))/w - 1 + A log(1+h)
        let mut total = vec![Complex64::default(); len];
        for (k, pk) in powers.iter().enumerate().skip(1) {
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            // h/(1+h) = sum_{k>=1} (-1)^{k+1} h^k, shifted down by one power
            for i in 1..len {
                total[i - 1] += sign * pk[i];
            }
            for i in 0..len {
                total[i] += log_coeff * sign * pk[i] / k as f64;
            }
        }
        total[0] -= 1.0;

        // (1+h)^j - 1 by repeated multiplication
        let mut one_plus_h = h.clone();
        one_plus_h[0] += 1.0;
        let mut pow = one_plus_h.clone();
        let mut b = Vec::with_capacity(order);
        for j in 1..=order {
            let coeff = -total[j + 1] / j as f64;
            for i in 0..len - j {
                let mut q = pow[i];
                if i == 0 {
                    q -= 1.0;
                }
                total[i + j] += coeff * q;
            }
            b.push(coeff);
            pow = ps_mul(&pow, &one_plus_h);
        }
        AbelSeries { log_coeff, b }
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.b
    }

    fn tail(&self, w: Complex64) -> Complex64 {
        self.b
            .iter()
            .rev()
            .fold(Complex64::default(), |acc, c| acc * w + c)
            * w
    }

    fn tail_derivative(&self, w: Complex64) -> Complex64 {
        self.b
            .iter()
            .enumerate()
            .rev()
            .fold(Complex64::default(), |acc, (j, c)| acc * w + c * (j + 1) as f64)
    }

    pub fn attracting(&self, w: Complex64) -> Complex64 {
        -w.inv() + self.log_coeff * (-w).ln() + self.tail(w)
    }

    pub fn repelling(&self, w: Complex64) -> Complex64 {
        -w.inv() + self.log_coeff * w.ln() + self.tail(w)
    }

    /// Common derivative of both branches.
    pub fn derivative(&self, w: Complex64) -> Complex64 {
        let r = w.inv();
        r * r + self.log_coeff * r + self.tail_derivative(w)
    }

    /// Solves `repelling(w) = zeta` by damped Newton seeded at `-1/zeta`.
    pub fn invert_repelling(&self, zeta: Complex64) -> Result<Complex64, FatouError> {
        let mut w = -zeta.inv();
        for _ in 0..100 {
            if !(w.re > 0.0 || w.im != 0.0) {
                return Err(FatouError::NewtonFailed(zeta));
            }
            let mut step = (self.repelling(w) - zeta) / self.derivative(w);
            let cap = 0.5 * w.norm();
            if step.norm() > cap {
                step *= cap / step.norm();
            }
            w -= step;
            if step.norm() <= 4.0 * f64::EPSILON * w.norm() {
                return Ok(w);
            }
        }
        Err(FatouError::NewtonFailed(zeta))
    }
}

/// Numerical Fatou coordinates for one germ.
#[derive(Debug, Clone)]
pub struct FatouSolver {
    germ: Germ,
    tol: f64,
    max_depth: usize,
    series: AbelSeries,
    probe: Petal,
    pullback_floor: f64,
}

impl FatouSolver {
    pub fn new(germ: Germ) -> Self {
        let series = AbelSeries::for_germ(&germ, DEFAULT_SERIES_ORDER);
        FatouSolver {
            germ,
            tol: DEFAULT_TOL,
            max_depth: DEFAULT_MAX_DEPTH,
            series,
            probe: Petal::attracting(DEFAULT_PROBE_RADIUS),
            pullback_floor: DEFAULT_PULLBACK_FLOOR,
        }
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_max_depth(mut self, max_depth: usize) -> Self {
        self.max_depth = max_depth;
        self
    }

    pub fn with_pullback_floor(mut self, floor: f64) -> Self {
        self.pullback_floor = floor;
        self
    }

    pub fn with_series_order(mut self, order: usize) -> Self {
        self.series = AbelSeries::for_germ(&self.germ, order);
        self
    }

    pub fn germ(&self) -> &Germ {
        &self.germ
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn max_depth(&self) -> usize {
        self.max_depth
    }

    pub fn series(&self) -> &AbelSeries {
        &self.series
    }

    fn step(&self, w: Complex64) -> Result<Complex64, FatouError> {
        match self.germ.evaluate(w) {
            Ok(v) if v.is_finite() && v.norm() <= self.germ.escape_radius() && v != w => Ok(v),
            _ => Err(FatouError::NotInBasin(w)),
        }
    }

    /// `phi^i(w)`: iterate into the probe petal, then double the depth until
    /// two readings of `series(f^m w) - m` agree to `tol/2`.
    pub fn attracting_coord(&self, w: Complex64) -> Result<Complex64, FatouError> {
        if !w.is_finite() || w == Complex64::default() {
            return Err(FatouError::NotInBasin(w));
        }
        let mut z = w;
        let mut m = 0usize;
        while !self.probe.contains(z) {
            if m >= self.max_depth {
                return Err(FatouError::NotConverged {
                    w,
                    depth: self.max_depth,
                });
            }
            z = self.step(z)?;
            m += 1;
        }
        let mut prev = self.series.attracting(z) - m as f64;
        let mut stride = m.max(4);
        loop {
            if m + stride > self.max_depth {
                return Err(FatouError::NotConverged {
                    w,
                    depth: self.max_depth,
                });
            }
            for _ in 0..stride {
                z = self.step(z)?;
            }
            m += stride;
            let cur = self.series.attracting(z) - m as f64;
            if (cur - prev).norm() <= 0.5 * self.tol {
                return Ok(cur);
            }
            prev = cur;
            stride = m;
        }
    }

    /// `(phi^o)^{-1}(Z) = f^m((phi^o)^{-1}(Z - m))` with the seed deep in the
    /// repelling petal.
    pub fn repelling_inverse(&self, z: Complex64) -> Result<Complex64, FatouError> {
        if !z.is_finite() || z.norm() > 1e12 {
            return Err(FatouError::Overflow(z));
        }
        let depth = (z.re + self.pullback_floor.max(2.0 * z.im.abs())).ceil().max(0.0);
        let m = depth as usize;
        if m > self.max_depth {
            return Err(FatouError::NotConverged {
                w: z,
                depth: self.max_depth,
            });
        }
        let mut w = self.series.invert_repelling(z - m as f64)?;
        for _ in 0..m {
            w = self
                .germ
                .evaluate(w)
                .map_err(|_| FatouError::Overflow(z))?;
            if !w.is_finite() {
                return Err(FatouError::Overflow(z));
            }
        }
        Ok(w)
    }

    /// `phi^o(w)` for `w` inside the repelling petal near 0.
    pub fn repelling_coord_local(&self, w: Complex64) -> Result<Complex64, FatouError> {
        check_cut(w, Side::Repelling)?;
        Ok(self.series.repelling(w))
    }

    /// `L_u(w)`.
    pub fn lavaurs(&self, u: Complex64, w: Complex64) -> Result<Complex64, FatouError> {
        self.repelling_inverse(self.attracting_coord(w)? + u)
    }

    /// `|phi^i(f(w)) - phi^i(w) - 1|`.
    pub fn abel_residual(&self, w: Complex64) -> Result<f64, FatouError> {
        let fw = self.germ.evaluate(w)?;
        Ok((self.attracting_coord(fw)? - self.attracting_coord(w)? - 1.0).norm())
    }

    /// `|f((phi^o)^{-1}(Z)) - (phi^o)^{-1}(Z + 1)|`.
    pub fn repelling_residual(&self, z: Complex64) -> Result<f64, FatouError> {
        let w = self.repelling_inverse(z)?;
        let fw = self.germ.evaluate(w)?;
        Ok((fw - self.repelling_inverse(z + 1.0)?).norm())
    }

    pub fn lavaurs_map(&self, u: Complex64) -> LavaursMap<'_> {
        LavaursMap { solver: self, u }
    }
}

/// `L_u` for a fixed phase.
#[derive(Debug, Clone, Copy)]
pub struct LavaursMap<'a> {
    solver: &'a FatouSolver,
    u: Complex64,
}

impl LavaursMap<'_> {
    pub fn u(&self) -> Complex64 {
        self.u
    }

    pub fn apply(&self, w: Complex64) -> Result<Complex64, FatouError> {
        self.solver.lavaurs(self.u, w)
    }

    pub fn solver(&self) -> &FatouSolver {
        self.solver
    }
}
