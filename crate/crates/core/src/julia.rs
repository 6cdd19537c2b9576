//! Rasterized parabolic basins, Julia sets, Julia-Lavaurs sets and fibered
//! slices.
//!
//! Colour table (label -> RGB) used for PPM output:
//!
//! | label         | RGB             |
//! |---------------|-----------------|
//! | basin         | (30, 60, 160)   |
//! | julia-near    | (255, 255, 255) |
//! | lavaurs-hit   | (255, 190, 40)  |
//! | escapes       | (0, 0, 0)       |
//! | undecided     | (200, 30, 30)   |

use std::collections::VecDeque;
use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fatou::{FatouError, FatouSolver};
use crate::germ::{basin_entry, fmt_f, BasinOutcome, Germ};
use crate::schedule::{phase, BaseOrbit, Observable, ScheduleError, SigmaSchedule};

#[derive(Debug, Error)]
pub enum JuliaError {
    #[error("grid needs positive size and at least one pixel per axis")]
    InvalidGrid,
    #[error("renderer needs a genuine polynomial germ")]
    NotPolynomial,
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Rectangular window in the `w`-plane sampled at pixel centres.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub center: Complex64,
    pub width: f64,
    pub height: f64,
    pub px_w: usize,
    pub px_h: usize,
}

impl GridSpec {
    pub fn new(
        center: Complex64,
        width: f64,
        height: f64,
        px_w: usize,
        px_h: usize,
    ) -> Result<Self, JuliaError> {
        let g = GridSpec {
            center,
            width,
            height,
            px_w,
            px_h,
        };
        g.validate()?;
        Ok(g)
    }

    /// Window around the filled Julia set of `w + w^2`.
    pub fn default_window(px: usize) -> Self {
        GridSpec {
            center: Complex64::new(-0.5, 0.0),
            width: 2.4,
            height: 2.4,
            px_w: px,
            px_h: px,
        }
    }

    pub fn validate(&self) -> Result<(), JuliaError> {
        let ok = self.px_w >= 1
            && self.px_h >= 1
            && self.width > 0.0
            && self.height > 0.0
            && self.width.is_finite()
            && self.height.is_finite()
            && self.center.is_finite();
        if ok {
            Ok(())
        } else {
            Err(JuliaError::InvalidGrid)
        }
    }

    pub fn len(&self) -> usize {
        self.px_w * self.px_h
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn dx(&self) -> f64 {
        self.width / self.px_w as f64
    }

    fn dy(&self) -> f64 {
        self.height / self.px_h as f64
    }

    pub fn pixel_diagonal(&self) -> f64 {
        self.dx().hypot(self.dy())
    }

    /// Centre of pixel `(col, row)`, rows running top to bottom.
    pub fn point(&self, col: usize, row: usize) -> Complex64 {
        Complex64::new(
            self.center.re - 0.5 * self.width + (col as f64 + 0.5) * self.dx(),
            self.center.im + 0.5 * self.height - (row as f64 + 0.5) * self.dy(),
        )
    }

    /// Pixel containing `w`, if inside the window.
    pub fn locate(&self, w: Complex64) -> Option<(usize, usize)> {
        let x = (w.re - (self.center.re - 0.5 * self.width)) / self.dx();
        let y = ((self.center.im + 0.5 * self.height) - w.im) / self.dy();
        if !(x >= 0.0 && y >= 0.0) {
            return None;
        }
        let (c, r) = (x.floor() as usize, y.floor() as usize);
        (c < self.px_w && r < self.px_h).then_some((c, r))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Label {
    Basin,
    JuliaNear,
    LavaursHit,
    Escapes,
    Undecided,
}

impl Label {
    pub fn rgb(self) -> [u8; 3] {
        match self {
            Label::Basin => [30, 60, 160],
            Label::JuliaNear => [255, 255, 255],
            Label::LavaursHit => [255, 190, 40],
            Label::Escapes => [0, 0, 0],
            Label::Undecided => [200, 30, 30],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Label::Basin => "basin",
            Label::JuliaNear => "julia-near",
            Label::LavaursHit => "lavaurs-hit",
            Label::Escapes => "escapes",
            Label::Undecided => "undecided",
        }
    }
}

/// One label and one scalar (entry time, iterate count, ...) per pixel.
#[derive(Debug, Clone, PartialEq)]
pub struct Bitmap {
    pub grid: GridSpec,
    pub labels: Vec<Label>,
    pub values: Vec<u32>,
}

impl Bitmap {
    fn from_rows(grid: GridSpec, rows: Vec<Vec<(Label, u32)>>) -> Self {
        let mut labels = Vec::with_capacity(grid.len());
        let mut values = Vec::with_capacity(grid.len());
        for (l, v) in rows.into_iter().flatten() {
            labels.push(l);
            values.push(v);
        }
        Bitmap {
            grid,
            labels,
            values,
        }
    }

    pub fn label(&self, col: usize, row: usize) -> Label {
        self.labels[row * self.grid.px_w + col]
    }

    pub fn value(&self, col: usize, row: usize) -> u32 {
        self.values[row * self.grid.px_w + col]
    }

    pub fn mask(&self, label: Label) -> Vec<bool> {
        self.labels.iter().map(|&l| l == label).collect()
    }

    pub fn count(&self, label: Label) -> usize {
        self.labels.iter().filter(|&&l| l == label).count()
    }

    /// Binary PPM, row-major top to bottom.
    pub fn to_ppm(&self) -> Vec<u8> {
        let mut out = format!("P6\n{} {}\n255\n", self.grid.px_w, self.grid.px_h).into_bytes();
        out.reserve(3 * self.labels.len());
        for l in &self.labels {
            out.extend_from_slice(&l.rgb());
        }
        out
    }

    pub fn write_ppm<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        out.write_all(&self.to_ppm())
    }

    /// `col,row,re,im,label,value` per pixel.
    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut wtr = csv::Writer::from_writer(out);
        wtr.write_record(["col", "row", "re", "im", "label", "value"])?;
        for row in 0..self.grid.px_h {
            for col in 0..self.grid.px_w {
                let p = self.grid.point(col, row);
                wtr.write_record([
                    col.to_string(),
                    row.to_string(),
                    fmt_f(p.re),
                    fmt_f(p.im),
                    self.label(col, row).name().to_string(),
                    self.value(col, row).to_string(),
                ])?;
            }
        }
        wtr.flush()?;
        Ok(())
    }
}

fn render_rows<F>(grid: &GridSpec, f: F) -> Bitmap
where
    F: Fn(Complex64) -> (Label, u32) + Sync,
{
    let rows: Vec<Vec<(Label, u32)>> = (0..grid.px_h)
        .into_par_iter()
        .map(|row| (0..grid.px_w).map(|col| f(grid.point(col, row))).collect())
        .collect();
    Bitmap::from_rows(*grid, rows)
}

/// Basin label with the petal entry time, or escape / undecided.
pub fn render_basin(
    g: &Germ,
    grid: &GridSpec,
    max_iter: usize,
    r: f64,
) -> Result<Bitmap, JuliaError> {
    grid.validate()?;
    if !g.is_polynomial() {
        return Err(JuliaError::NotPolynomial);
    }
    Ok(render_rows(grid, |w| match basin_entry(g, w, r, max_iter) {
        BasinOutcome::Entered(m) => (Label::Basin, m as u32),
        BasinOutcome::Escaped(m) => (Label::Escapes, m as u32),
        BasinOutcome::Undecided => (Label::Undecided, max_iter as u32),
    }))
}

/// Escape time of a polynomial, `None` if the orbit stays bounded.
fn escape_time(g: &Germ, w: Complex64, max_iter: usize) -> Option<usize> {
    let radius = g.escape_radius();
    let mut z = w;
    for m in 0..max_iter {
        if !(z.norm() <= radius) {
            return Some(m);
        }
        z = match g.evaluate(z) {
            Ok(v) => v,
            Err(_) => return Some(m + 1),
        };
    }
    None
}

/// Boundary of a pixel set by 4-neighbour transitions (inner boundary).
pub fn boundary_mask(inside: &[bool], px_w: usize, px_h: usize) -> Vec<bool> {
    let mut out = vec![false; inside.len()];
    for row in 0..px_h {
        for col in 0..px_w {
            let i = row * px_w + col;
            if !inside[i] {
                continue;
            }
            let differs = |c: usize, r: usize| !inside[r * px_w + c];
            out[i] = (col > 0 && differs(col - 1, row))
                || (col + 1 < px_w && differs(col + 1, row))
                || (row > 0 && differs(col, row - 1))
                || (row + 1 < px_h && differs(col, row + 1));
        }
    }
    out
}

/// Rendered `J(q)`: boundary of the non-escaping set, labelled julia-near.
pub fn render_julia(g: &Germ, grid: &GridSpec, max_iter: usize) -> Result<Bitmap, JuliaError> {
    grid.validate()?;
    if !g.is_polynomial() {
        return Err(JuliaError::NotPolynomial);
    }
    let times = render_rows(grid, |w| match escape_time(g, w, max_iter) {
        Some(m) => (Label::Escapes, m as u32),
        None => (Label::Basin, max_iter as u32),
    });
    let filled = times.mask(Label::Basin);
    let edge = boundary_mask(&filled, grid.px_w, grid.px_h);
    let labels = edge
        .iter()
        .zip(&times.labels)
        .map(|(&e, &l)| if e { Label::JuliaNear } else { l })
        .collect();
    Ok(Bitmap {
        grid: *grid,
        labels,
        values: times.values,
    })
}

/// Chebyshev distance (in pixels) from every pixel to the nearest set pixel.
fn distance_field(mask: &[bool], px_w: usize, px_h: usize) -> Vec<u32> {
    let mut dist = vec![u32::MAX; mask.len()];
    let mut queue = VecDeque::new();
    for (i, &m) in mask.iter().enumerate() {
        if m {
            dist[i] = 0;
            queue.push_back(i);
        }
    }
    while let Some(i) = queue.pop_front() {
        let (col, row) = ((i % px_w) as isize, (i / px_w) as isize);
        for dr in -1..=1isize {
            for dc in -1..=1isize {
                let (c, r) = (col + dc, row + dr);
                if c < 0 || r < 0 || c >= px_w as isize || r >= px_h as isize {
                    continue;
                }
                let j = r as usize * px_w + c as usize;
                if dist[j] == u32::MAX {
                    dist[j] = dist[i] + 1;
                    queue.push_back(j);
                }
            }
        }
    }
    dist
}

/// Hausdorff distance in pixels (Chebyshev metric) between two masks;
/// `None` if exactly one of them is empty.
pub fn hausdorff_pixels(a: &[bool], b: &[bool], px_w: usize, px_h: usize) -> Option<u32> {
    let (any_a, any_b) = (a.iter().any(|&x| x), b.iter().any(|&x| x));
    match (any_a, any_b) {
        (false, false) => return Some(0),
        (true, true) => {}
        _ => return None,
    }
    let da = distance_field(a, px_w, px_h);
    let db = distance_field(b, px_w, px_h);
    let sup = |m: &[bool], d: &[u32]| {
        m.iter()
            .zip(d)
            .filter(|(&x, _)| x)
            .map(|(_, &v)| v)
            .max()
            .unwrap_or(0)
    };
    Some(sup(a, &db).max(sup(b, &da)))
}

/// Parameters of a Julia-Lavaurs render.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LavaursRenderOptions {
    pub u: Complex64,
    pub m_max: usize,
    /// Proximity threshold; defaults to two pixel diagonals.
    pub delta: Option<f64>,
    /// Escape-time iterations for the `J(q)` mask.
    pub julia_iter: usize,
    /// Iterate cap for Fatou coordinates at one pixel.
    pub fatou_depth: usize,
}

impl Default for LavaursRenderOptions {
    fn default() -> Self {
        LavaursRenderOptions {
            u: Complex64::default(),
            m_max: 4,
            delta: None,
            julia_iter: 500,
            fatou_depth: 20_000,
        }
    }
}

/// `J(q)` mask dilated by `delta`, used as the hit target.
struct JuliaTarget {
    grid: GridSpec,
    mask: Vec<bool>,
    near: Vec<bool>,
}

impl JuliaTarget {
    fn new(julia: &Bitmap, delta: f64) -> Self {
        let grid = julia.grid;
        let mask = julia.mask(Label::JuliaNear);
        let reach = (delta / grid.dx().min(grid.dy())).floor() as u32;
        let dist = distance_field(&mask, grid.px_w, grid.px_h);
        let near = dist.iter().map(|&d| d <= reach).collect();
        JuliaTarget { grid, mask, near }
    }

    fn is_near(&self, w: Complex64) -> bool {
        self.grid
            .locate(w)
            .is_some_and(|(c, r)| self.near[r * self.grid.px_w + c])
    }

    fn on_mask(&self, w: Complex64) -> bool {
        self.grid
            .locate(w)
            .is_some_and(|(c, r)| self.mask[r * self.grid.px_w + c])
    }
}

/// Labels pixels whose `L_u`-orbit comes within `delta` of the rendered
/// `J(q)` in at most `m_max` applications.
pub fn render_julia_lavaurs(
    g: &Germ,
    grid: &GridSpec,
    opts: &LavaursRenderOptions,
) -> Result<Bitmap, JuliaError> {
    let solver = FatouSolver::new(g.clone()).with_max_depth(opts.fatou_depth);
    let u = opts.u;
    render_julia_lavaurs_with(g, grid, opts, |w| solver.lavaurs(u, w))
}

/// As [`render_julia_lavaurs`] with a caller-supplied map in place of `L_u`.
pub fn render_julia_lavaurs_with<F>(
    g: &Germ,
    grid: &GridSpec,
    opts: &LavaursRenderOptions,
    map: F,
) -> Result<Bitmap, JuliaError>
where
    F: Fn(Complex64) -> Result<Complex64, FatouError> + Sync,
{
    let julia = render_julia(g, grid, opts.julia_iter)?;
    let delta = opts.delta.unwrap_or(2.0 * grid.pixel_diagonal());
    let target = JuliaTarget::new(&julia, delta);
    let filled = |w: Complex64| escape_time(g, w, opts.julia_iter).is_none();
    Ok(render_rows(grid, |w| {
        if target.on_mask(w) || target.is_near(w) {
            return (Label::LavaursHit, 0);
        }
        if !filled(w) {
            return (Label::Escapes, 0);
        }
        let mut z = w;
        for m in 1..=opts.m_max {
            z = match map(z) {
                Ok(v) => v,
                Err(FatouError::NotInBasin(_)) => return (Label::Escapes, m as u32 - 1),
                Err(_) => return (Label::Undecided, m as u32 - 1),
            };
            if target.is_near(z) {
                return (Label::LavaursHit, m as u32);
            }
            if !filled(z) {
                return (Label::Escapes, m as u32);
            }
        }
        (Label::Basin, opts.m_max as u32)
    }))
}

/// A finite-`n` fibered slice next to its predicted Julia-Lavaurs picture.
#[derive(Debug, Clone)]
pub struct FiberedSlice {
    /// Boundary of the non-escaping set of the `n`-step fibre map, labelled
    /// julia-near.
    pub slice: Bitmap,
    /// `J_Lav(q, u_n)` with one application of `L_{u_n}`.
    pub predicted: Bitmap,
    pub u_n: Complex64,
    /// Hausdorff distance between the two masks, in pixels.
    pub distance: Option<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SliceOptions {
    pub n: usize,
    /// Autonomous `q`-iterations after the perturbed steps.
    pub tail_iter: usize,
    pub julia_iter: usize,
}

impl Default for SliceOptions {
    fn default() -> Self {
        SliceOptions {
            n: 200,
            tail_iter: 200,
            julia_iter: 500,
        }
    }
}

/// Fibre over the base orbit: `eps_k = pi/n + a(T^k z)/n^2`, i.e.
/// `sigma_k = a(T^k z)/pi`.
pub fn render_fibered_slice(
    base: &BaseOrbit,
    a: &Observable,
    q: &Germ,
    grid: &GridSpec,
    opts: &SliceOptions,
) -> Result<FiberedSlice, JuliaError> {
    grid.validate()?;
    if !q.is_polynomial() {
        return Err(JuliaError::NotPolynomial);
    }
    let n = opts.n;
    let schedule = SigmaSchedule::orbit_driven(base.clone(), a.scaled(1.0 / std::f64::consts::PI));
    let eps2: Vec<Complex64> = (0..n)
        .map(|k| schedule.epsilon(k, n).map(|e| e * e))
        .collect::<Result<_, _>>()?;
    let u_n = phase(&schedule, n)?.u_n;
    let radius = q.escape_radius();
    let bounded = render_rows(grid, |w| {
        let mut z = w;
        for (m, e2) in eps2.iter().enumerate() {
            z = match q.evaluate(z) {
                Ok(v) => v + e2,
                Err(_) => return (Label::Escapes, m as u32),
            };
            if !(z.norm() <= radius * 4.0) {
                return (Label::Escapes, m as u32);
            }
        }
        match escape_time(q, z, opts.tail_iter) {
            Some(m) => (Label::Escapes, (n + m) as u32),
            None => (Label::Basin, (n + opts.tail_iter) as u32),
        }
    });
    let filled = bounded.mask(Label::Basin);
    let edge = boundary_mask(&filled, grid.px_w, grid.px_h);
    let slice = Bitmap {
        grid: *grid,
        labels: edge
            .iter()
            .zip(&bounded.labels)
            .map(|(&e, &l)| if e { Label::JuliaNear } else { l })
            .collect(),
        values: bounded.values,
    };
    let predicted = render_julia_lavaurs(
        q,
        grid,
        &LavaursRenderOptions {
            u: u_n,
            m_max: 1,
            delta: None,
            julia_iter: opts.julia_iter,
            ..Default::default()
        },
    )?;
    let distance = hausdorff_pixels(
        &slice.mask(Label::JuliaNear),
        &predicted.mask(Label::LavaursHit),
        grid.px_w,
        grid.px_h,
    );
    Ok(FiberedSlice {
        slice,
        predicted,
        u_n,
        distance,
    })
}

/// `A = (1/m) sum_l a(z_l)` over one periodic cycle.
pub fn periodic_average(cycle: &[Complex64], a: &Observable) -> Complex64 {
    if cycle.is_empty() {
        return Complex64::default();
    }
    cycle.iter().map(|&z| a.eval(z)).sum::<Complex64>() / cycle.len() as f64
}

/// Whether three points lie on a common real line, up to `tol` in the
/// cross product of their differences.
pub fn collinear(p: [Complex64; 3], tol: f64) -> bool {
    let (d1, d2) = (p[1] - p[0], p[2] - p[0]);
    (d1.re * d2.im - d1.im * d2.re).abs() <= tol
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::c64;

    #[test]
    fn grid_points_run_top_to_bottom() {
        let g = GridSpec::new(c64(0.0, 0.0), 2.0, 2.0, 4, 4).unwrap();
        assert_eq!(g.point(0, 0), c64(-0.75, 0.75));
        assert_eq!(g.point(3, 3), c64(0.75, -0.75));
        assert_eq!(g.locate(c64(-0.75, 0.75)), Some((0, 0)));
        assert_eq!(g.locate(c64(5.0, 0.0)), None);
        assert!(GridSpec::new(c64(0.0, 0.0), 0.0, 1.0, 4, 4).is_err());
        assert!(GridSpec::new(c64(0.0, 0.0), 1.0, 1.0, 0, 4).is_err());
    }

    #[test]
    fn basin_render_examples() {
        let q = Germ::quadratic();
        // 3x1 grid whose pixel centres are -0.1, 0.45, 1.0
        let grid = GridSpec::new(c64(0.45, 0.0), 1.65, 0.1, 3, 1).unwrap();
        let bmp = render_basin(&q, &grid, 1000, 0.25).unwrap();
        assert!((grid.point(0, 0) - c64(-0.1, 0.0)).norm() < 1e-12);
        assert_eq!(bmp.label(0, 0), Label::Basin);
        assert_eq!(bmp.value(0, 0), 0);
        assert_eq!(bmp.label(2, 0), Label::Escapes);
    }

    #[test]
    fn boundary_of_square() {
        let mut inside = vec![false; 25];
        for r in 1..4 {
            for c in 1..4 {
                inside[r * 5 + c] = true;
            }
        }
        let b = boundary_mask(&inside, 5, 5);
        assert_eq!(b.iter().filter(|&&x| x).count(), 8);
        assert!(!b[2 * 5 + 2]);
    }

    #[test]
    fn hausdorff_of_shifted_points() {
        let mut a = vec![false; 100];
        let mut b = vec![false; 100];
        a[5 * 10 + 2] = true;
        b[5 * 10 + 6] = true;
        assert_eq!(hausdorff_pixels(&a, &b, 10, 10), Some(4));
        assert_eq!(hausdorff_pixels(&a, &a, 10, 10), Some(0));
        assert_eq!(hausdorff_pixels(&a, &[false; 100], 10, 10), None);
    }

    #[test]
    fn ppm_header_and_size() {
        let grid = GridSpec::new(c64(-0.5, 0.0), 1.6, 1.6, 8, 6).unwrap();
        let bmp = render_basin(&Germ::quadratic(), &grid, 200, 0.25).unwrap();
        let ppm = bmp.to_ppm();
        assert!(ppm.starts_with(b"P6\n8 6\n255\n"));
        assert_eq!(ppm.len(), b"P6\n8 6\n255\n".len() + 3 * 48);
    }

    #[test]
    fn collinearity_checker() {
        assert!(collinear([c64(0.0, 0.0), c64(1.0, 1.0), c64(2.0, 2.0)], 1e-12));
        assert!(!collinear([c64(0.0, 0.0), c64(1.0, 0.0), c64(0.0, 1.0)], 1e-12));
        let a = Observable::Trig {
            mean: c64(0.0, 0.0),
            sin_amp: c64(1.0, 0.0),
            cos_amp: c64(0.0, 1.0),
        };
        // fixed point 0 and the 2-cycle {1/3, 2/3} of the doubling map
        let a0 = periodic_average(&[c64(0.0, 0.0)], &a);
        let a1 = periodic_average(&[c64(1.0 / 3.0, 0.0), c64(2.0 / 3.0, 0.0)], &a);
        assert!((a0 - c64(0.0, 1.0)).norm() < 1e-15);
        assert!((a1 - c64(0.0, -0.5)).norm() < 1e-15);
    }
}
