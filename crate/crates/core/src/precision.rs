//! Scalar backends for orbit arithmetic.
//!
//! Long perturbed orbits amplify per-step rounding by roughly `n^2`, so the
//! orbit engine is generic over [`Real`]. Two backends ship: plain `f64` and
//! [`DoubleDouble`], an unevaluated sum of two doubles with ~106 significant
//! bits.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Rem, Sub, SubAssign};
use std::str::FromStr;

use num_complex::{Complex, Complex64};
use num_traits::{Num, One, Zero};
use serde::{Deserialize, Serialize};

/// Real scalar usable inside `num_complex::Complex` for orbit arithmetic.
pub trait Real:
    Copy + Num + Neg<Output = Self> + PartialOrd + fmt::Debug + Send + Sync + 'static
{
    fn from_f64(x: f64) -> Self;
    fn to_f64(self) -> f64;
    fn pi() -> Self;

    fn abs(self) -> Self {
        if self < Self::zero() {
            -self
        } else {
            self
        }
    }
}

impl Real for f64 {
    #[inline]
    fn from_f64(x: f64) -> Self {
        x
    }
    #[inline]
    fn to_f64(self) -> f64 {
        self
    }
    #[inline]
    fn pi() -> Self {
        std::f64::consts::PI
    }
    #[inline]
    fn abs(self) -> Self {
        f64::abs(self)
    }
}

#[inline]
pub fn lift<T: Real>(z: Complex64) -> Complex<T> {
    Complex::new(T::from_f64(z.re), T::from_f64(z.im))
}

#[inline]
pub fn lower<T: Real>(z: Complex<T>) -> Complex64 {
    Complex64::new(z.re.to_f64(), z.im.to_f64())
}

/// Arithmetic mode selectable per experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Precision {
    #[default]
    Double,
    DoubleDouble,
}

impl Precision {
    pub fn name(self) -> &'static str {
        match self {
            Precision::Double => "double",
            Precision::DoubleDouble => "double-double",
        }
    }
}

impl FromStr for Precision {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "double" | "f64" => Ok(Precision::Double),
            "double-double" | "dd" | "extended" => Ok(Precision::DoubleDouble),
            other => Err(format!(
                "unknown precision `{other}` (expected `double` or `double-double`)"
            )),
        }
    }
}

impl fmt::Display for Precision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Double-double number `hi + lo` with `|lo| <= ulp(hi)/2`.
#[derive(Clone, Copy, Default)]
pub struct DoubleDouble {
    hi: f64,
    lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl DoubleDouble {
    pub const PI: DoubleDouble = DoubleDouble {
        hi: std::f64::consts::PI,
        lo: 1.224_646_799_147_353_2e-16,
    };

    pub const fn new(x: f64) -> Self {
        DoubleDouble { hi: x, lo: 0.0 }
    }

    /// Builds from two parts, renormalizing.
    pub fn from_parts(hi: f64, lo: f64) -> Self {
        let (hi, lo) = two_sum(hi, lo);
        DoubleDouble { hi, lo }
    }

    pub fn hi(self) -> f64 {
        self.hi
    }

    pub fn lo(self) -> f64 {
        self.lo
    }

    pub fn is_finite(self) -> bool {
        self.hi.is_finite()
    }

    pub fn recip(self) -> Self {
        DoubleDouble::new(1.0) / self
    }

    pub fn sqrt(self) -> Self {
        if self.hi <= 0.0 {
            return DoubleDouble::new(self.hi.sqrt());
        }
        let x = self.hi.sqrt();
        // one Newton correction in double-double
        let (p, e) = two_prod(x, x);
        let r = (self.hi - p - e + self.lo) / (2.0 * x);
        DoubleDouble::from_parts(x, r)
    }
}

impl fmt::Debug for DoubleDouble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DD({:e} + {:e})", self.hi, self.lo)
    }
}

impl fmt::Display for DoubleDouble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.hi + self.lo)
    }
}

impl PartialEq for DoubleDouble {
    fn eq(&self, other: &Self) -> bool {
        self.hi == other.hi && self.lo == other.lo
    }
}

impl PartialOrd for DoubleDouble {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi) {
            Some(Ordering::Equal) => self.lo.partial_cmp(&other.lo),
            ord => ord,
        }
    }
}

impl From<f64> for DoubleDouble {
    fn from(x: f64) -> Self {
        DoubleDouble::new(x)
    }
}

impl Neg for DoubleDouble {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        DoubleDouble {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Add for DoubleDouble {
    type Output = Self;
    #[inline]
    fn add(self, rhs: Self) -> Self {
        let (s, e) = two_sum(self.hi, rhs.hi);
        let (t, f) = two_sum(self.lo, rhs.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        DoubleDouble { hi, lo }
    }
}

impl Sub for DoubleDouble {
    type Output = Self;
    #[inline]
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Mul for DoubleDouble {
    type Output = Self;
    #[inline]
    fn mul(self, rhs: Self) -> Self {
        let (p, e) = two_prod(self.hi, rhs.hi);
        let e = e + (self.hi * rhs.lo + self.lo * rhs.hi);
        let (hi, lo) = quick_two_sum(p, e);
        DoubleDouble { hi, lo }
    }
}

impl Div for DoubleDouble {
    type Output = Self;
    #[inline]
    fn div(self, rhs: Self) -> Self {
        let q1 = self.hi / rhs.hi;
        if !q1.is_finite() {
            return DoubleDouble::new(q1);
        }
        let r = self - rhs * DoubleDouble::new(q1);
        let q2 = r.hi / rhs.hi;
        let r = r - rhs * DoubleDouble::new(q2);
        let q3 = r.hi / rhs.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        DoubleDouble { hi, lo } + DoubleDouble::new(q3)
    }
}

impl Rem for DoubleDouble {
    type Output = Self;
    fn rem(self, rhs: Self) -> Self {
        let q = (self / rhs).hi.trunc();
        self - rhs * DoubleDouble::new(q)
    }
}

impl AddAssign for DoubleDouble {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl SubAssign for DoubleDouble {
    fn sub_assign(&mut self, rhs: Self) {
        *self = *self - rhs;
    }
}

impl MulAssign for DoubleDouble {
    fn mul_assign(&mut self, rhs: Self) {
        *self = *self * rhs;
    }
}

impl Zero for DoubleDouble {
    fn zero() -> Self {
        DoubleDouble::new(0.0)
    }
    fn is_zero(&self) -> bool {
        self.hi == 0.0 && self.lo == 0.0
    }
}

impl One for DoubleDouble {
    fn one() -> Self {
        DoubleDouble::new(1.0)
    }
}

impl Num for DoubleDouble {
    type FromStrRadixErr = std::num::ParseFloatError;

    fn from_str_radix(s: &str, _radix: u32) -> Result<Self, Self::FromStrRadixErr> {
        s.parse::<f64>().map(DoubleDouble::new)
    }
}

impl Real for DoubleDouble {
    #[inline]
    fn from_f64(x: f64) -> Self {
        DoubleDouble::new(x)
    }
    #[inline]
    fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
    #[inline]
    fn pi() -> Self {
        DoubleDouble::PI
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dd(x: f64) -> DoubleDouble {
        DoubleDouble::new(x)
    }

    #[test]
    fn one_third_keeps_extra_bits() {
        let third = dd(1.0) / dd(3.0);
        let back = third * dd(3.0) - dd(1.0);
        assert!(back.to_f64().abs() < 1e-31, "{back:?}");
        // f64 alone leaves a residual near 1e-17
        assert!(third.lo() != 0.0);
    }

    #[test]
    fn addition_is_exact_for_separated_magnitudes() {
        let s = dd(1.0) + dd(1e-20);
        assert_eq!(s.hi(), 1.0);
        assert_eq!(s.lo(), 1e-20);
        let d = s - dd(1.0);
        assert_eq!(d.to_f64(), 1e-20);
    }

    #[test]
    fn pi_constant_matches_known_tail() {
        // pi = 3.14159265358979323846264338327950288...
        let err = DoubleDouble::PI - dd(std::f64::consts::PI);
        assert!((err.to_f64() - 1.224_646_799_147_353_2e-16).abs() < 1e-30);
    }

    #[test]
    fn sqrt_of_two_squares_back() {
        let r = dd(2.0).sqrt();
        let e = r * r - dd(2.0);
        assert!(e.to_f64().abs() < 1e-30);
    }

    #[test]
    fn complex_division_in_double_double() {
        let a = Complex::new(dd(1.0), dd(2.0));
        let b = Complex::new(dd(3.0), dd(-1.0));
        let q = a / b;
        let back = q * b - a;
        assert!(back.norm_sqr().to_f64() < 1e-60);
    }

    #[test]
    fn precision_parses_aliases() {
        assert_eq!("double".parse::<Precision>(), Ok(Precision::Double));
        assert_eq!("DD".parse::<Precision>(), Ok(Precision::DoubleDouble));
        assert!("quad".parse::<Precision>().is_err());
    }
}
