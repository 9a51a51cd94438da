//! Closed intervals of `f64` with outward rounding.
//!
//! The four basic operations and `sqrt` are correctly rounded in IEEE 754, so
//! their rounding error can be recovered exactly with error-free transforms
//! (two-sum, fused multiply-add residuals). An endpoint is moved by one ulp
//! only when the transform shows the floating-point result landed on the wrong
//! side of the exact value; exact results are left untouched.
//!
//! Transcendental functions (`sin`, `cos`, `asin`, `exp`, `ln`) come from the
//! platform libm, which is faithful but not correctly rounded. Their endpoints
//! are pushed outward by two ulps unconditionally.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::NumericsError;

/// A closed interval `[lo, hi]` with finite endpoints and `lo <= hi`.
#[derive(Clone, Copy, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

// Decimal bracket of pi, width 1e-37.
const PI_LO_DIGITS: &str = "31415926535897932384626433832795028841";
const PI_HI_DIGITS: &str = "31415926535897932384626433832795028842";
const PI_SCALE: u32 = 37;

fn two_sum_err(a: f64, b: f64, s: f64) -> f64 {
    let bb = s - a;
    (a - (s - bb)) + (b - bb)
}

// Results this close to the subnormal range lose the exactness of the
// fma residual, so they are nudged unconditionally.
const TINY: f64 = 1e-290;

fn add_down(a: f64, b: f64) -> f64 {
    let s = a + b;
    if two_sum_err(a, b, s) < 0.0 {
        s.next_down()
    } else {
        s
    }
}

fn add_up(a: f64, b: f64) -> f64 {
    let s = a + b;
    if two_sum_err(a, b, s) > 0.0 {
        s.next_up()
    } else {
        s
    }
}

fn mul_down(a: f64, b: f64) -> f64 {
    let p = a * b;
    if p != 0.0 && p.abs() < TINY {
        return p.next_down();
    }
    if a.mul_add(b, -p) < 0.0 {
        p.next_down()
    } else {
        p
    }
}

fn mul_up(a: f64, b: f64) -> f64 {
    let p = a * b;
    if p != 0.0 && p.abs() < TINY {
        return p.next_up();
    }
    if a.mul_add(b, -p) > 0.0 {
        p.next_up()
    } else {
        p
    }
}

// sign of (a/b - q) for the rounded quotient q
fn div_residual_sign(a: f64, b: f64, q: f64) -> f64 {
    let r = (-q).mul_add(b, a);
    r * b.signum()
}

fn div_down(a: f64, b: f64) -> f64 {
    let q = a / b;
    if q != 0.0 && q.abs() < TINY {
        return q.next_down();
    }
    if div_residual_sign(a, b, q) < 0.0 {
        q.next_down()
    } else {
        q
    }
}

fn div_up(a: f64, b: f64) -> f64 {
    let q = a / b;
    if q != 0.0 && q.abs() < TINY {
        return q.next_up();
    }
    if div_residual_sign(a, b, q) > 0.0 {
        q.next_up()
    } else {
        q
    }
}

fn sqrt_down(x: f64) -> f64 {
    let s = x.sqrt();
    if (-s).mul_add(s, x) < 0.0 {
        s.next_down()
    } else {
        s
    }
}

fn sqrt_up(x: f64) -> f64 {
    let s = x.sqrt();
    if (-s).mul_add(s, x) > 0.0 {
        s.next_up()
    } else {
        s
    }
}

fn libm_down(x: f64) -> f64 {
    x.next_down().next_down()
}

fn libm_up(x: f64) -> f64 {
    x.next_up().next_up()
}

fn decimal_rational(digits: &str, scale: u32) -> BigRational {
    let num: BigInt = digits.parse().expect("valid digit string");
    BigRational::new(num, BigInt::from(10u32).pow(scale))
}

/// Largest `f64` not above `q`.
pub(crate) fn rational_floor_f64(q: &BigRational) -> f64 {
    let mut x = q.to_f64().unwrap_or(0.0);
    while BigRational::from_f64(x).is_some_and(|e| &e > q) {
        x = x.next_down();
    }
    x
}

/// Smallest `f64` not below `q`.
pub(crate) fn rational_ceil_f64(q: &BigRational) -> f64 {
    let mut x = q.to_f64().unwrap_or(0.0);
    while BigRational::from_f64(x).is_some_and(|e| &e < q) {
        x = x.next_up();
    }
    x
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self, NumericsError> {
        if !lo.is_finite() || !hi.is_finite() {
            return Err(NumericsError::InvalidInterval(format!("non-finite endpoint in [{lo}, {hi}]")));
        }
        if lo > hi {
            return Err(NumericsError::InvalidInterval(format!("lo > hi in [{lo}, {hi}]")));
        }
        Ok(Self { lo, hi })
    }

    /// The degenerate interval `[x, x]`.
    pub fn point(x: f64) -> Self {
        assert!(x.is_finite(), "Interval::point on non-finite value");
        Self { lo: x, hi: x }
    }

    // endpoints already known to be ordered
    fn raw(lo: f64, hi: f64) -> Self {
        debug_assert!(lo <= hi, "[{lo}, {hi}]");
        Self { lo, hi }
    }

    /// Tightest `f64` enclosure of an exact rational.
    pub fn from_rational(q: &BigRational) -> Self {
        Self::raw(rational_floor_f64(q), rational_ceil_f64(q))
    }

    /// Enclosure of pi derived from a stored decimal bracket.
    pub fn pi() -> Self {
        static PI: OnceLock<Interval> = OnceLock::new();
        *PI.get_or_init(|| {
            let lo = decimal_rational(PI_LO_DIGITS, PI_SCALE);
            let hi = decimal_rational(PI_HI_DIGITS, PI_SCALE);
            Interval::raw(rational_floor_f64(&lo), rational_ceil_f64(&hi))
        })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn mid(&self) -> f64 {
        let m = self.lo + 0.5 * (self.hi - self.lo);
        m.clamp(self.lo, self.hi)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn contains_zero(&self) -> bool {
        self.contains(0.0)
    }

    /// `other` lies inside `self`.
    pub fn encloses(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        Self::raw(self.lo.min(other.lo), self.hi.max(other.hi))
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo <= hi).then_some(Self::raw(lo, hi))
    }

    /// Splits at the midpoint; the halves share the midpoint exactly.
    pub fn bisect(&self) -> (Interval, Interval) {
        let m = self.mid();
        (Self::raw(self.lo, m), Self::raw(m, self.hi))
    }

    /// Widens by `eps` on both sides (rounded outward).
    pub fn inflate(&self, eps: f64) -> Interval {
        Self::raw(add_down(self.lo, -eps), add_up(self.hi, eps))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn div(self, rhs: Interval) -> Result<Interval, NumericsError> {
        if rhs.contains_zero() {
            return Err(NumericsError::Domain(format!("division by an interval containing zero: {rhs}")));
        }
        let c = [(self.lo, rhs.lo), (self.lo, rhs.hi), (self.hi, rhs.lo), (self.hi, rhs.hi)];
        let lo = c.iter().map(|&(a, b)| div_down(a, b)).fold(f64::INFINITY, f64::min);
        let hi = c.iter().map(|&(a, b)| div_up(a, b)).fold(f64::NEG_INFINITY, f64::max);
        Ok(Self::raw(lo, hi))
    }

    pub fn recip(self) -> Result<Interval, NumericsError> {
        Interval::point(1.0).div(self)
    }

    pub fn sqrt(self) -> Result<Interval, NumericsError> {
        if self.lo < 0.0 {
            return Err(NumericsError::Domain(format!("sqrt of an interval with negative part: {self}")));
        }
        Ok(Self::raw(sqrt_down(self.lo), sqrt_up(self.hi)))
    }

    /// `sqrt` that accepts a lower endpoint in `[-tol, 0)` and raises it to
    /// zero. Only for inputs the caller knows to be nonnegative.
    pub fn sqrt_clamped(self, tol: f64) -> Result<Interval, NumericsError> {
        if self.lo < -tol || self.hi < 0.0 {
            return Err(NumericsError::Domain(format!("sqrt of an interval below clamp tolerance {tol}: {self}")));
        }
        Self::raw(self.lo.max(0.0), self.hi).sqrt()
    }

    pub fn abs(self) -> Interval {
        if self.lo >= 0.0 {
            self
        } else if self.hi <= 0.0 {
            -self
        } else {
            Self::raw(0.0, (-self.lo).max(self.hi))
        }
    }

    pub fn sqr(self) -> Interval {
        let a = self.abs();
        Self::raw(mul_down(a.lo, a.lo), mul_up(a.hi, a.hi))
    }

    /// Integer power. Negative exponents go through `recip`.
    pub fn powi(self, n: i32) -> Result<Interval, NumericsError> {
        if n < 0 {
            return self.powi(-n)?.recip();
        }
        if n == 0 {
            return Ok(Interval::point(1.0));
        }
        let pos_pow = |x: Interval| {
            let mut acc = Interval::point(1.0);
            for _ in 0..n {
                acc = acc * x;
            }
            acc
        };
        if n % 2 == 0 {
            Ok(pos_pow(self.abs()))
        } else {
            // odd powers are monotone
            let lo = pos_pow(Interval::point(self.lo)).lo;
            let hi = pos_pow(Interval::point(self.hi)).hi;
            Ok(Self::raw(lo, hi))
        }
    }

    pub fn exp(self) -> Interval {
        Self::raw(libm_down(self.lo.exp()).max(0.0), libm_up(self.hi.exp()))
    }

    pub fn ln(self) -> Result<Interval, NumericsError> {
        if self.lo <= 0.0 {
            return Err(NumericsError::Domain(format!("ln of a nonpositive interval: {self}")));
        }
        Ok(Self::raw(libm_down(self.lo.ln()), libm_up(self.hi.ln())))
    }

    /// Real power `self^e` for a positive base.
    pub fn pow(self, e: Interval) -> Result<Interval, NumericsError> {
        Ok((e * self.ln()?).exp())
    }

    pub fn cos(self) -> Interval {
        let pi = Interval::pi();
        if self.width() >= 2.0 * pi.lo {
            return Self::raw(-1.0, 1.0);
        }
        let (a, b) = (self.lo.cos(), self.hi.cos());
        let mut lo = libm_down(a.min(b));
        let mut hi = libm_up(a.max(b));
        // multiples k*pi that may lie inside: even k is a maximum, odd k a minimum
        let k_lo = Interval::point(self.lo).div(pi).expect("pi > 0").lo.ceil();
        let k_hi = Interval::point(self.hi).div(pi).expect("pi > 0").hi.floor();
        let mut k = k_lo;
        while k <= k_hi {
            if k.rem_euclid(2.0) == 0.0 {
                hi = 1.0;
            } else {
                lo = -1.0;
            }
            k += 1.0;
        }
        Self::raw(lo.max(-1.0), hi.min(1.0))
    }

    pub fn sin(self) -> Interval {
        let pi = Interval::pi();
        if self.width() >= 2.0 * pi.lo {
            return Self::raw(-1.0, 1.0);
        }
        let (a, b) = (self.lo.sin(), self.hi.sin());
        let mut lo = libm_down(a.min(b));
        let mut hi = libm_up(a.max(b));
        // extrema at pi/2 + k*pi: even k is a maximum, odd k a minimum
        let half = Interval::point(0.5);
        let k_lo = (Interval::point(self.lo).div(pi).expect("pi > 0") - half).lo.ceil();
        let k_hi = (Interval::point(self.hi).div(pi).expect("pi > 0") - half).hi.floor();
        let mut k = k_lo;
        while k <= k_hi {
            if k.rem_euclid(2.0) == 0.0 {
                hi = 1.0;
            } else {
                lo = -1.0;
            }
            k += 1.0;
        }
        Self::raw(lo.max(-1.0), hi.min(1.0))
    }

    /// `sin / cos`; fails when the cosine enclosure touches zero.
    pub fn tan(self) -> Result<Interval, NumericsError> {
        let c = self.cos();
        if c.contains_zero() {
            return Err(NumericsError::Domain(format!("tan across a pole on {self}")));
        }
        self.sin().div(c)
    }

    pub fn asin(self) -> Result<Interval, NumericsError> {
        if self.lo < -1.0 || self.hi > 1.0 {
            return Err(NumericsError::Domain(format!("asin outside [-1, 1]: {self}")));
        }
        let half_pi_hi = Interval::pi().hi * 0.5;
        let lo = libm_down(self.lo.asin()).max(-half_pi_hi);
        let hi = libm_up(self.hi.asin()).min(half_pi_hi);
        Ok(Self::raw(lo, hi))
    }

    pub fn max(self, other: Interval) -> Interval {
        Self::raw(self.lo.max(other.lo), self.hi.max(other.hi))
    }

    pub fn min(self, other: Interval) -> Interval {
        Self::raw(self.lo.min(other.lo), self.hi.min(other.hi))
    }
}

impl Add for Interval {
    type Output = Interval;
    fn add(self, rhs: Interval) -> Interval {
        Interval::raw(add_down(self.lo, rhs.lo), add_up(self.hi, rhs.hi))
    }
}

impl Sub for Interval {
    type Output = Interval;
    fn sub(self, rhs: Interval) -> Interval {
        Interval::raw(add_down(self.lo, -rhs.hi), add_up(self.hi, -rhs.lo))
    }
}

impl Neg for Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        Interval::raw(-self.hi, -self.lo)
    }
}

impl Mul for Interval {
    type Output = Interval;
    fn mul(self, rhs: Interval) -> Interval {
        let c = [(self.lo, rhs.lo), (self.lo, rhs.hi), (self.hi, rhs.lo), (self.hi, rhs.hi)];
        let lo = c.iter().map(|&(a, b)| mul_down(a, b)).fold(f64::INFINITY, f64::min);
        let hi = c.iter().map(|&(a, b)| mul_up(a, b)).fold(f64::NEG_INFINITY, f64::max);
        Interval::raw(lo, hi)
    }
}

impl Add<f64> for Interval {
    type Output = Interval;
    fn add(self, rhs: f64) -> Interval {
        self + Interval::point(rhs)
    }
}

impl Mul<f64> for Interval {
    type Output = Interval;
    fn mul(self, rhs: f64) -> Interval {
        self * Interval::point(rhs)
    }
}

impl From<f64> for Interval {
    fn from(x: f64) -> Self {
        Interval::point(x)
    }
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:?}, {:?}]", self.lo, self.hi)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

// Two decimal strings; `{:?}` on f64 is the shortest string that parses back
// to the same value.
impl Serialize for Interval {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        [format!("{:?}", self.lo), format!("{:?}", self.hi)].serialize(s)
    }
}

impl<'de> Deserialize<'de> for Interval {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let [lo, hi] = <[String; 2]>::deserialize(d)?;
        let lo: f64 = lo.trim().parse().map_err(D::Error::custom)?;
        let hi: f64 = hi.trim().parse().map_err(D::Error::custom)?;
        Interval::new(lo, hi).map_err(D::Error::custom)
    }
}

/// Exact sign of a rational (used by root isolation).
pub(crate) fn rational_sign(q: &BigRational) -> i8 {
    if q.is_zero() {
        0
    } else if q > &BigRational::zero() {
        1
    } else {
        -1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(lo: f64, hi: f64) -> Interval {
        Interval::new(lo, hi).unwrap()
    }

    #[test]
    fn mul_of_positive_intervals_is_exact() {
        assert_eq!(iv(1.0, 2.0) * iv(3.0, 4.0), iv(3.0, 8.0));
    }

    #[test]
    fn inexact_sum_is_widened() {
        let s = Interval::point(0.1) + Interval::point(0.2);
        assert!(s.lo() < s.hi());
        // exact 0.1+0.2 (of the f64 inputs) is 0.3000000000000000166...
        let exact = BigRational::from_f64(0.1).unwrap() + BigRational::from_f64(0.2).unwrap();
        assert!(BigRational::from_f64(s.lo()).unwrap() <= exact);
        assert!(BigRational::from_f64(s.hi()).unwrap() >= exact);
    }

    #[test]
    fn sqrt_of_four() {
        let s = Interval::point(4.0).sqrt().unwrap();
        assert!(s.contains(2.0));
        assert!(s.width() <= 2.0 * f64::EPSILON * 2.0);
        let s2 = Interval::point(2.0).sqrt().unwrap();
        assert!(s2.lo() < s2.hi());
        assert_eq!(s2.hi(), s2.lo().next_up());
    }

    #[test]
    fn sqrt_negative_is_domain_error() {
        assert!(iv(-1.0, 1.0).sqrt().is_err());
        assert!(iv(-1e-14, 1.0).sqrt_clamped(1e-12).is_ok());
        assert!(iv(-1e-10, 1.0).sqrt_clamped(1e-12).is_err());
    }

    #[test]
    fn division_by_zero_interval() {
        assert!(iv(1.0, 2.0).div(iv(-1.0, 1.0)).is_err());
        let q = iv(1.0, 1.0).div(iv(3.0, 3.0)).unwrap();
        assert!(q.contains(1.0 / 3.0));
        assert!(q.lo() < q.hi());
    }

    #[test]
    fn pi_enclosure() {
        let pi = Interval::pi();
        assert_eq!(pi.lo(), std::f64::consts::PI);
        assert_eq!(pi.hi(), std::f64::consts::PI.next_up());
    }

    #[test]
    fn tan_of_pi_over_seven() {
        let t = Interval::pi().div(Interval::point(7.0)).unwrap().tan().unwrap();
        // 0.48157461880752864433216235305697057521908 (40-digit reference)
        assert!(t.lo() <= 0.481_574_618_807_528_6 && 0.481_574_618_807_528_7 <= t.hi());
        assert!(t.width() < 1e-15);
    }

    #[test]
    fn tan_across_pole_fails() {
        let half_pi = Interval::pi() * 0.5;
        assert!(half_pi.tan().is_err());
        assert!(iv(1.0, 2.0).tan().is_err());
    }

    #[test]
    fn cos_and_sin_capture_extrema() {
        let c = iv(-0.1, 0.1).cos();
        assert_eq!(c.hi(), 1.0);
        let c = iv(3.0, 3.3).cos();
        assert_eq!(c.lo(), -1.0);
        let s = iv(1.5, 1.6).sin();
        assert_eq!(s.hi(), 1.0);
        let s = iv(0.2, 0.3).sin();
        assert!(s.lo() <= 0.2f64.sin() && 0.3f64.sin() <= s.hi());
        assert!(s.hi() < 1.0);
    }

    #[test]
    fn powi_even_and_odd() {
        let p = iv(-2.0, 1.0).powi(2).unwrap();
        assert_eq!(p, iv(0.0, 4.0));
        let p = iv(-2.0, 1.0).powi(3).unwrap();
        assert_eq!(p, iv(-8.0, 1.0));
        let p = iv(2.0, 2.0).powi(-2).unwrap();
        assert!(p.contains(0.25));
    }

    #[test]
    fn real_power() {
        let p = iv(4.0, 4.0).pow(Interval::point(1.5)).unwrap();
        assert!(p.contains(8.0));
        assert!(p.width() < 1e-13);
    }

    #[test]
    fn rational_conversion_is_tight() {
        let third = BigRational::new(1.into(), 3.into());
        let i = Interval::from_rational(&third);
        assert_eq!(i.hi(), i.lo().next_up());
        let half = BigRational::new(1.into(), 2.into());
        assert_eq!(Interval::from_rational(&half), Interval::point(0.5));
    }

    #[test]
    fn serde_round_trip() {
        let x = Interval::pi().div(Interval::point(3.0)).unwrap();
        let s = serde_json::to_string(&x).unwrap();
        let y: Interval = serde_json::from_str(&s).unwrap();
        assert_eq!(x, y);
        assert!(serde_json::from_str::<Interval>(r#"["2","1"]"#).is_err());
    }

    #[test]
    fn bisect_shares_midpoint() {
        let (a, b) = iv(0.1, 0.7).bisect();
        assert_eq!(a.hi(), b.lo());
        assert_eq!(a.lo(), 0.1);
        assert_eq!(b.hi(), 0.7);
    }
}
