//! Scalar types the identity chain is evaluated in.
//!
//! Every chain formula is generic over [`Real`], so the same code runs in
//! plain `f64`, in [`Tracked`] (value plus an a-priori magnitude bound used as
//! the denominator of relative errors) and in [`DoubleDouble`] (≈106-bit
//! significand via error-free transforms) for gray-zone re-checks.

use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

pub trait Real:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + Add<f64, Output = Self>
    + Sub<f64, Output = Self>
    + Mul<f64, Output = Self>
    + Div<f64, Output = Self>
{
    fn lit(x: f64) -> Self;

    fn value(self) -> f64;

    fn zero() -> Self {
        Self::lit(0.0)
    }

    fn sq(self) -> Self {
        self * self
    }
}

impl Real for f64 {
    fn lit(x: f64) -> Self {
        x
    }

    fn value(self) -> f64 {
        self
    }
}

/// A value paired with the sum of magnitudes of everything that went into it.
///
/// `mag` bounds the size of the largest cancelling term, so
/// `|a - b| / max(a.mag, b.mag)` is a relative error that stays meaningful
/// when the two sides of an identity are themselves close to zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tracked {
    pub v: f64,
    pub mag: f64,
}

impl Tracked {
    pub fn new(v: f64) -> Self {
        Tracked { v, mag: v.abs() }
    }
}

impl Real for Tracked {
    fn lit(x: f64) -> Self {
        Tracked::new(x)
    }

    fn value(self) -> f64 {
        self.v
    }
}

impl Add for Tracked {
    type Output = Tracked;
    fn add(self, o: Tracked) -> Tracked {
        Tracked {
            v: self.v + o.v,
            mag: self.mag + o.mag,
        }
    }
}

impl Sub for Tracked {
    type Output = Tracked;
    fn sub(self, o: Tracked) -> Tracked {
        Tracked {
            v: self.v - o.v,
            mag: self.mag + o.mag,
        }
    }
}

impl Mul for Tracked {
    type Output = Tracked;
    fn mul(self, o: Tracked) -> Tracked {
        Tracked {
            v: self.v * o.v,
            mag: self.mag * o.mag,
        }
    }
}

impl Div for Tracked {
    type Output = Tracked;
    fn div(self, o: Tracked) -> Tracked {
        Tracked {
            v: self.v / o.v,
            mag: self.mag / o.v.abs(),
        }
    }
}

impl Neg for Tracked {
    type Output = Tracked;
    fn neg(self) -> Tracked {
        Tracked {
            v: -self.v,
            mag: self.mag,
        }
    }
}

impl AddAssign for Tracked {
    fn add_assign(&mut self, o: Tracked) {
        *self = *self + o;
    }
}

impl SubAssign for Tracked {
    fn sub_assign(&mut self, o: Tracked) {
        *self = *self - o;
    }
}

impl Add<f64> for Tracked {
    type Output = Tracked;
    fn add(self, o: f64) -> Tracked {
        self + Tracked::new(o)
    }
}

impl Sub<f64> for Tracked {
    type Output = Tracked;
    fn sub(self, o: f64) -> Tracked {
        self - Tracked::new(o)
    }
}

impl Mul<f64> for Tracked {
    type Output = Tracked;
    fn mul(self, o: f64) -> Tracked {
        self * Tracked::new(o)
    }
}

impl Div<f64> for Tracked {
    type Output = Tracked;
    fn div(self, o: f64) -> Tracked {
        self / Tracked::new(o)
    }
}

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoubleDouble {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
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
    pub fn new(x: f64) -> Self {
        DoubleDouble { hi: x, lo: 0.0 }
    }

    fn from_pair((hi, lo): (f64, f64)) -> Self {
        DoubleDouble { hi, lo }
    }

    pub fn abs(self) -> Self {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }
}

impl Real for DoubleDouble {
    fn lit(x: f64) -> Self {
        DoubleDouble::new(x)
    }

    fn value(self) -> f64 {
        self.hi + self.lo
    }
}

impl Add for DoubleDouble {
    type Output = DoubleDouble;
    fn add(self, o: DoubleDouble) -> DoubleDouble {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let (s, e) = quick_two_sum(s, e + t);
        DoubleDouble::from_pair(quick_two_sum(s, e + f))
    }
}

impl Neg for DoubleDouble {
    type Output = DoubleDouble;
    fn neg(self) -> DoubleDouble {
        DoubleDouble {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Sub for DoubleDouble {
    type Output = DoubleDouble;
    fn sub(self, o: DoubleDouble) -> DoubleDouble {
        self + (-o)
    }
}

impl Mul for DoubleDouble {
    type Output = DoubleDouble;
    fn mul(self, o: DoubleDouble) -> DoubleDouble {
        let (p, e) = two_prod(self.hi, o.hi);
        let e = e + (self.hi * o.lo + self.lo * o.hi);
        DoubleDouble::from_pair(quick_two_sum(p, e))
    }
}

impl Div for DoubleDouble {
    type Output = DoubleDouble;
    fn div(self, o: DoubleDouble) -> DoubleDouble {
        let q1 = self.hi / o.hi;
        let r = self - o * DoubleDouble::new(q1);
        let q2 = r.hi / o.hi;
        let r = r - o * DoubleDouble::new(q2);
        let q3 = r.hi / o.hi;
        DoubleDouble::from_pair(quick_two_sum(q1, q2)) + DoubleDouble::new(q3)
    }
}

impl AddAssign for DoubleDouble {
    fn add_assign(&mut self, o: DoubleDouble) {
        *self = *self + o;
    }
}

impl SubAssign for DoubleDouble {
    fn sub_assign(&mut self, o: DoubleDouble) {
        *self = *self - o;
    }
}

impl Add<f64> for DoubleDouble {
    type Output = DoubleDouble;
    fn add(self, o: f64) -> DoubleDouble {
        self + DoubleDouble::new(o)
    }
}

impl Sub<f64> for DoubleDouble {
    type Output = DoubleDouble;
    fn sub(self, o: f64) -> DoubleDouble {
        self - DoubleDouble::new(o)
    }
}

impl Mul<f64> for DoubleDouble {
    type Output = DoubleDouble;
    fn mul(self, o: f64) -> DoubleDouble {
        self * DoubleDouble::new(o)
    }
}

impl Div<f64> for DoubleDouble {
    type Output = DoubleDouble;
    fn div(self, o: f64) -> DoubleDouble {
        self / DoubleDouble::new(o)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn double_double_recovers_cancelled_bits() {
        // (1 + 2^-60) - 1 is lost in f64 but kept in double-double.
        let tiny = 2f64.powi(-60);
        let a = DoubleDouble::new(1.0) + DoubleDouble::new(tiny);
        let d = a - DoubleDouble::new(1.0);
        assert_eq!(d.value(), tiny);
        assert_eq!((1.0 + tiny) - 1.0, 0.0);
    }

    #[test]
    fn double_double_division_is_accurate() {
        let third = DoubleDouble::new(1.0) / DoubleDouble::new(3.0);
        let back = third * DoubleDouble::new(3.0) - DoubleDouble::new(1.0);
        assert!(back.value().abs() < 1e-30);
    }

    #[test]
    fn tracked_magnitude_survives_cancellation() {
        let a = Tracked::new(1e8) + Tracked::new(1.0);
        let d = a - Tracked::new(1e8);
        assert_eq!(d.v, 1.0);
        assert_eq!(d.mag, 2e8 + 1.0);
        let q = Tracked::new(-6.0) / Tracked::new(-2.0);
        assert_eq!(q.v, 3.0);
        assert_eq!(q.mag, 3.0);
    }
}
