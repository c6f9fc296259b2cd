//! Closed real intervals with outward-safe arithmetic for support certification.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

// Relative widening that absorbs rounding in the endpoint formulas.
fn widen(lo: f64, hi: f64) -> Interval {
    let pad = |x: f64| 4.0 * f64::EPSILON * x.abs() + f64::MIN_POSITIVE;
    Interval { lo: lo - pad(lo), hi: hi + pad(hi) }
}

impl Interval {
    pub fn new(a: f64, b: f64) -> Self {
        Interval { lo: a.min(b), hi: a.max(b) }
    }

    pub fn point(x: f64) -> Self {
        Interval { lo: x, hi: x }
    }

    pub fn centered(c: f64, r: f64) -> Self {
        Interval::new(c - r, c + r)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn contains_zero(&self) -> bool {
        self.contains(0.0)
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn intersect(&self, o: &Interval) -> Option<Interval> {
        let lo = self.lo.max(o.lo);
        let hi = self.hi.min(o.hi);
        (lo <= hi).then_some(Interval { lo, hi })
    }

    pub fn hull(&self, o: &Interval) -> Interval {
        Interval { lo: self.lo.min(o.lo), hi: self.hi.max(o.hi) }
    }

    /// `None` when the divisor contains zero.
    pub fn div(&self, o: &Interval) -> Option<Interval> {
        if o.contains_zero() {
            return None;
        }
        let inv = widen(1.0 / o.hi, 1.0 / o.lo);
        Some(*self * inv)
    }

    pub fn abs_min(&self) -> f64 {
        if self.contains_zero() {
            0.0
        } else {
            self.lo.abs().min(self.hi.abs())
        }
    }
}

impl Add for Interval {
    type Output = Interval;
    fn add(self, o: Interval) -> Interval {
        widen(self.lo + o.lo, self.hi + o.hi)
    }
}

impl Sub for Interval {
    type Output = Interval;
    fn sub(self, o: Interval) -> Interval {
        widen(self.lo - o.hi, self.hi - o.lo)
    }
}

impl Neg for Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        Interval { lo: -self.hi, hi: -self.lo }
    }
}

impl Mul for Interval {
    type Output = Interval;
    fn mul(self, o: Interval) -> Interval {
        let p = [self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi];
        let lo = p.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = p.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        widen(lo, hi)
    }
}

impl Mul<f64> for Interval {
    type Output = Interval;
    fn mul(self, k: f64) -> Interval {
        self * Interval::point(k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn basic_ops() {
        let a = Interval::new(1.0, 2.0);
        let b = Interval::new(-1.0, 3.0);
        let p = a * b;
        assert!(p.lo <= -2.0 && p.hi >= 6.0 && p.lo > -2.0001 && p.hi < 6.0001);
        assert!(a.div(&b).is_none());
        let q = b.div(&a).unwrap();
        assert!(q.contains(-1.0) && q.contains(3.0));
        assert_eq!(a.intersect(&Interval::new(3.0, 4.0)), None);
    }

    proptest! {
        #[test]
        fn enclosure_is_sound(a in -5.0..5.0f64, b in -5.0..5.0f64, c in -5.0..5.0f64, d in -5.0..5.0f64,
                              x in 0.0..1.0f64, y in 0.0..1.0f64) {
            let i = Interval::new(a, b);
            let j = Interval::new(c, d);
            let p = i.lo + x * i.width();
            let q = j.lo + y * j.width();
            prop_assert!((i * j).contains(p * q));
            prop_assert!((i + j).contains(p + q));
            prop_assert!((i - j).contains(p - q));
            if let Some(r) = i.div(&j) {
                prop_assert!(r.contains(p / q));
            }
        }
    }
}
