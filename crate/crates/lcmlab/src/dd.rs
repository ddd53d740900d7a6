//! Double-double arithmetic: an unevaluated sum of two `f64`s giving
//! roughly 106 significand bits. Enough for the root-finding and
//! zero-sum certification paths, which need at least 64 fractional bits.
//!
//! Algorithms are the classic error-free transformations (two_sum,
//! two_prod via FMA) of Dekker and Bailey.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Clone, Copy, PartialEq, PartialOrd)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
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
    // requires |a| >= |b| or a == 0
    let s = a + b;
    let err = b - (s - a);
    (s, err)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let err = f64::mul_add(a, b, -p);
    (p, err)
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    #[inline]
    pub fn new(hi: f64, lo: f64) -> Dd {
        let (s, e) = two_sum(hi, lo);
        Dd { hi: s, lo: e }
    }

    #[inline]
    pub fn from_f64(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    pub fn abs(self) -> Dd {
        if self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0) {
            -self
        } else {
            self
        }
    }

    pub fn sqrt(self) -> Dd {
        if self.hi == 0.0 && self.lo == 0.0 {
            return Dd::ZERO;
        }
        debug_assert!(self.hi > 0.0, "sqrt of negative double-double");
        // one Newton step on 1/sqrt refines an f64 seed to full precision
        let approx = self.hi.sqrt();
        let y = Dd::from_f64(approx);
        let r = self / y;
        let sum = y + r;
        Dd {
            hi: sum.hi * 0.5,
            lo: sum.lo * 0.5,
        }
    }

    pub fn powi(self, mut e: u32) -> Dd {
        let mut base = self;
        let mut acc = Dd::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }
}

impl Add for Dd {
    type Output = Dd;
    #[inline]
    fn add(self, rhs: Dd) -> Dd {
        let (s1, s2) = two_sum(self.hi, rhs.hi);
        let (t1, t2) = two_sum(self.lo, rhs.lo);
        let (s1, s2b) = quick_two_sum(s1, s2 + t1);
        let (hi, lo) = quick_two_sum(s1, s2b + t2);
        Dd { hi, lo }
    }
}

impl Sub for Dd {
    type Output = Dd;
    #[inline]
    fn sub(self, rhs: Dd) -> Dd {
        self + (-rhs)
    }
}

impl Neg for Dd {
    type Output = Dd;
    #[inline]
    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Mul for Dd {
    type Output = Dd;
    #[inline]
    fn mul(self, rhs: Dd) -> Dd {
        let (p1, p2) = two_prod(self.hi, rhs.hi);
        let p2 = p2 + self.hi * rhs.lo + self.lo * rhs.hi;
        let (hi, lo) = quick_two_sum(p1, p2);
        Dd { hi, lo }
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, rhs: Dd) -> Dd {
        let q1 = self.hi / rhs.hi;
        let r = self - rhs * Dd::from_f64(q1);
        let q2 = r.hi / rhs.hi;
        let r = r - rhs * Dd::from_f64(q2);
        let q3 = r.hi / rhs.hi;
        let (s, e) = quick_two_sum(q1, q2);
        Dd::new(s, e + q3)
    }
}

impl fmt::Debug for Dd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Dd({:e} + {:e})", self.hi, self.lo)
    }
}

/// Complex number with double-double components.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cdd {
    pub re: Dd,
    pub im: Dd,
}

impl Cdd {
    pub const ZERO: Cdd = Cdd {
        re: Dd::ZERO,
        im: Dd::ZERO,
    };
    pub const ONE: Cdd = Cdd {
        re: Dd::ONE,
        im: Dd::ZERO,
    };

    #[inline]
    pub fn new(re: Dd, im: Dd) -> Cdd {
        Cdd { re, im }
    }

    #[inline]
    pub fn from_f64(re: f64, im: f64) -> Cdd {
        Cdd {
            re: Dd::from_f64(re),
            im: Dd::from_f64(im),
        }
    }

    pub fn norm_sqr(self) -> Dd {
        self.re * self.re + self.im * self.im
    }

    pub fn abs(self) -> Dd {
        self.norm_sqr().sqrt()
    }

    pub fn abs_f64(self) -> f64 {
        self.re.to_f64().hypot(self.im.to_f64())
    }

    /// Principal square root.
    pub fn sqrt(self) -> Cdd {
        let r = self.abs();
        if r.hi == 0.0 {
            return Cdd::ZERO;
        }
        let half = Dd::from_f64(0.5);
        if self.re.hi >= 0.0 {
            let t = ((r + self.re) * half).sqrt();
            let im = self.im * half / t;
            Cdd { re: t, im }
        } else {
            let t = ((r - self.re) * half).sqrt();
            let re = self.im.abs() * half / t;
            let im = if self.im.hi >= 0.0 || (self.im.hi == 0.0 && self.im.lo >= 0.0) {
                t
            } else {
                -t
            };
            Cdd { re, im }
        }
    }
}

impl Add for Cdd {
    type Output = Cdd;
    #[inline]
    fn add(self, rhs: Cdd) -> Cdd {
        Cdd {
            re: self.re + rhs.re,
            im: self.im + rhs.im,
        }
    }
}

impl Sub for Cdd {
    type Output = Cdd;
    #[inline]
    fn sub(self, rhs: Cdd) -> Cdd {
        Cdd {
            re: self.re - rhs.re,
            im: self.im - rhs.im,
        }
    }
}

impl Neg for Cdd {
    type Output = Cdd;
    #[inline]
    fn neg(self) -> Cdd {
        Cdd {
            re: -self.re,
            im: -self.im,
        }
    }
}

impl Mul for Cdd {
    type Output = Cdd;
    #[inline]
    fn mul(self, rhs: Cdd) -> Cdd {
        Cdd {
            re: self.re * rhs.re - self.im * rhs.im,
            im: self.re * rhs.im + self.im * rhs.re,
        }
    }
}

impl Div for Cdd {
    type Output = Cdd;
    fn div(self, rhs: Cdd) -> Cdd {
        // Smith's algorithm, branch on the dominant component
        if rhs.re.abs().hi >= rhs.im.abs().hi {
            let r = rhs.im / rhs.re;
            let den = rhs.re + rhs.im * r;
            Cdd {
                re: (self.re + self.im * r) / den,
                im: (self.im - self.re * r) / den,
            }
        } else {
            let r = rhs.re / rhs.im;
            let den = rhs.re * r + rhs.im;
            Cdd {
                re: (self.re * r + self.im) / den,
                im: (self.im * r - self.re) / den,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn add_carries_error_term() {
        let a = Dd::from_f64(1.0);
        let tiny = Dd::from_f64(1e-25);
        let s = a + tiny;
        // 1 + 1e-25 is not representable in f64; the low word keeps it
        assert_eq!(s.hi, 1.0);
        assert!((s.lo - 1e-25).abs() < 1e-40);
        let back = s - a;
        assert!((back.to_f64() - 1e-25).abs() < 1e-40);
    }

    #[test]
    fn third_round_trips() {
        let third = Dd::ONE / Dd::from_f64(3.0);
        let one = third * Dd::from_f64(3.0);
        let err = (one - Dd::ONE).abs();
        assert!(err.hi < 1e-31, "err = {:?}", err);
    }

    #[test]
    fn sqrt_two_squares_back() {
        let two = Dd::from_f64(2.0);
        let r = two.sqrt();
        let err = (r * r - two).abs();
        assert!(err.hi < 1e-30, "err = {:?}", err);
    }

    #[test]
    fn complex_sqrt_squares_back() {
        for (re, im) in [(3.0, 4.0), (-3.0, 4.0), (-3.0, -4.0), (0.0, -2.0), (5.0, 0.0)] {
            let z = Cdd::from_f64(re, im);
            let s = z.sqrt();
            let back = s * s;
            let err = (back - z).abs_f64();
            assert!(err < 1e-29, "sqrt({re}+{im}i) err = {err}");
        }
    }

    #[test]
    fn complex_division_inverts_multiplication() {
        let a = Cdd::from_f64(1.5, -2.25);
        let b = Cdd::from_f64(-0.75, 0.5);
        let q = (a * b) / b;
        assert!((q - a).abs_f64() < 1e-29);
    }
}
