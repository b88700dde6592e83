//! Orbits carried in double-double arithmetic.
//!
//! Orbit coordinates inside `L` roughly double every step, so after `n`
//! steps the rounding of each stored `f64` coordinate is about
//! `2^n · ulp(|seed|)`. Quantities that depend on small differences of
//! large coordinates, such as `w_n - z_n`, lose that much absolute accuracy
//! on a plain `f64` orbit. This module keeps every coordinate as an
//! unevaluated sum `hi + lo` so the additions in `F` are carried with about
//! 106 bits. Exponential terms are evaluated on the high parts only; they are
//! bounded by `e^{-2}` on `L` and contribute `f64`-level absolute error.

use std::ops::{Add, Neg, Sub};

use num_complex::Complex64;

use super::{safe_exp, OrbitStatus, Overflow, PlanePoint};

/// Error-free sum: `a + b = s + e` exactly.
#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

/// Real double-double value `hi + lo` with `|lo| <= ulp(hi)/2`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DoubleDouble {
    pub hi: f64,
    pub lo: f64,
}

impl DoubleDouble {
    pub const fn from_f64(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }

    fn renormalize(hi: f64, lo: f64) -> Self {
        let (hi, lo) = two_sum(hi, lo);
        Self { hi, lo }
    }

    pub fn add_f64(self, x: f64) -> Self {
        let (s, e) = two_sum(self.hi, x);
        Self::renormalize(s, e + self.lo)
    }

    /// Multiplication by a power of two is exact.
    pub fn scale2(self) -> Self {
        Self {
            hi: 2.0 * self.hi,
            lo: 2.0 * self.lo,
        }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn is_finite(self) -> bool {
        self.hi.is_finite() && self.lo.is_finite()
    }
}

impl Add for DoubleDouble {
    type Output = Self;

    fn add(self, other: Self) -> Self {
        let (s, e) = two_sum(self.hi, other.hi);
        let (t, f) = two_sum(self.lo, other.lo);
        let (s, e) = two_sum(s, e + t);
        Self::renormalize(s, e + f)
    }
}

impl Neg for DoubleDouble {
    type Output = Self;

    fn neg(self) -> Self {
        Self {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Sub for DoubleDouble {
    type Output = Self;

    fn sub(self, other: Self) -> Self {
        self + -other
    }
}

/// Complex number with double-double components.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ComplexDd {
    pub re: DoubleDouble,
    pub im: DoubleDouble,
}

impl ComplexDd {
    pub fn from_complex(c: Complex64) -> Self {
        Self {
            re: DoubleDouble::from_f64(c.re),
            im: DoubleDouble::from_f64(c.im),
        }
    }

    pub fn add_complex(self, c: Complex64) -> Self {
        Self {
            re: self.re.add_f64(c.re),
            im: self.im.add_f64(c.im),
        }
    }

    pub fn scale2(self) -> Self {
        Self {
            re: self.re.scale2(),
            im: self.im.scale2(),
        }
    }

    /// Leading part, used as the argument of exponentials.
    pub fn hi(self) -> Complex64 {
        Complex64::new(self.re.hi, self.im.hi)
    }

    /// Nearest `f64` complex value.
    pub fn to_complex(self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    pub fn is_finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

impl Add for ComplexDd {
    type Output = Self;

    fn add(self, o: Self) -> Self {
        Self {
            re: self.re + o.re,
            im: self.im + o.im,
        }
    }
}

impl Sub for ComplexDd {
    type Output = Self;

    fn sub(self, o: Self) -> Self {
        Self {
            re: self.re - o.re,
            im: self.im - o.im,
        }
    }
}

/// A point of C² with double-double coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PlanePointDd {
    pub z: ComplexDd,
    pub w: ComplexDd,
}

impl PlanePointDd {
    pub fn from_point(p: PlanePoint) -> Self {
        Self {
            z: ComplexDd::from_complex(p.z),
            w: ComplexDd::from_complex(p.w),
        }
    }

    pub fn to_point(self) -> PlanePoint {
        PlanePoint::new(self.z.to_complex(), self.w.to_complex())
    }

    /// `e^{-(z+w)}` as used by the first coordinate of `F`.
    pub fn first_exp(self) -> Result<Complex64, Overflow> {
        safe_exp(-(self.z + self.w).hi())
    }

    /// `e^{-2w}` as used by the second coordinate of `F`.
    pub fn second_exp(self) -> Result<Complex64, Overflow> {
        safe_exp(-self.w.scale2().hi())
    }
}

/// `F` evaluated with compensated additions.
pub fn apply_f_dd(p: PlanePointDd) -> Result<PlanePointDd, Overflow> {
    let z = (p.z + p.w).add_complex(p.first_exp()?);
    let w = p
        .w
        .scale2()
        .add_complex(p.second_exp()?)
        .add_complex(Complex64::new(1.0, 0.0));
    if z.is_finite() && w.is_finite() {
        Ok(PlanePointDd { z, w })
    } else {
        Err(Overflow)
    }
}

/// Orbit prefix with double-double states.
#[derive(Debug, Clone, PartialEq)]
pub struct CompensatedOrbit {
    pub points: Vec<PlanePointDd>,
    pub status: OrbitStatus,
    pub requested_steps: usize,
}

pub fn compensated_orbit(seed: PlanePoint, n: usize) -> CompensatedOrbit {
    let mut points = Vec::with_capacity(n + 1);
    let mut p = PlanePointDd::from_point(seed);
    points.push(p);
    let mut status = OrbitStatus::Completed;
    for k in 0..n {
        match apply_f_dd(p) {
            Ok(next) => {
                points.push(next);
                p = next;
            }
            Err(Overflow) => {
                status = OrbitStatus::Overflowed { step: k };
                break;
            }
        }
    }
    CompensatedOrbit {
        points,
        status,
        requested_steps: n,
    }
}
