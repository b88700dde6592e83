//! Arbitrary-precision reference arithmetic for the integration tests.
//!
//! Everything here is evaluated with `astro-float` at [`PREC`] bits and is
//! independent of the `f64` and double-double code paths of the library.
#![allow(dead_code)]

use astro_float::{BigFloat, Consts, RoundingMode};
use skewbaker_core::{Complex64, PlanePoint};

pub const PREC: usize = 320;
const RM: RoundingMode = RoundingMode::ToEven;

pub struct Ctx {
    cc: Consts,
}

#[derive(Clone, Debug)]
pub struct Hp {
    pub re: BigFloat,
    pub im: BigFloat,
}

#[derive(Clone, Debug)]
pub struct HpPoint {
    pub z: Hp,
    pub w: Hp,
}

pub fn bf(x: f64) -> BigFloat {
    BigFloat::from_f64(x, PREC)
}

pub fn to_f64(x: &BigFloat) -> f64 {
    x.to_string().parse().expect("decimal output of BigFloat")
}

impl Hp {
    pub fn new(re: f64, im: f64) -> Self {
        Self { re: bf(re), im: bf(im) }
    }

    pub fn from_c(c: Complex64) -> Self {
        Self::new(c.re, c.im)
    }

    pub fn to_c(&self) -> Complex64 {
        Complex64::new(to_f64(&self.re), to_f64(&self.im))
    }

    pub fn add(&self, o: &Hp) -> Hp {
        Hp { re: self.re.add(&o.re, PREC, RM), im: self.im.add(&o.im, PREC, RM) }
    }

    pub fn sub(&self, o: &Hp) -> Hp {
        Hp { re: self.re.sub(&o.re, PREC, RM), im: self.im.sub(&o.im, PREC, RM) }
    }

    pub fn mul(&self, o: &Hp) -> Hp {
        let re = self.re.mul(&o.re, PREC, RM).sub(&self.im.mul(&o.im, PREC, RM), PREC, RM);
        let im = self.re.mul(&o.im, PREC, RM).add(&self.im.mul(&o.re, PREC, RM), PREC, RM);
        Hp { re, im }
    }

    pub fn scale(&self, k: f64) -> Hp {
        self.mul(&Hp::new(k, 0.0))
    }

    pub fn div(&self, o: &Hp) -> Hp {
        let den = o.re.mul(&o.re, PREC, RM).add(&o.im.mul(&o.im, PREC, RM), PREC, RM);
        let conj = Hp { re: o.re.clone(), im: o.im.neg() };
        let num = self.mul(&conj);
        Hp { re: num.re.div(&den, PREC, RM), im: num.im.div(&den, PREC, RM) }
    }

    pub fn norm_f64(&self) -> f64 {
        self.to_c().norm()
    }
}

impl Ctx {
    pub fn new() -> Self {
        Self { cc: Consts::new().expect("astro-float constants") }
    }

    pub fn exp(&mut self, c: &Hp) -> Hp {
        let m = c.re.exp(PREC, RM, &mut self.cc);
        let cos = c.im.cos(PREC, RM, &mut self.cc);
        let sin = c.im.sin(PREC, RM, &mut self.cc);
        Hp { re: m.mul(&cos, PREC, RM), im: m.mul(&sin, PREC, RM) }
    }

    pub fn apply_f(&mut self, p: &HpPoint) -> HpPoint {
        let s = p.z.add(&p.w);
        let e1 = self.exp(&Hp { re: s.re.neg(), im: s.im.neg() });
        let w2 = p.w.scale(2.0);
        let e2 = self.exp(&Hp { re: w2.re.neg(), im: w2.im.neg() });
        HpPoint {
            z: e1.add(&s),
            w: e2.add(&w2).add(&Hp::new(1.0, 0.0)),
        }
    }

    pub fn orbit(&mut self, seed: PlanePoint, n: usize) -> Vec<HpPoint> {
        let mut pts = vec![HpPoint { z: Hp::from_c(seed.z), w: Hp::from_c(seed.w) }];
        for _ in 0..n {
            let next = self.apply_f(pts.last().unwrap());
            pts.push(next);
        }
        pts
    }

    /// `h(ζ) = (e^{-3ζ} + 3ζ - 1) / (4ζ)` for `ζ ≠ 0`.
    pub fn h(&mut self, zeta: Complex64) -> Hp {
        let z = Hp::from_c(zeta);
        let e = self.exp(&z.scale(-3.0));
        e.add(&z.scale(3.0)).sub(&Hp::new(1.0, 0.0)).div(&z.scale(4.0))
    }
}

pub fn re_gap(p: &HpPoint) -> BigFloat {
    p.w.re.sub(&p.z.re, PREC, RM)
}

pub fn to_point(p: &HpPoint) -> PlanePoint {
    PlanePoint::new(p.z.to_c(), p.w.to_c())
}

/// `u_n` at an orbit point evaluated in high precision.
pub fn u_state(p: &HpPoint) -> f64 {
    // |w| + |z| only needs f64 relative accuracy; the gap is exact.
    let denom = p.w.norm_f64() + p.z.norm_f64();
    -to_f64(&re_gap(p)) / denom - 1.0
}

/// Winding number of `g` around the boundary of the square of half-width
/// `r` centered at `c`, using `m` samples per side.
pub fn winding_number(c: Complex64, r: f64, m: usize, g: impl Fn(Complex64) -> Complex64) -> i64 {
    let corners = [
        Complex64::new(c.re - r, c.im - r),
        Complex64::new(c.re + r, c.im - r),
        Complex64::new(c.re + r, c.im + r),
        Complex64::new(c.re - r, c.im + r),
    ];
    let mut total = 0.0;
    let mut prev = g(corners[0]);
    for side in 0..4 {
        let a = corners[side];
        let b = corners[(side + 1) % 4];
        for k in 1..=m {
            let t = k as f64 / m as f64;
            let cur = g(a + (b - a) * t);
            total += (cur / prev).arg();
            prev = cur;
        }
    }
    (total / (2.0 * std::f64::consts::PI)).round() as i64
}
