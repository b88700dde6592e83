//! Evaluation of the skew-product and overflow-safe orbits.

pub mod compensated;

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest real part accepted by [`safe_exp`]. `e^709` is just below
/// `f64::MAX`.
pub const EXP_MAX: f64 = 709.0;

/// Arithmetic left the representable range of `f64`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("floating-point overflow")]
pub struct Overflow;

/// `e^c`, or [`Overflow`] when `Re c > EXP_MAX`. Underflow silently gives 0.
pub fn safe_exp(c: Complex64) -> Result<Complex64, Overflow> {
    if !(c.re <= EXP_MAX) || !c.im.is_finite() {
        return Err(Overflow);
    }
    finite(c.exp())
}

fn finite(c: Complex64) -> Result<Complex64, Overflow> {
    if c.re.is_finite() && c.im.is_finite() {
        Ok(c)
    } else {
        Err(Overflow)
    }
}

/// A point `(z, w)` of C².
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlanePoint {
    pub z: Complex64,
    pub w: Complex64,
}

impl PlanePoint {
    pub const fn new(z: Complex64, w: Complex64) -> Self {
        Self { z, w }
    }

    /// Point with purely real coordinates.
    pub const fn real(z: f64, w: f64) -> Self {
        Self::new(Complex64::new(z, 0.0), Complex64::new(w, 0.0))
    }

    pub fn is_finite(&self) -> bool {
        self.z.is_finite() && self.w.is_finite()
    }

    /// `self + t·dir`, treating `dir` as a vector of C².
    pub fn offset(&self, dir: &PlanePoint, t: Complex64) -> PlanePoint {
        PlanePoint::new(self.z + t * dir.z, self.w + t * dir.w)
    }

    /// `Re w - Re z`.
    pub fn real_gap(&self) -> f64 {
        self.w.re - self.z.re
    }
}

impl fmt::Display for PlanePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({}{:+}i, {}{:+}i)",
            self.z.re, self.z.im, self.w.re, self.w.im
        )
    }
}

/// One step of `F(z, w) = (e^{-(z+w)} + z + w, e^{-2w} + 2w + 1)`.
pub fn apply_f(p: PlanePoint) -> Result<PlanePoint, Overflow> {
    let s = finite(p.z + p.w)?;
    let z = finite(safe_exp(-s)? + s)?;
    let w2 = finite(p.w * 2.0)?;
    let w = finite(safe_exp(-w2)? + w2 + 1.0)?;
    Ok(PlanePoint::new(z, w))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OrbitStatus {
    Completed,
    /// The state after `step` could not be computed; `step` is the index
    /// of the last finite state.
    Overflowed { step: usize },
}

/// Finite orbit prefix `points[k] = F^k(points[0])`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitRecord {
    pub points: Vec<PlanePoint>,
    pub status: OrbitStatus,
    pub requested_steps: usize,
}

impl OrbitRecord {
    pub fn seed(&self) -> PlanePoint {
        self.points[0]
    }

    pub fn last(&self) -> PlanePoint {
        *self.points.last().expect("orbit always holds its seed")
    }

    /// Number of steps actually computed.
    pub fn completed_steps(&self) -> usize {
        self.points.len() - 1
    }

    pub fn is_complete(&self) -> bool {
        self.status == OrbitStatus::Completed
    }
}

/// Iterate [`apply_f`] up to `n` times, stopping at the first overflow.
pub fn orbit(seed: PlanePoint, n: usize) -> OrbitRecord {
    let mut points = Vec::with_capacity(n + 1);
    points.push(seed);
    let mut status = OrbitStatus::Completed;
    let mut p = seed;
    for k in 0..n {
        match apply_f(p) {
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
    OrbitRecord {
        points,
        status,
        requested_steps: n,
    }
}
