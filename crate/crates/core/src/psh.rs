//! The functions
//!
//! ```text
//! u_n(z_0, w_0) = -(Re w_n - Re z_n) / (|w_n| + |z_n|) - 1
//! ```
//!
//! and circle sub-mean-value probes along complex lines `λ ↦ a + λb`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::dynamics::{orbit, PlanePoint};
use crate::{Error, Result};

/// `u_n` evaluated at an orbit point `(z_n, w_n)`.
pub fn u_from_state(p: &PlanePoint) -> Option<f64> {
    let denom = p.w.norm() + p.z.norm();
    if denom > 0.0 && denom.is_finite() {
        Some(-(p.w.re - p.z.re) / denom - 1.0)
    } else {
        None
    }
}

pub fn u_n(seed: PlanePoint, n: usize) -> Result<f64> {
    let record = orbit(seed, n);
    if !record.is_complete() {
        return Err(Error::Truncated {
            completed: record.completed_steps(),
            requested: n,
        });
    }
    u_from_state(&record.last()).ok_or(Error::Undefined)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UProfile {
    pub seed: PlanePoint,
    /// `(n, u_n)` for every step reached before overflow.
    pub values: Vec<(usize, f64)>,
    /// Max over the last `⌈N/4⌉` defined values; proxy for `limsup u_n`.
    pub tail_max: f64,
    pub truncated: bool,
}

/// Tabulate `u_0, …, u_N`.
pub fn u_profile(seed: PlanePoint, big_n: usize) -> Result<UProfile> {
    if big_n < 4 {
        return Err(Error::Precondition(format!(
            "profile length must be at least 4, got {big_n}"
        )));
    }
    let record = orbit(seed, big_n);
    let values: Vec<(usize, f64)> = record
        .points
        .iter()
        .enumerate()
        .filter_map(|(k, p)| u_from_state(p).map(|u| (k, u)))
        .collect();
    let tail_len = big_n.div_ceil(4);
    let tail_max = values
        .iter()
        .rev()
        .take(tail_len)
        .map(|&(_, u)| u)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(UProfile {
        seed,
        values,
        tail_max,
        truncated: !record.is_complete(),
    })
}

/// Complex line `λ ↦ center + λ·direction` with a sampling circle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProbeSpec {
    pub center: PlanePoint,
    pub direction: PlanePoint,
    pub radius: f64,
    pub samples: usize,
}

impl ProbeSpec {
    pub fn new(center: PlanePoint, direction: PlanePoint, radius: f64, samples: usize) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidParameter(format!("radius must be positive, got {radius}")));
        }
        if samples < 8 {
            return Err(Error::InvalidParameter(format!(
                "at least 8 samples required, got {samples}"
            )));
        }
        let zero = Complex64::new(0.0, 0.0);
        if direction.z == zero && direction.w == zero {
            return Err(Error::InvalidParameter("direction must be nonzero".into()));
        }
        if !center.is_finite() || !direction.is_finite() {
            return Err(Error::InvalidParameter("probe coordinates must be finite".into()));
        }
        Ok(Self {
            center,
            direction,
            radius,
            samples,
        })
    }

    /// Point at `λ = radius·e^{2πij/samples}`.
    pub fn circle_point(&self, j: usize) -> PlanePoint {
        self.center.offset(&self.direction, circle_lambda(self.radius, self.samples, j))
    }
}

fn circle_lambda(radius: f64, samples: usize, j: usize) -> Complex64 {
    Complex64::from_polar(radius, 2.0 * PI * j as f64 / samples as f64)
}

/// Result of an equal-angle circle quadrature of a function of `λ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CircleMean {
    pub center_value: f64,
    pub circle_mean: f64,
    pub deficit: f64,
    pub valid_samples: usize,
}

/// Sub-mean-value test of `f` on the circle `|λ| = radius`.
///
/// `f` returns `None` where it is undefined; such samples are excluded.
/// Samples are evaluated in parallel and summed in index order.
pub fn circle_submean<F>(radius: f64, samples: usize, f: F) -> Result<CircleMean>
where
    F: Fn(Complex64) -> Option<f64> + Sync,
{
    let center_value = f(Complex64::new(0.0, 0.0)).ok_or(Error::Undefined)?;
    let values: Vec<Option<f64>> = (0..samples)
        .into_par_iter()
        .map(|j| f(circle_lambda(radius, samples, j)))
        .collect();
    let (sum, valid) = values
        .iter()
        .flatten()
        .fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    if 2 * valid < samples || valid == 0 {
        return Err(Error::InsufficientSamples { valid, samples });
    }
    let circle_mean = sum / valid as f64;
    Ok(CircleMean {
        center_value,
        circle_mean,
        deficit: circle_mean - center_value,
        valid_samples: valid,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubmeanReport {
    pub probe: ProbeSpec,
    pub n: usize,
    pub center_value: f64,
    pub circle_mean: f64,
    /// `circle_mean - center_value`; non-negative for subharmonic functions.
    pub deficit: f64,
    pub valid_samples: usize,
}

/// Sub-mean-value test of `λ ↦ u_n(a + λb)`.
pub fn submean_check(probe: &ProbeSpec, n: usize) -> Result<SubmeanReport> {
    u_n(probe.center, n)?;
    let mean = circle_submean(probe.radius, probe.samples, |lambda| {
        u_n(probe.center.offset(&probe.direction, lambda), n).ok()
    })?;
    Ok(SubmeanReport {
        probe: *probe,
        n,
        center_value: mean.center_value,
        circle_mean: mean.circle_mean,
        deficit: mean.deficit,
        valid_samples: mean.valid_samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn u_zero_examples() {
        assert_eq!(u_n(PlanePoint::real(1.0, 3.0), 0).unwrap(), -1.5);
        assert_eq!(u_n(PlanePoint::real(1.0, 1.0), 0).unwrap(), -1.0);
    }

    #[test]
    fn u_undefined_at_origin_state() {
        assert_eq!(u_n(PlanePoint::real(0.0, 0.0), 0), Err(Error::Undefined));
        assert!(u_n(PlanePoint::real(-400.0, -400.0), 2).is_err());
    }

    #[test]
    fn profile_needs_four_steps() {
        assert!(matches!(
            u_profile(PlanePoint::real(1.0, 3.0), 1),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn profile_from_origin_in_range() {
        let p = u_profile(PlanePoint::real(0.0, 0.0), 10).unwrap();
        // u_0 is undefined at the origin itself
        assert_eq!(p.values[0].0, 1);
        assert!(p.values.iter().all(|&(_, u)| (-2.0..=0.0).contains(&u)));
    }

    #[test]
    fn probe_validation() {
        let a = PlanePoint::real(2.0, 4.0);
        let b = PlanePoint::real(1.0, 0.0);
        assert!(ProbeSpec::new(a, b, 0.0, 16).is_err());
        assert!(ProbeSpec::new(a, b, 0.1, 7).is_err());
        assert!(ProbeSpec::new(a, PlanePoint::real(0.0, 0.0), 0.1, 16).is_err());
        assert!(ProbeSpec::new(a, b, 0.1, 8).is_ok());
    }

    #[test]
    fn insufficient_samples() {
        let r = circle_submean(1.0, 16, |l| if l.re > 0.5 { Some(1.0) } else if l.norm() == 0.0 { Some(0.0) } else { None });
        assert!(matches!(r, Err(Error::InsufficientSamples { samples: 16, .. })));
    }

    #[test]
    fn harmonic_and_quadratic_oracles() {
        let h = circle_submean(0.5, 64, |l| Some(l.re)).unwrap();
        assert!(h.deficit.abs() <= 1e-14);
        let q = circle_submean(0.5, 64, |l| Some(l.norm_sqr())).unwrap();
        assert!((q.deficit - 0.25).abs() <= 1e-12);
    }
}
