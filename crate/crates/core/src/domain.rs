//! Membership in `L_α` and `L`, and orbit checks of invariance, growth
//! and the telescoping identity for `w_n - z_n`.

use num_complex::Complex64;
use serde::Serialize;

use crate::dynamics::compensated::{compensated_orbit, ComplexDd};
use crate::dynamics::{orbit, OrbitRecord, OrbitStatus, PlanePoint};
use crate::{Error, Result};

/// Threshold separating `L = ⋃_{α>1} L_α` from the wider `⋃_{α>0} L_α`.
pub const L_THRESHOLD: f64 = 1.0;

/// Lower bound on the per-step increase of `Re w - Re z` along orbits in `L_α`.
pub fn gap_increment_bound() -> f64 {
    1.0 - 2.0 * (-2.0f64).exp()
}

/// Domain parameter `α > 0`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct AlphaParam(f64);

impl AlphaParam {
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha > 0.0 && alpha.is_finite() {
            Ok(Self(alpha))
        } else {
            Err(Error::InvalidParameter(format!(
                "alpha must be positive and finite, got {alpha}"
            )))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// `Re w > Re z + α`, `Re z > 1`, `Re w > 1`, all strict.
pub fn in_l_alpha(p: &PlanePoint, a: AlphaParam) -> bool {
    p.w.re > p.z.re + a.0 && p.z.re > 1.0 && p.w.re > 1.0
}

/// Supremum of the admissible `α`, i.e. `Re w - Re z`, provided
/// `Re z > 1` and `Re w > 1`.
///
/// `p ∈ L_α` exactly for `0 < α < sup_alpha(p)`, and `p ∈ L` iff the value
/// exceeds [`L_THRESHOLD`].
pub fn sup_alpha(p: &PlanePoint) -> Result<f64> {
    if p.z.re > 1.0 && p.w.re > 1.0 {
        Ok(p.w.re - p.z.re)
    } else {
        Err(Error::NotInL)
    }
}

/// Membership in `⋃_{α > threshold} L_α`; `threshold = 1` gives `L`.
pub fn in_l_with_threshold(p: &PlanePoint, threshold: f64) -> bool {
    matches!(sup_alpha(p), Ok(s) if s > threshold)
}

pub fn in_l(p: &PlanePoint) -> bool {
    in_l_with_threshold(p, L_THRESHOLD)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvarianceReport {
    pub seed: PlanePoint,
    pub alpha: AlphaParam,
    /// Index of the last orbit point examined.
    pub steps_checked: usize,
    pub all_inside: bool,
    pub first_violation: Option<usize>,
    /// Minimum of `Re w_k - Re z_k - α` over the examined points.
    pub min_margin: f64,
    pub truncated: bool,
}

/// Follow the orbit of `seed` for `n` steps and test membership in `L_α`
/// at every point, including the seed.
pub fn check_invariance(seed: PlanePoint, a: AlphaParam, n: usize) -> Result<InvarianceReport> {
    if !in_l_alpha(&seed, a) {
        return Err(Error::Precondition(format!(
            "seed {seed} is not in L_alpha for alpha = {}",
            a.value()
        )));
    }
    let record = orbit(seed, n);
    let mut first_violation = None;
    let mut min_margin = f64::INFINITY;
    for (k, p) in record.points.iter().enumerate() {
        min_margin = min_margin.min(p.real_gap() - a.0);
        if first_violation.is_none() && !in_l_alpha(p, a) {
            first_violation = Some(k);
        }
    }
    Ok(InvarianceReport {
        seed,
        alpha: a,
        steps_checked: record.completed_steps(),
        all_inside: first_violation.is_none(),
        first_violation,
        min_margin,
        truncated: !record.is_complete(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthReport {
    pub seed: PlanePoint,
    pub steps_checked: usize,
    /// `Re w_k > 2·Re w_0 + k/2` for every checked `k ≥ 1`.
    pub w_bound_ok: bool,
    /// `Re z_k > Re z_0 + k/2` for every checked `k ≥ 1`.
    pub z_bound_ok: bool,
    pub min_w_slack: f64,
    pub min_z_slack: f64,
    pub truncated: bool,
}

/// Evaluate the linear growth bounds for `1 ≤ k ≤ n`.
///
/// Requires `Re z_0 > 1` and `Re w_0 > 1`, i.e. `seed ∈ L_α` for some
/// `α > 0`. With `n = 0` nothing is checked and both slacks are `+∞`.
pub fn check_growth(seed: PlanePoint, n: usize) -> Result<GrowthReport> {
    if sup_alpha(&seed)? <= 0.0 {
        return Err(Error::Precondition(format!(
            "seed {seed} has Re w <= Re z"
        )));
    }
    let record = orbit(seed, n);
    let (mut min_w, mut min_z) = (f64::INFINITY, f64::INFINITY);
    for (k, p) in record.points.iter().enumerate().skip(1) {
        let half_k = k as f64 / 2.0;
        min_w = min_w.min(p.w.re - 2.0 * seed.w.re - half_k);
        min_z = min_z.min(p.z.re - seed.z.re - half_k);
    }
    Ok(GrowthReport {
        seed,
        steps_checked: record.completed_steps(),
        w_bound_ok: min_w > 0.0,
        z_bound_ok: min_z > 0.0,
        min_w_slack: min_w,
        min_z_slack: min_z,
        truncated: !record.is_complete(),
    })
}

/// Smallest per-step slack of `Re w_{k+1} - Re z_{k+1} ≥ Re w_k - Re z_k + (1 - 2e^{-2})`
/// over an orbit record. Non-negative along orbits in `L_α`.
pub fn gap_growth_slack(record: &OrbitRecord) -> f64 {
    let bound = gap_increment_bound();
    record
        .points
        .windows(2)
        .map(|pair| pair[1].real_gap() - pair[0].real_gap() - bound)
        .fold(f64::INFINITY, f64::min)
}

fn relative_residual(lhs: Complex64, rhs: Complex64) -> f64 {
    (lhs - rhs).norm() / lhs.norm().max(1.0)
}

/// Relative residual of
/// `w_n - z_n = w_0 - z_0 + n + Σ e^{-2w_i} - Σ e^{-(z_i+w_i)}`
/// with both sides evaluated on a double-double orbit of `seed`.
pub fn telescoping_residual(seed: PlanePoint, n: usize) -> Result<f64> {
    let record = compensated_orbit(seed, n);
    if let OrbitStatus::Overflowed { step } = record.status {
        return Err(Error::Truncated {
            completed: step,
            requested: n,
        });
    }
    let mut sum = ComplexDd::default();
    for p in &record.points[..n] {
        sum = sum.add_complex(p.second_exp()?);
        sum = sum.add_complex(-p.first_exp()?);
    }
    let first = record.points[0];
    let last = record.points[n];
    let rhs = ((first.w - first.z).add_complex(Complex64::new(n as f64, 0.0)) + sum).to_complex();
    let lhs = (last.w - last.z).to_complex();
    Ok(relative_residual(lhs, rhs))
}

/// The same residual on a plain `f64` orbit record. It is dominated by the
/// rounding of the stored coordinates, roughly `ulp(|w_n|)`.
pub fn telescoping_residual_of(record: &OrbitRecord, n: usize) -> Result<f64> {
    if record.completed_steps() < n {
        return Err(Error::Truncated {
            completed: record.completed_steps(),
            requested: n,
        });
    }
    let pts = &record.points;
    let mut sum = Complex64::new(0.0, 0.0);
    for p in &pts[..n] {
        sum += crate::safe_exp(-2.0 * p.w)?;
        sum -= crate::safe_exp(-(p.z + p.w))?;
    }
    let rhs = pts[0].w - pts[0].z + n as f64 + sum;
    let lhs = pts[n].w - pts[n].z;
    Ok(relative_residual(lhs, rhs))
}

/// Step tolerance for ratio stabilization.
pub const RATIO_CAUCHY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatioSample {
    pub k: usize,
    pub z_over_w: Complex64,
    pub w_over_z: Complex64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioProfile {
    pub seed: PlanePoint,
    pub samples: Vec<RatioSample>,
    /// Smallest `k` with `|r_k - r_{k+1}| < 1e-8` for both ratios.
    pub stabilization_index: Option<usize>,
    pub truncated: bool,
}

impl RatioProfile {
    /// Ratios at the last computed step.
    pub fn final_ratios(&self) -> Option<&RatioSample> {
        self.samples.last()
    }
}

/// Tabulate `z_k / w_k` and `w_k / z_k` along the orbit of `seed`.
pub fn ratio_profile(seed: PlanePoint, n: usize) -> Result<RatioProfile> {
    if !in_l(&seed) {
        return Err(Error::Precondition(format!("seed {seed} is not in L")));
    }
    let record = orbit(seed, n);
    let samples: Vec<RatioSample> = record
        .points
        .iter()
        .enumerate()
        .map(|(k, p)| RatioSample {
            k,
            z_over_w: p.z / p.w,
            w_over_z: p.w / p.z,
        })
        .collect();
    let stabilization_index = samples
        .windows(2)
        .find(|pair| {
            (pair[0].z_over_w - pair[1].z_over_w).norm() < RATIO_CAUCHY_TOL
                && (pair[0].w_over_z - pair[1].w_over_z).norm() < RATIO_CAUCHY_TOL
        })
        .map(|pair| pair[0].k);
    Ok(RatioProfile {
        seed,
        samples,
        stabilization_index,
        truncated: !record.is_complete(),
    })
}
