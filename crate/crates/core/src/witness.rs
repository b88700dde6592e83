//! Essential-singularity witnesses.
//!
//! Along the complex line `(ζ, 2ζ)` the first coordinate of `F` is
//! `e^{-3ζ} + 3ζ = 4ζ·h(ζ) + 1` with
//!
//! ```text
//! h(ζ) = (e^{-3ζ} + 3ζ - 1) / (4ζ)
//! ```
//!
//! a transcendental entire function. A witness sequence is a list of
//! points `ζ_k → ∞` with `h(ζ_k) = c` for a prescribed target `c`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::dynamics::{apply_f, safe_exp, Overflow, PlanePoint};
use crate::{Error, Result};

/// Below this modulus `h` is evaluated from its Taylor series.
pub const SERIES_CUTOFF: f64 = 1e-3;
/// Number of Taylor terms used below [`SERIES_CUTOFF`].
pub const SERIES_TERMS: usize = 12;
/// Acceptance threshold for `|h(ζ) - c|`.
pub const WITNESS_TOL: f64 = 1e-8;
/// First branch index for the general solver.
pub const DEFAULT_FIRST_BRANCH: i64 = 3;

const FIXED_POINT_MAX_ITERS: usize = 100;
const FIXED_POINT_STEP_TOL: f64 = 1e-12;
const NEWTON_MAX_ITERS: usize = 20;

/// Target value whose witnesses are the exact family `2πik/3`.
pub const EXACT_TARGET: Complex64 = Complex64::new(0.75, 0.0);

/// `h(ζ) = (e^{-3ζ} + 3ζ - 1) / (4ζ)`, with `h(0) = 0`.
pub fn h_eval(zeta: Complex64) -> std::result::Result<Complex64, Overflow> {
    if zeta.norm() < SERIES_CUTOFF {
        Ok(h_series(zeta))
    } else {
        h_direct(zeta)
    }
}

pub(crate) fn h_direct(zeta: Complex64) -> std::result::Result<Complex64, Overflow> {
    let e = safe_exp(-3.0 * zeta)?;
    Ok((e + 3.0 * zeta - 1.0) / (4.0 * zeta))
}

/// `(1/4) Σ_{k=2}^{13} (-3)^k ζ^{k-1} / k!`, evaluated by Horner's rule.
pub(crate) fn h_series(zeta: Complex64) -> Complex64 {
    // coefficient of ζ^{k-1} is (-3)^k / (4 k!)
    let mut coeffs = [0.0f64; SERIES_TERMS];
    let mut term = 1.0f64;
    for k in 1..=SERIES_TERMS + 1 {
        term *= -3.0 / k as f64;
        if k >= 2 {
            coeffs[k - 2] = term / 4.0;
        }
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        acc = acc * zeta + c;
    }
    acc * zeta
}

/// Homogeneous pair `[p : q]` scaled so that `max(|p|, |q|) = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProjectiveDirection {
    pub p: Complex64,
    pub q: Complex64,
    pub degenerate: bool,
}

impl ProjectiveDirection {
    pub fn from_pair(p: Complex64, q: Complex64) -> Self {
        let scale = p.norm().max(q.norm());
        if !(scale > 0.0) || !scale.is_finite() {
            return Self::degenerate();
        }
        Self {
            p: p / scale,
            q: q / scale,
            degenerate: false,
        }
    }

    pub fn degenerate() -> Self {
        let zero = Complex64::new(0.0, 0.0);
        Self {
            p: zero,
            q: zero,
            degenerate: true,
        }
    }
}

/// Direction of `F(ζ, 2ζ)` in the line at infinity.
pub fn image_direction(zeta: Complex64) -> ProjectiveDirection {
    match apply_f(PlanePoint::new(zeta, 2.0 * zeta)) {
        Ok(img) => ProjectiveDirection::from_pair(img.z, img.w),
        Err(Overflow) => ProjectiveDirection::degenerate(),
    }
}

/// Relative residual of `e^{-3ζ} + 3ζ = 4ζ·h(ζ) + 1`.
pub fn first_coord_identity_residual(zeta: Complex64) -> Result<f64> {
    if zeta == Complex64::new(0.0, 0.0) {
        return Err(Error::Precondition("zeta must be nonzero".into()));
    }
    let lhs = safe_exp(-3.0 * zeta)? + 3.0 * zeta;
    let rhs = 4.0 * zeta * h_eval(zeta)? + 1.0;
    Ok((lhs - rhs).norm() / lhs.norm().max(1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BranchFailure {
    pub branch: i64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessSequence {
    pub target: Complex64,
    /// Branch index of each witness.
    pub branches: Vec<i64>,
    pub zetas: Vec<Complex64>,
    /// `|h(ζ_k) - c|`.
    pub residuals: Vec<f64>,
    /// `|ζ_k|`.
    pub moduli: Vec<f64>,
    /// True when the closed-form family `2πik/3` was used.
    pub exact_family: bool,
    pub failures: Vec<BranchFailure>,
}

impl WitnessSequence {
    pub fn len(&self) -> usize {
        self.zetas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.zetas.is_empty()
    }

    pub fn moduli_increasing(&self) -> bool {
        self.moduli.windows(2).all(|m| m[1] > m[0])
    }
}

/// Solve `h(ζ) = c` for `m` witnesses, starting at branch [`DEFAULT_FIRST_BRANCH`].
pub fn find_witnesses(c: Complex64, m: usize) -> Result<WitnessSequence> {
    find_witnesses_from(c, m, DEFAULT_FIRST_BRANCH)
}

/// Solve `h(ζ) = c` on branches `first_branch .. first_branch + m`.
///
/// For `c = 3/4` the roots are exactly `ζ = 2πik/3`, `k = 1..=m`. Otherwise
/// `h(ζ) = c` is equivalent (for `ζ ≠ 0`) to
/// `g(ζ) = e^{-3ζ} - (4c - 3)ζ - 1 = 0`, whose roots near branch `k` are
/// fixed points of `ζ ↦ -(Log((4c - 3)ζ + 1) + 2πik) / 3`. The fixed-point
/// iterate is polished with Newton steps on `g`. Branches that do not reach
/// [`WITNESS_TOL`] are reported in `failures` and skipped.
pub fn find_witnesses_from(c: Complex64, m: usize, first_branch: i64) -> Result<WitnessSequence> {
    if m == 0 {
        return Err(Error::InvalidParameter("witness count must be at least 1".into()));
    }
    if !c.is_finite() {
        return Err(Error::InvalidParameter("target must be finite".into()));
    }

    let mut seq = WitnessSequence {
        target: c,
        branches: Vec::with_capacity(m),
        zetas: Vec::with_capacity(m),
        residuals: Vec::with_capacity(m),
        moduli: Vec::with_capacity(m),
        exact_family: c == EXACT_TARGET,
        failures: Vec::new(),
    };

    let solved: Vec<(i64, std::result::Result<Complex64, String>)> = if seq.exact_family {
        (1..=m as i64)
            .map(|k| (k, Ok(Complex64::new(0.0, 2.0 * PI * k as f64 / 3.0))))
            .collect()
    } else {
        let slope = 4.0 * c - 3.0;
        (first_branch..first_branch + m as i64)
            .into_par_iter()
            .map(|k| (k, solve_branch(slope, k)))
            .collect()
    };

    for (k, outcome) in solved {
        let checked = outcome.and_then(|zeta| match h_eval(zeta) {
            Ok(h) if (h - c).norm() < WITNESS_TOL => Ok((zeta, (h - c).norm())),
            Ok(h) => Err(format!("residual {:e} above tolerance", (h - c).norm())),
            Err(Overflow) => Err("h overflowed at the solver output".into()),
        });
        match checked {
            Ok((zeta, residual)) => {
                seq.branches.push(k);
                seq.zetas.push(zeta);
                seq.residuals.push(residual);
                seq.moduli.push(zeta.norm());
            }
            Err(reason) => seq.failures.push(BranchFailure { branch: k, reason }),
        }
    }
    Ok(seq)
}

fn solve_branch(slope: Complex64, k: i64) -> std::result::Result<Complex64, String> {
    let shift = Complex64::new(0.0, 2.0 * PI * k as f64);
    let mut zeta = -shift / 3.0;
    for _ in 0..FIXED_POINT_MAX_ITERS {
        let next = -((slope * zeta + 1.0).ln() + shift) / 3.0;
        if !next.is_finite() {
            break;
        }
        let step = (next - zeta).norm();
        zeta = next;
        if step <= FIXED_POINT_STEP_TOL * zeta.norm().max(1.0) {
            break;
        }
    }

    let g = |z: Complex64| -> std::result::Result<(Complex64, Complex64), Overflow> {
        let e = safe_exp(-3.0 * z)?;
        Ok((e - slope * z - 1.0, -3.0 * e - slope))
    };
    for _ in 0..NEWTON_MAX_ITERS {
        let (value, deriv) = g(zeta).map_err(|_| "exponential overflow in Newton polish")?;
        if deriv.norm() == 0.0 {
            return Err("vanishing derivative in Newton polish".into());
        }
        let step = value / deriv;
        if !step.is_finite() {
            return Err("non-finite Newton step".into());
        }
        zeta -= step;
        if step.norm() <= 4.0 * f64::EPSILON * zeta.norm().max(1.0) {
            break;
        }
    }
    if zeta == Complex64::new(0.0, 0.0) {
        return Err("converged to the removable root at 0".into());
    }
    Ok(zeta)
}
