//! Pseudorandom verification suites over the domain and `u_n` claims.
//!
//! Every suite draws its seeds from a ChaCha8 generator seeded with a
//! 64-bit value, so a run is reproducible from `(suite, samples, seed, steps)`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::domain::{
    check_growth, check_invariance, gap_growth_slack, telescoping_residual, AlphaParam,
};
use crate::dynamics::{orbit, PlanePoint};
use crate::psh::u_from_state;
use crate::report::{float, Record};
use crate::{Error, Result};

pub const RNG_NAME: &str = "ChaCha8";
/// Relative tolerance of the telescoping suite.
pub const TELESCOPING_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Invariance,
    Growth,
    Telescoping,
    PshRange,
}

impl Suite {
    pub const ALL: [Suite; 4] = [
        Suite::Invariance,
        Suite::Growth,
        Suite::Telescoping,
        Suite::PshRange,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Invariance => "invariance",
            Suite::Growth => "growth",
            Suite::Telescoping => "telescoping",
            Suite::PshRange => "psh-range",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown suite {s:?}")))
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform on the half-open interval `(lo, hi]`.
fn open_closed<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    hi - rng.random::<f64>() * (hi - lo)
}

/// Seed and parameter drawn from `L_α` with `α ∈ (0, 10]`,
/// `Re z ∈ (1, 50]`, `Re w - Re z - α ∈ (0, 50]`, imaginary parts in `[-100, 100]`.
pub fn sample_l_alpha_seed<R: Rng>(rng: &mut R) -> (PlanePoint, AlphaParam) {
    let alpha = open_closed(rng, 0.0, 10.0);
    let zr = open_closed(rng, 1.0, 50.0);
    let wr = zr + alpha + open_closed(rng, 0.0, 50.0);
    let zi = rng.random_range(-100.0..=100.0);
    let wi = rng.random_range(-100.0..=100.0);
    let seed = PlanePoint::new(Complex64::new(zr, zi), Complex64::new(wr, wi));
    (seed, AlphaParam::new(alpha).expect("alpha drawn from (0, 10]"))
}

/// Seed in `L` with both coordinates of modulus at most `max_modulus`.
pub fn sample_l_seed_bounded<R: Rng>(rng: &mut R, max_modulus: f64) -> PlanePoint {
    loop {
        let z = Complex64::new(
            rng.random_range(1.0..max_modulus),
            rng.random_range(-max_modulus..max_modulus),
        );
        let w = Complex64::new(
            rng.random_range(1.0..max_modulus),
            rng.random_range(-max_modulus..max_modulus),
        );
        let p = PlanePoint::new(z, w);
        if z.norm() <= max_modulus && w.norm() <= max_modulus && crate::domain::in_l(&p) {
            return p;
        }
    }
}

/// Seed with all four real coordinates uniform in `[-half_width, half_width]`.
pub fn sample_box_seed<R: Rng>(rng: &mut R, half_width: f64) -> PlanePoint {
    let mut c = || rng.random_range(-half_width..=half_width);
    PlanePoint::new(Complex64::new(c(), c()), Complex64::new(c(), c()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SuiteConfig {
    pub samples: usize,
    pub seed: u64,
    pub steps: usize,
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::InvalidParameter("samples must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteOutcome {
    pub suite: Suite,
    pub config: SuiteConfig,
    pub checks: usize,
    pub violations: usize,
    /// Seeds whose orbit overflowed before `steps`.
    pub truncated: usize,
    /// Suite-specific extreme values, e.g. `min_margin` or `max_residual`.
    pub extremes: Vec<(&'static str, f64)>,
    pub first_failure: Option<PlanePoint>,
}

impl SuiteOutcome {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }

    pub fn extreme(&self, name: &str) -> Option<f64> {
        self.extremes.iter().find(|(k, _)| *k == name).map(|(_, v)| *v)
    }

    pub fn summary_record(&self) -> Record {
        let mut r = Record::new()
            .with("suite", self.suite.name())
            .with("checks", self.checks)
            .with("violations", self.violations)
            .with("truncated", self.truncated);
        for (k, v) in &self.extremes {
            r.push(*k, float(*v));
        }
        if let Some(p) = &self.first_failure {
            r = r.with_point("first_failure", p);
        }
        r.with("pass", self.passed())
    }
}

struct Tally {
    checks: usize,
    violations: usize,
    truncated: usize,
    first_failure: Option<PlanePoint>,
}

impl Tally {
    fn new() -> Self {
        Self {
            checks: 0,
            violations: 0,
            truncated: 0,
            first_failure: None,
        }
    }

    fn record(&mut self, seed: PlanePoint, ok: bool) {
        self.checks += 1;
        if !ok {
            self.violations += 1;
            self.first_failure.get_or_insert(seed);
        }
    }

    fn finish(self, suite: Suite, config: SuiteConfig, extremes: Vec<(&'static str, f64)>) -> SuiteOutcome {
        SuiteOutcome {
            suite,
            config,
            checks: self.checks,
            violations: self.violations,
            truncated: self.truncated,
            extremes,
            first_failure: self.first_failure,
        }
    }
}

pub fn run_suite(suite: Suite, config: SuiteConfig) -> Result<SuiteOutcome> {
    config.validate()?;
    let mut rng = rng(config.seed);
    let mut tally = Tally::new();
    let outcome = match suite {
        Suite::Invariance => {
            let mut min_margin = f64::INFINITY;
            let mut min_growth = f64::INFINITY;
            for _ in 0..config.samples {
                let (seed, alpha) = sample_l_alpha_seed(&mut rng);
                let report = check_invariance(seed, alpha, config.steps)?;
                let growth = gap_growth_slack(&orbit(seed, config.steps));
                tally.truncated += usize::from(report.truncated);
                min_margin = min_margin.min(report.min_margin);
                min_growth = min_growth.min(growth);
                tally.record(seed, report.all_inside && growth >= 0.0);
            }
            tally.finish(
                suite,
                config,
                vec![("min_margin", min_margin), ("min_gap_growth_slack", min_growth)],
            )
        }
        Suite::Growth => {
            let (mut min_w, mut min_z) = (f64::INFINITY, f64::INFINITY);
            for _ in 0..config.samples {
                let (seed, _) = sample_l_alpha_seed(&mut rng);
                let report = check_growth(seed, config.steps)?;
                tally.truncated += usize::from(report.truncated);
                min_w = min_w.min(report.min_w_slack);
                min_z = min_z.min(report.min_z_slack);
                tally.record(seed, report.w_bound_ok && report.z_bound_ok);
            }
            tally.finish(suite, config, vec![("min_w_slack", min_w), ("min_z_slack", min_z)])
        }
        Suite::Telescoping => {
            let mut max_residual: f64 = 0.0;
            for _ in 0..config.samples {
                let seed = sample_l_seed_bounded(&mut rng, 50.0);
                match telescoping_residual(seed, config.steps) {
                    Ok(r) => {
                        max_residual = max_residual.max(r);
                        tally.record(seed, r <= TELESCOPING_TOL);
                    }
                    Err(Error::Truncated { .. }) => tally.truncated += 1,
                    Err(e) => return Err(e),
                }
            }
            tally.finish(suite, config, vec![("max_residual", max_residual)])
        }
        Suite::PshRange => {
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            for k in 0..config.samples {
                // alternate general seeds and seeds inside L
                let seed = if k % 2 == 0 {
                    sample_box_seed(&mut rng, 10.0)
                } else {
                    sample_l_seed_bounded(&mut rng, 50.0)
                };
                let record = orbit(seed, config.steps);
                tally.truncated += usize::from(!record.is_complete());
                let mut ok = true;
                for u in record.points.iter().filter_map(u_from_state) {
                    lo = lo.min(u);
                    hi = hi.max(u);
                    ok &= (-2.0..=0.0).contains(&u);
                }
                tally.record(seed, ok);
            }
            tally.finish(suite, config, vec![("min_u", lo), ("max_u", hi)])
        }
    };
    Ok(outcome)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::in_l_alpha;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn samples_respect_their_domains() {
        let mut r = rng(1);
        for _ in 0..1000 {
            let (p, a) = sample_l_alpha_seed(&mut r);
            assert!(in_l_alpha(&p, a));
            assert!(a.value() > 0.0 && a.value() <= 10.0);
            assert!(p.z.im.abs() <= 100.0 && p.w.im.abs() <= 100.0);
            let q = sample_l_seed_bounded(&mut r, 50.0);
            assert!(crate::domain::in_l(&q) && q.z.norm() <= 50.0 && q.w.norm() <= 50.0);
        }
    }

    #[test]
    fn suites_are_deterministic() {
        let cfg = SuiteConfig { samples: 50, seed: 3, steps: 10 };
        for s in Suite::ALL {
            assert_eq!(run_suite(s, cfg).unwrap(), run_suite(s, cfg).unwrap());
        }
    }

    #[test]
    fn zero_samples_rejected() {
        let cfg = SuiteConfig { samples: 0, seed: 3, steps: 10 };
        assert!(run_suite(Suite::Growth, cfg).is_err());
    }
}
