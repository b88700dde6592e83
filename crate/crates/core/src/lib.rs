//! Numerical workbench for the transcendental skew-product
//!
//! ```text
//! F(z, w) = (e^{-(z+w)} + z + w,  e^{-2w} + 2w + 1)
//! ```
//!
//! on C². The crate evaluates F with overflow signalling, checks the
//! invariant domains `L_α = {Re w > Re z + α, Re z > 1, Re w > 1}` along
//! concrete orbits, computes essential-singularity witness sequences,
//! probes the functions `u_n` for the sub-mean-value property and renders
//! 2D slices of the set of points whose orbits enter `L`.

// `!(a <= b)` is used on purpose so that NaN takes the rejecting branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod basin;
pub mod domain;
pub mod dynamics;
mod error;
pub mod psh;
pub mod report;
pub mod verify;
pub mod witness;

pub use num_complex::Complex64;

pub use dynamics::{apply_f, orbit, safe_exp, OrbitRecord, OrbitStatus, Overflow, PlanePoint};
pub use error::{Error, Result};

/// Scalar type used throughout the crate. Stored values are always finite;
/// overflow is reported through [`Overflow`] instead of being stored.
pub type ComplexValue = Complex64;
