//! Curvature functionals and integral-inequality checkers for parametric
//! hypersurfaces of the three space forms.
//!
//! The crate is `no_std`-compatible (requires `alloc`); the `std` feature
//! (default) only switches float intrinsics and error-trait plumbing.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod ambient;
pub mod fixtures;
pub mod hypersurface;
pub mod linalg;
pub mod math;
pub mod measure;
pub mod verifier;

use alloc::string::String;
use core::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Point or vector violates the embedding-model constraint.
    OffModel(f64),
    /// Two ambient vectors do not share a base point.
    MismatchedBase,
    /// Distance gradient undefined: coincident points or cut locus.
    SingularGradient(f64),
    /// First fundamental form rank-deficient or ill-conditioned.
    DegenerateImmersion { cond: f64 },
    /// Non-finite value produced while evaluating a field or integrand.
    Evaluation(String),
    /// A documented operation precondition does not hold.
    Precondition(String),
    /// Samples not contained in an open hemisphere.
    Hemisphere,
    /// Self-shrinker residual above threshold.
    NotAShrinker(f64),
    /// Test-function support touches the chart boundary.
    Support(f64),
    /// Sublevel boundary could not be traced.
    Tracing(String),
    InvalidParameter(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::OffModel(d) => write!(f, "point violates model constraint (deviation {d:.3e})"),
            Error::MismatchedBase => write!(f, "ambient vectors have different base points"),
            Error::SingularGradient(r) => {
                write!(f, "distance gradient singular at rho = {r:.6e}")
            }
            Error::DegenerateImmersion { cond } => {
                write!(f, "degenerate first fundamental form (cond {cond:.3e})")
            }
            Error::Evaluation(s) => write!(f, "evaluation error: {s}"),
            Error::Precondition(s) => write!(f, "precondition violated: {s}"),
            Error::Hemisphere => write!(f, "samples are not contained in an open hemisphere"),
            Error::NotAShrinker(r) => write!(f, "not a self-shrinker (residual {r:.3e})"),
            Error::Support(v) => {
                write!(f, "test function support touches the chart boundary (value {v:.3e})")
            }
            Error::Tracing(s) => write!(f, "boundary tracing failed: {s}"),
            Error::InvalidParameter(s) => write!(f, "invalid parameter: {s}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;

pub use ambient::{AmbientPoint, AmbientVector, SpaceForm, SpaceFormKind};
pub use hypersurface::{CurvatureFrame, Immersion, Jets};
pub use measure::{BallRule, DomainSpec, EnclosingBall, IntegralResult, RadialProfile};
pub use verifier::{
    CheckResult, InequalityReport, MeanValueMode, TentFace, TestFunction, Tolerances, Verdict,
};
