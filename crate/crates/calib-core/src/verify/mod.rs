//! Numerical certification of constructed families: tangent-frame
//! sampling, calibration-ratio and coassociative-vanishing checks, and
//! decay-rate fits for the ruled deformations.

use thiserror::Error;

mod checks;
mod families;
mod frames;
mod rate;

pub use checks::{
    check_calibrated, check_coassociative, CalibrationReport, CoassocReport, Failure,
};
pub use families::{
    assoc_cone_family, assoc_r_u1sq_family, cayley_cone_family, cayley_su2_family,
    coassoc_cone_family, ruled_family, torus_cone_family,
};
pub use frames::{
    finite_difference_frames, tangent_frames, FrameSample, FrameSet, FrameSource, Parametrization,
};
pub use rate::{asymptotic_rate, RateFit, RateOutcome, RuledParams};

/// Errors raised by the certification layer.
#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("sample count must be at least 1")]
    NoSamples,
    #[error("finite-difference step {0} must be positive and finite")]
    BadStep(f64),
    #[error("form degree {form} does not match frame size {frame}")]
    DegreeMismatch { form: usize, frame: usize },
    #[error("samples live in dimension {got} but {expected} is required")]
    AmbientMismatch { got: usize, expected: usize },
    #[error("family construction needs the {expected} system, got {got}")]
    WrongSystem {
        expected: &'static str,
        got: &'static str,
    },
    #[error("radii must be positive, strictly increasing, and span at least two decades")]
    BadRadii,
    #[error("the (s, t) sampling window is empty")]
    EmptyWindow,
}
