//! Construction and numerical certification of calibrated submanifolds of
//! Euclidean 7- and 8-space.

pub mod forms;
pub mod integrate;
pub mod symbolic;
pub mod systems;
pub mod verify;

pub use forms::{AlternatingForm, FormError, MultiIndex};
pub use integrate::{
    detect_period, integrate, loop_consistency, sweep, DriftEntry, IntegrateError,
    IntegratorConfig, Method, PeriodicityResult, SweepConfig, SweepRow, Trajectory,
};
pub use symbolic::{
    ActionSpec, DiffReport, Polynomial, PolyVectorField, SymbolicError, VarTable,
};
pub use systems::{
    ConservedQuantity, QuantityKind, SystemError, SystemKind, SystemSpec,
};
pub use verify::{
    asymptotic_rate, check_calibrated, check_coassociative, finite_difference_frames,
    tangent_frames, CalibrationReport, CoassocReport, FrameSample, FrameSet, FrameSource,
    Parametrization, RateFit, RateOutcome, RuledParams, VerifyError,
};
