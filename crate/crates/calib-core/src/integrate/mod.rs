//! Numerical integration of the cataloged systems.
//!
//! Integration records every accepted step together with its derivative,
//! so trajectories support dense interpolation. The conserved quantities
//! of the system are monitored along the way: their observed drift is the
//! accuracy audit for the whole pipeline.

mod period;
mod rk;
mod sweep;
mod trajectory;

pub use period::{detect_period, loop_consistency, PeriodicityResult};
pub use sweep::{sweep, SweepConfig, SweepRow};
pub use trajectory::{DriftEntry, Trajectory};

use crate::symbolic::CompiledPoly;
use crate::systems::{QuantityKind, SystemSpec};
use rk::{rk4_step, DopriStepper, Rk4Scratch};
use thiserror::Error;

/// Tolerance within which the initial state must satisfy the system's
/// constraints.
pub const CONSTRAINT_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum IntegrateError {
    #[error("initial state has {got} coordinates, expected {expected}")]
    StateDim { got: usize, expected: usize },
    #[error("time span ({start}, {end}) is not a positive finite interval")]
    BadSpan { start: f64, end: f64 },
    #[error("{parameter} must be positive and finite, got {value}")]
    BadParameter { parameter: &'static str, value: f64 },
    #[error("initial state violates the {name} = 0 constraint by {value:e}")]
    ConstraintViolation { name: &'static str, value: f64 },
    #[error("state became non-finite at t = {t}")]
    NonFinite { t: f64 },
    #[error("step budget of {max_steps} steps exhausted at t = {t}")]
    StepBudget { t: f64, max_steps: usize },
    #[error("adaptive step size underflowed at t = {t}")]
    StepUnderflow { t: f64 },
}

/// Stepping scheme.
#[derive(Debug, Clone, Copy)]
pub enum Method {
    /// Classical fourth-order scheme with a fixed step.
    Rk4Fixed { step: f64 },
    /// Dormand-Prince 5(4) embedded pair with proportional-integral step
    /// control.
    Rk45Adaptive { rel_tol: f64, abs_tol: f64 },
}

#[derive(Debug, Clone, Copy)]
pub struct IntegratorConfig {
    pub method: Method,
    pub t_span: (f64, f64),
    pub max_steps: usize,
    /// Project the state back to the unit sphere after each accepted
    /// step. Only meaningful for systems whose flow preserves the sphere.
    pub renormalize: bool,
}

impl IntegratorConfig {
    /// Fixed-step configuration over `[0, t_end]`.
    pub fn rk4(step: f64, t_end: f64) -> Self {
        IntegratorConfig {
            method: Method::Rk4Fixed { step },
            t_span: (0.0, t_end),
            max_steps: 1_000_000,
            renormalize: false,
        }
    }

    /// Adaptive configuration over `[0, t_end]`.
    pub fn adaptive(rel_tol: f64, abs_tol: f64, t_end: f64) -> Self {
        IntegratorConfig {
            method: Method::Rk45Adaptive { rel_tol, abs_tol },
            t_span: (0.0, t_end),
            max_steps: 1_000_000,
            renormalize: false,
        }
    }

    fn validate(&self) -> Result<(), IntegrateError> {
        let (start, end) = self.t_span;
        if !(start.is_finite() && end.is_finite() && end > start) {
            return Err(IntegrateError::BadSpan { start, end });
        }
        match self.method {
            Method::Rk4Fixed { step } => {
                if !(step.is_finite() && step > 0.0) {
                    return Err(IntegrateError::BadParameter {
                        parameter: "step",
                        value: step,
                    });
                }
            }
            Method::Rk45Adaptive { rel_tol, abs_tol } => {
                if !(rel_tol.is_finite() && rel_tol > 0.0) {
                    return Err(IntegrateError::BadParameter {
                        parameter: "rel_tol",
                        value: rel_tol,
                    });
                }
                if !(abs_tol.is_finite() && abs_tol > 0.0) {
                    return Err(IntegrateError::BadParameter {
                        parameter: "abs_tol",
                        value: abs_tol,
                    });
                }
            }
        }
        Ok(())
    }
}

/// One monitored quantity: a compiled polynomial evaluated over the
/// parameter values followed by the state.
struct Monitor {
    name: &'static str,
    poly: CompiledPoly,
    initial: f64,
    max_drift: f64,
}

struct MonitorSet {
    values: Vec<f64>,
    num_params: usize,
    monitors: Vec<Monitor>,
}

impl MonitorSet {
    fn new(spec: &SystemSpec, state0: &[f64]) -> Self {
        let params = spec.param_values();
        let num_params = params.len();
        let mut values = params;
        values.extend_from_slice(state0);
        let on_sphere = {
            let norm_sq: f64 = state0.iter().map(|v| v * v).sum();
            (norm_sq - 1.0).abs() <= CONSTRAINT_TOLERANCE
        };
        let mut set = MonitorSet {
            values,
            num_params,
            monitors: Vec::new(),
        };
        for q in spec.conserved_quantities() {
            let keep = match q.kind {
                QuantityKind::Conserved => true,
                QuantityKind::ConservedOnUnitSphere => on_sphere,
                QuantityKind::Multiplier { .. } => false,
            };
            if !keep {
                continue;
            }
            let poly = q.poly.compile();
            let initial = poly.eval(&set.values);
            set.monitors.push(Monitor {
                name: q.name,
                poly,
                initial,
                max_drift: 0.0,
            });
        }
        set
    }

    fn observe(&mut self, state: &[f64]) {
        self.values[self.num_params..].copy_from_slice(state);
        for m in &mut self.monitors {
            let drift = (m.poly.eval(&self.values) - m.initial).abs();
            if drift > m.max_drift {
                m.max_drift = drift;
            }
        }
    }

    fn into_entries(self) -> Vec<DriftEntry> {
        self.monitors
            .into_iter()
            .map(|m| DriftEntry {
                name: m.name,
                initial: m.initial,
                max_drift: m.max_drift,
            })
            .collect()
    }
}

fn check_constraints(spec: &SystemSpec, state0: &[f64]) -> Result<(), IntegrateError> {
    let params = spec.param_values();
    let mut values = params;
    values.extend_from_slice(state0);
    for (name, poly) in spec.initial_constraints() {
        let value = poly.eval_f64(&values);
        if value.abs() > CONSTRAINT_TOLERANCE {
            return Err(IntegrateError::ConstraintViolation { name, value });
        }
    }
    Ok(())
}

fn renormalize_state(y: &mut [f64]) {
    let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm > 0.0 {
        for v in y.iter_mut() {
            *v /= norm;
        }
    }
}

/// Integrates the system from `state0` over the configured span.
///
/// The trajectory stores every accepted step and the drift of each
/// conserved quantity of the system. Systems with initial-state
/// constraints reject states violating them beyond
/// [`CONSTRAINT_TOLERANCE`].
pub fn integrate(
    spec: &SystemSpec,
    state0: &[f64],
    config: &IntegratorConfig,
) -> Result<Trajectory, IntegrateError> {
    config.validate()?;
    let dim = spec.ambient_dim();
    if state0.len() != dim {
        return Err(IntegrateError::StateDim {
            got: state0.len(),
            expected: dim,
        });
    }
    check_constraints(spec, state0)?;
    let rhs = spec.rhs();
    let mut monitors = MonitorSet::new(spec, state0);
    let mut traj = Trajectory::new(dim);
    let (t_start, t_end) = config.t_span;

    let mut y = state0.to_vec();
    let mut dy = vec![0.0; dim];
    rhs(&y, &mut dy);
    traj.push_node(t_start, &y, &dy);
    monitors.observe(&y);

    match config.method {
        Method::Rk4Fixed { step } => {
            let mut scratch = Rk4Scratch::new(dim);
            let mut y_next = vec![0.0; dim];
            let mut t = t_start;
            let mut steps = 0usize;
            while t < t_end {
                if steps >= config.max_steps {
                    return Err(IntegrateError::StepBudget {
                        t,
                        max_steps: config.max_steps,
                    });
                }
                let h = step.min(t_end - t);
                rk4_step(&rhs, &y, h, &mut y_next, &mut scratch);
                if !y_next.iter().all(|v| v.is_finite()) {
                    return Err(IntegrateError::NonFinite { t: t + h });
                }
                y.copy_from_slice(&y_next);
                if config.renormalize {
                    renormalize_state(&mut y);
                }
                // Guard against a final fractional step rounding short.
                t = if t_end - (t + h) < step * 1e-9 {
                    t_end
                } else {
                    t + h
                };
                rhs(&y, &mut dy);
                traj.push_node(t, &y, &dy);
                monitors.observe(&y);
                steps += 1;
            }
        }
        Method::Rk45Adaptive { rel_tol, abs_tol } => {
            let span = t_end - t_start;
            let mut stepper = DopriStepper::new(dim);
            let mut y_next = vec![0.0; dim];
            let mut t = t_start;
            let mut h = initial_step(&y, &dy, abs_tol, rel_tol, span);
            let mut err_prev: f64 = 1.0;
            let mut steps = 0usize;
            let h_min = span * 1e-14;
            while t < t_end {
                if steps >= config.max_steps {
                    return Err(IntegrateError::StepBudget {
                        t,
                        max_steps: config.max_steps,
                    });
                }
                steps += 1;
                if h < h_min {
                    return Err(IntegrateError::StepUnderflow { t });
                }
                let remaining = t_end - t;
                let last = h >= remaining;
                let h_try = if last { remaining } else { h };
                let err = stepper.try_step(&rhs, &y, h_try, abs_tol, rel_tol, &mut y_next);
                if !err.is_finite() {
                    h = h_try * 0.1;
                    continue;
                }
                if err > 1.0 {
                    h = h_try * (0.9 * err.powf(-0.2)).clamp(0.1, 1.0);
                    continue;
                }
                stepper.accept();
                t = if last { t_end } else { t + h_try };
                y.copy_from_slice(&y_next);
                if !y.iter().all(|v| v.is_finite()) {
                    return Err(IntegrateError::NonFinite { t });
                }
                if config.renormalize {
                    renormalize_state(&mut y);
                    rhs(&y, &mut dy);
                    stepper.reset();
                } else {
                    dy.copy_from_slice(stepper.accepted_derivative());
                }
                traj.push_node(t, &y, &dy);
                monitors.observe(&y);
                let err_floor = err.max(1e-10);
                let factor = 0.9 * err_floor.powf(-0.14) * err_prev.powf(0.08);
                h = h_try * factor.clamp(0.2, 5.0);
                err_prev = err_floor;
            }
        }
    }

    traj.set_drift(monitors.into_entries());
    Ok(traj)
}

/// Conservative starting step for the adaptive scheme, refined by the
/// controller within a few steps.
fn initial_step(y: &[f64], dy: &[f64], abs_tol: f64, rel_tol: f64, span: f64) -> f64 {
    let n = y.len() as f64;
    let d0 = (y
        .iter()
        .map(|v| {
            let sc = abs_tol + rel_tol * v.abs();
            (v / sc) * (v / sc)
        })
        .sum::<f64>()
        / n)
        .sqrt();
    let d1 = (dy
        .iter()
        .zip(y)
        .map(|(f, v)| {
            let sc = abs_tol + rel_tol * v.abs();
            (f / sc) * (f / sc)
        })
        .sum::<f64>()
        / n)
        .sqrt();
    let h0 = if d0 > 1e-5 && d1 > 1e-5 {
        0.01 * d0 / d1
    } else {
        1e-6 * span
    };
    h0.min(span / 10.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::SystemSpec;

    fn unit7(raw: [f64; 7]) -> Vec<f64> {
        let norm = raw.iter().map(|v| v * v).sum::<f64>().sqrt();
        raw.iter().map(|v| v / norm).collect()
    }

    #[test]
    fn zero_state_is_stationary() {
        let spec = SystemSpec::cayley_su2().unwrap();
        let traj = integrate(&spec, &[0.0; 8], &IntegratorConfig::rk4(0.01, 1.0)).unwrap();
        for v in traj.final_state() {
            assert_eq!(*v, 0.0);
        }
    }

    #[test]
    fn fixed_step_lands_exactly_on_the_endpoint() {
        let spec = SystemSpec::coassoc_u1sq_cone().unwrap();
        let y0 = unit7([0.3, 0.5, 0.0, 0.4, 0.3, 0.2, 0.6]);
        // Constraint: the cubic must be purely imaginary at the start.
        let y0 = constraint_projected(y0);
        let traj = integrate(&spec, &y0, &IntegratorConfig::rk4(0.007, 1.0)).unwrap();
        assert_eq!(traj.t_end(), 1.0);
    }

    fn constraint_projected(mut y: Vec<f64>) -> Vec<f64> {
        // Rotate z3 so that Re(z1 z2 z3) = 0.
        let z1 = num::complex::Complex64::new(y[1], y[2]);
        let z2 = num::complex::Complex64::new(y[3], y[4]);
        let z3 = num::complex::Complex64::new(y[5], y[6]);
        let phase = (z1 * z2 * z3).arg();
        let fix = num::complex::Complex64::from_polar(
            1.0,
            std::f64::consts::FRAC_PI_2 - phase,
        );
        let z3 = z3 * fix;
        y[5] = z3.re;
        y[6] = z3.im;
        y
    }

    #[test]
    fn constraint_violations_are_rejected() {
        let spec = SystemSpec::coassoc_u1sq_cone().unwrap();
        let y0 = unit7([0.1, 0.6, 0.1, 0.5, 0.2, 0.4, 0.3]);
        let err = integrate(&spec, &y0, &IntegratorConfig::rk4(0.01, 1.0)).unwrap_err();
        assert!(matches!(
            err,
            IntegrateError::ConstraintViolation { name: "cubic-re", .. }
        ));
    }

    #[test]
    fn adaptive_integration_matches_fixed_step() {
        let spec = SystemSpec::assoc_u1_cone([2, -1, -1]).unwrap();
        let y0 = unit7([0.2, 0.5, 0.0, 0.4, 0.1, 0.3, 0.2]);
        let fine = integrate(&spec, &y0, &IntegratorConfig::rk4(1e-4, 2.0)).unwrap();
        let adaptive =
            integrate(&spec, &y0, &IntegratorConfig::adaptive(1e-10, 1e-12, 2.0)).unwrap();
        let a = fine.final_state();
        let b = adaptive.final_state();
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() < 1e-8);
        }
    }

    #[test]
    fn drift_stays_small_on_a_conserving_system() {
        let spec = SystemSpec::assoc_u1_cone([2, -1, -1]).unwrap();
        let y0 = unit7([0.1, 0.7, 0.0, 0.3, 0.4, 0.2, 0.5]);
        let traj = integrate(&spec, &y0, &IntegratorConfig::rk4(1e-3, 5.0)).unwrap();
        assert!(!traj.drift().is_empty());
        assert!(traj.max_drift() < 1e-9, "drift {}", traj.max_drift());
        let names: Vec<_> = traj.drift().iter().map(|d| d.name).collect();
        assert!(names.contains(&"norm-sq"));
        assert!(names.contains(&"cubic-re"));
        assert!(names.contains(&"axis-weight-sq"));
    }

    #[test]
    fn renormalization_pins_the_norm_without_hurting_other_drift() {
        let spec = SystemSpec::coassoc_u1sq_cone().unwrap();
        let y0 = constraint_projected(unit7([0.3, 0.5, 0.0, 0.4, 0.3, 0.2, 0.6]));
        let mut config = IntegratorConfig::rk4(1e-3, 5.0);
        config.renormalize = true;
        let traj = integrate(&spec, &y0, &config).unwrap();
        let norm_drift = traj
            .drift()
            .iter()
            .find(|d| d.name == "norm-sq")
            .unwrap()
            .max_drift;
        assert!(norm_drift < 1e-13);
        assert!(traj.max_drift() < 1e-9);
    }

    #[test]
    fn blowup_is_reported_not_propagated() {
        // With coupling on, equal negative real coordinates obey
        // u' = -lambda u^2 and reach -infinity in finite time.
        let spec = SystemSpec::assoc_r_u1sq(4.0, 0.0, 0.0).unwrap();
        let y0 = vec![0.0, -5.0, 0.0, -5.0, 0.0, -5.0, 0.0];
        let err = integrate(&spec, &y0, &IntegratorConfig::rk4(0.01, 50.0)).unwrap_err();
        assert!(matches!(
            err,
            IntegrateError::NonFinite { .. } | IntegrateError::StepBudget { .. }
        ));
    }

    #[test]
    fn adaptive_spans_long_intervals_within_budget() {
        let spec = SystemSpec::assoc_u1_cone([2, -1, -1]).unwrap();
        let y0 = unit7([0.1, 0.7, 0.0, 0.3, 0.4, 0.2, 0.5]);
        let traj =
            integrate(&spec, &y0, &IntegratorConfig::adaptive(1e-10, 1e-12, 100.0)).unwrap();
        assert_eq!(traj.t_end(), 100.0);
        assert!(traj.max_drift() < 1e-7, "drift {}", traj.max_drift());
    }

    #[test]
    fn bad_configs_are_rejected() {
        let spec = SystemSpec::cayley_su2().unwrap();
        let bad_span = IntegratorConfig {
            t_span: (1.0, 1.0),
            ..IntegratorConfig::rk4(0.01, 1.0)
        };
        assert!(matches!(
            integrate(&spec, &[0.0; 8], &bad_span),
            Err(IntegrateError::BadSpan { .. })
        ));
        let bad_step = IntegratorConfig::rk4(-0.1, 1.0);
        assert!(matches!(
            integrate(&spec, &[0.0; 8], &bad_step),
            Err(IntegrateError::BadParameter { .. })
        ));
        assert!(matches!(
            integrate(&spec, &[0.0; 4], &IntegratorConfig::rk4(0.1, 1.0)),
            Err(IntegrateError::StateDim { got: 4, expected: 8 })
        ));
    }
}
