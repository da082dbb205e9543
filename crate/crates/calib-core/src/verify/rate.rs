//! Decay-rate estimation for ruled deformations of the doubled-winding cone.

use serde::Serialize;

use super::VerifyError;
use crate::systems::{cone_point, ruled_point, HarmonicPair, TorusCurve};

/// Deviations below `1e-9 * (1 + r)` are attributed to round-off and the
/// surface is reported as the exact cone.
const EXACT_SCALE: f64 = 1e-9;

/// The data of a ruled deformation to be tested for conical decay: the
/// underlying sphere curve, the modulating harmonic pair, and the `(s, t)`
/// window over which deviations are maximized.
#[derive(Debug, Clone)]
pub struct RuledParams {
    pub curve: TorusCurve,
    pub pair: HarmonicPair,
    pub window: Vec<(f64, f64)>,
}

impl RuledParams {
    /// Point of the deformed surface at ray coordinate `r` over `(s, t)`.
    pub fn point(&self, r: f64, s: f64, t: f64) -> [f64; 7] {
        let (u, v) = self.pair.eval(s, t);
        ruled_point(&self.curve.state(t), s, r, u, v)
    }
}

/// Classified outcome of the decay fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind")]
pub enum RateOutcome {
    /// All deviations vanish to round-off; no exponent is defined.
    ExactCone,
    /// Log-log least-squares fit `deviation ~ constant * r^exponent`.
    Fit {
        exponent: f64,
        constant: f64,
        residual: f64,
    },
    /// Deviations fail to decay (or are nonfinite); no fit is attempted.
    Unbounded,
}

/// Radii, per-radius deviations from the cone, and the fitted decay.
#[derive(Debug, Clone, Serialize)]
pub struct RateFit {
    pub radii: Vec<f64>,
    pub deviations: Vec<f64>,
    pub outcome: RateOutcome,
}

/// Measures how fast the ruled surface approaches its asymptotic cone: for
/// each radius in the schedule the distance from the surface point to the
/// cone is maximized over the window, then `deviation ~ C * r^alpha` is
/// fitted on log-log axes.
///
/// The distance at a sample is found by a local projection onto the cone
/// seeded at the matching `(s, t)` parameters, which is where the nearest
/// cone point sits for an asymptotically conical deformation; no global
/// search is performed.
pub fn asymptotic_rate(ruled: &RuledParams, radii: &[f64]) -> Result<RateFit, VerifyError> {
    if ruled.window.is_empty() {
        return Err(VerifyError::EmptyWindow);
    }
    let increasing = radii.windows(2).all(|w| w[0] < w[1]);
    let positive = radii.iter().all(|&r| r.is_finite() && r > 0.0);
    if radii.len() < 2 || !increasing || !positive {
        return Err(VerifyError::BadRadii);
    }
    if radii[radii.len() - 1] / radii[0] < 100.0 * (1.0 - 1e-12) {
        return Err(VerifyError::BadRadii);
    }

    let deviations: Vec<f64> = radii
        .iter()
        .map(|&r| {
            ruled
                .window
                .iter()
                .map(|&(s, t)| {
                    let p = ruled.point(r, s, t);
                    if p.iter().all(|v| v.is_finite()) {
                        cone_distance(&p, &ruled.curve, s, t)
                    } else {
                        f64::INFINITY
                    }
                })
                .fold(0.0_f64, f64::max)
        })
        .collect();

    let outcome = if deviations.iter().any(|d| !d.is_finite()) {
        RateOutcome::Unbounded
    } else if deviations
        .iter()
        .zip(radii)
        .all(|(&d, &r)| d <= EXACT_SCALE * (1.0 + r))
    {
        RateOutcome::ExactCone
    } else if deviations[deviations.len() - 1] > deviations[0] {
        RateOutcome::Unbounded
    } else {
        let (exponent, constant, residual) = log_log_fit(radii, &deviations);
        RateOutcome::Fit {
            exponent,
            constant,
            residual,
        }
    };
    Ok(RateFit {
        radii: radii.to_vec(),
        deviations,
        outcome,
    })
}

/// Distance from `p` to the cone over the curve, via Newton ascent on the
/// support height `h(sigma, tau) = p . phi(sigma, tau)` seeded at the
/// matching parameters. The returned value is the norm of the residual
/// vector `p - h phi`, which stays accurate when the residual is many
/// orders of magnitude below `|p|`.
fn cone_distance(p: &[f64; 7], curve: &TorusCurve, seed_s: f64, seed_t: f64) -> f64 {
    let (mut sigma, mut tau) = (seed_s, seed_t);
    let scale = p.iter().map(|v| v * v).sum::<f64>().sqrt().max(1.0);
    let mut height = support(p, curve, sigma, tau).0;
    for _ in 0..60 {
        let (_, gradient) = support(p, curve, sigma, tau);
        if gradient[0].hypot(gradient[1]) < 1e-13 * scale {
            break;
        }
        let step = newton_step(p, curve, sigma, tau, gradient);
        let mut damping = 1.0;
        let mut advanced = false;
        for _ in 0..25 {
            let trial = (sigma + damping * step[0], tau + damping * step[1]);
            let trial_height = support(p, curve, trial.0, trial.1).0;
            if trial_height >= height {
                sigma = trial.0;
                tau = trial.1;
                height = trial_height;
                advanced = true;
                break;
            }
            damping *= 0.5;
        }
        if !advanced || step[0].hypot(step[1]) < 1e-15 * (1.0 + sigma.abs() + tau.abs()) {
            break;
        }
    }
    let (phi, _, _) = cone_frame(curve, sigma, tau);
    let h: f64 = p.iter().zip(&phi).map(|(a, b)| a * b).sum();
    p.iter()
        .zip(&phi)
        .map(|(a, b)| (a - h * b) * (a - h * b))
        .sum::<f64>()
        .sqrt()
}

fn support(p: &[f64; 7], curve: &TorusCurve, sigma: f64, tau: f64) -> (f64, [f64; 2]) {
    let (phi, phi_s, phi_t) = cone_frame(curve, sigma, tau);
    let dot = |a: &[f64; 7], b: &[f64; 7]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    (dot(p, &phi), [dot(p, &phi_s), dot(p, &phi_t)])
}

fn newton_step(
    p: &[f64; 7],
    curve: &TorusCurve,
    sigma: f64,
    tau: f64,
    gradient: [f64; 2],
) -> [f64; 2] {
    let h = 1e-6;
    let gs_plus = support(p, curve, sigma + h, tau).1;
    let gs_minus = support(p, curve, sigma - h, tau).1;
    let gt_plus = support(p, curve, sigma, tau + h).1;
    let gt_minus = support(p, curve, sigma, tau - h).1;
    let hess = [
        [
            (gs_plus[0] - gs_minus[0]) / (2.0 * h),
            (gt_plus[0] - gt_minus[0]) / (2.0 * h),
        ],
        [
            (gs_plus[1] - gs_minus[1]) / (2.0 * h),
            (gt_plus[1] - gt_minus[1]) / (2.0 * h),
        ],
    ];
    let det = hess[0][0] * hess[1][1] - hess[0][1] * hess[1][0];
    let norm = p.iter().map(|v| v * v).sum::<f64>().sqrt().max(1.0);
    if det.abs() < 1e-10 * norm * norm {
        // Degenerate curvature: fall back to a short ascent step.
        let g = gradient[0].hypot(gradient[1]).max(1e-300);
        return [1e-3 * gradient[0] / g, 1e-3 * gradient[1] / g];
    }
    [
        -(hess[1][1] * gradient[0] - hess[0][1] * gradient[1]) / det,
        -(-hess[1][0] * gradient[0] + hess[0][0] * gradient[1]) / det,
    ]
}

/// The unit cone direction over `(sigma, tau)` and its two parameter
/// derivatives; the circle derivative rotates each complex pair by its
/// winding weight and the curve derivative passes through the linear cone
/// map.
fn cone_frame(curve: &TorusCurve, sigma: f64, tau: f64) -> ([f64; 7], [f64; 7], [f64; 7]) {
    let phi = cone_point(&curve.state(tau), sigma, 1.0);
    let phi_t = cone_point(&curve.velocity(tau), sigma, 1.0);
    let phi_s = [
        0.0,
        -2.0 * phi[2],
        2.0 * phi[1],
        phi[4],
        -phi[3],
        phi[6],
        -phi[5],
    ];
    (phi, phi_s, phi_t)
}

fn log_log_fit(radii: &[f64], deviations: &[f64]) -> (f64, f64, f64) {
    let xs: Vec<f64> = radii.iter().map(|r| r.ln()).collect();
    let ys: Vec<f64> = deviations.iter().map(|d| d.max(1e-300).ln()).collect();
    let n = xs.len() as f64;
    let mean_x = xs.iter().sum::<f64>() / n;
    let mean_y = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (x, y) in xs.iter().zip(&ys) {
        sxx += (x - mean_x) * (x - mean_x);
        sxy += (x - mean_x) * (y - mean_y);
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let residual = (xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| {
            let e = y - (slope * x + intercept);
            e * e
        })
        .sum::<f64>()
        / n)
        .sqrt();
    (slope, intercept.exp(), residual)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::torus_cone_curve;
    use std::sync::Arc;

    fn decades(lo: f64, hi: f64, count: usize) -> Vec<f64> {
        (0..count)
            .map(|i| lo * (hi / lo).powf(i as f64 / (count - 1) as f64))
            .collect()
    }

    fn window() -> Vec<(f64, f64)> {
        vec![(0.3, 0.8), (2.1, -0.4), (4.0, 1.7)]
    }

    #[test]
    fn the_unmodulated_cone_is_reported_exact() {
        let ruled = RuledParams {
            curve: torus_cone_curve([0.4, -1.1]),
            pair: HarmonicPair::Zero,
            window: window(),
        };
        let fit = asymptotic_rate(&ruled, &decades(10.0, 1000.0, 7)).unwrap();
        assert_eq!(fit.outcome, RateOutcome::ExactCone);
        for (d, r) in fit.deviations.iter().zip(&fit.radii) {
            assert!(*d <= 1e-9 * (1.0 + r));
        }
    }

    #[test]
    fn constant_pairs_decay_at_rate_minus_one() {
        let ruled = RuledParams {
            curve: torus_cone_curve([0.0, 0.7]),
            pair: HarmonicPair::constant(0.4, -0.25),
            window: window(),
        };
        let fit = asymptotic_rate(&ruled, &decades(10.0, 1000.0, 9)).unwrap();
        match fit.outcome {
            RateOutcome::Fit {
                exponent, residual, ..
            } => {
                assert!(
                    (exponent + 1.0).abs() < 0.1,
                    "exponent {exponent}, residual {residual}"
                );
                assert!(residual < 0.05);
            }
            other => panic!("expected a fit, got {other:?}"),
        }
    }

    #[test]
    fn holomorphic_pairs_decay_at_rate_minus_one() {
        use num::complex::Complex64;
        let ruled = RuledParams {
            curve: torus_cone_curve([1.2, 0.3]),
            pair: HarmonicPair::holomorphic(vec![
                Complex64::new(0.1, 0.05),
                Complex64::new(0.02, -0.03),
            ]),
            window: window(),
        };
        let fit = asymptotic_rate(&ruled, &decades(10.0, 1000.0, 9)).unwrap();
        match fit.outcome {
            RateOutcome::Fit { exponent, .. } => {
                assert!((exponent + 1.0).abs() < 0.1, "exponent {exponent}");
            }
            other => panic!("expected a fit, got {other:?}"),
        }
    }

    #[test]
    fn deviations_shrink_monotonically_along_the_schedule() {
        let ruled = RuledParams {
            curve: torus_cone_curve([0.0, 0.0]),
            pair: HarmonicPair::constant(0.3, 0.2),
            window: vec![(1.0, 0.5)],
        };
        let fit = asymptotic_rate(&ruled, &decades(10.0, 1000.0, 8)).unwrap();
        for pair in fit.deviations.windows(2) {
            assert!(pair[1] < pair[0]);
        }
    }

    #[test]
    fn poles_in_the_pair_are_reported_unbounded() {
        let ruled = RuledParams {
            curve: torus_cone_curve([0.0, 0.0]),
            pair: HarmonicPair::Custom(Arc::new(|_, t| (1.0 / t, 0.0))),
            window: vec![(0.3, 0.0)],
        };
        let fit = asymptotic_rate(&ruled, &decades(10.0, 1000.0, 5)).unwrap();
        assert_eq!(fit.outcome, RateOutcome::Unbounded);
    }

    #[test]
    fn defective_schedules_are_rejected() {
        let ruled = RuledParams {
            curve: torus_cone_curve([0.0, 0.0]),
            pair: HarmonicPair::Zero,
            window: window(),
        };
        for radii in [
            vec![1000.0, 10.0],
            vec![10.0, 500.0],
            vec![42.0],
            vec![-1.0, 10.0, 1000.0],
            vec![10.0, 10.0, 1000.0],
        ] {
            assert!(matches!(
                asymptotic_rate(&ruled, &radii),
                Err(VerifyError::BadRadii)
            ));
        }
        let empty = RuledParams {
            window: Vec::new(),
            ..ruled
        };
        assert!(matches!(
            asymptotic_rate(&empty, &decades(10.0, 1000.0, 5)),
            Err(VerifyError::EmptyWindow)
        ));
    }
}
