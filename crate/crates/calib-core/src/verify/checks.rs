//! Calibration-ratio and coassociative-vanishing checks.

use rayon::prelude::*;
use serde::Serialize;

use super::{FrameSet, VerifyError};
use crate::forms::{g2_form, g2_star_form, AlternatingForm};

/// A sample whose check value landed outside tolerance.
#[derive(Debug, Clone, Serialize)]
pub struct Failure {
    pub params: Vec<f64>,
    pub value: f64,
}

/// Outcome of a calibration check over a sampled family.
#[derive(Debug, Clone, Serialize)]
pub struct CalibrationReport {
    pub family: String,
    pub samples: usize,
    pub max_deviation: f64,
    pub orientation_flipped: bool,
    pub tol: f64,
    pub pass: bool,
    pub failures: Vec<Failure>,
}

/// Outcome of the two-sided coassociative check: the 3-form must vanish on
/// every sub-triple of the frame while the 4-form calibrates it.
#[derive(Debug, Clone, Serialize)]
pub struct CoassocReport {
    pub family: String,
    pub samples: usize,
    pub max_restriction: f64,
    pub max_star_deviation: f64,
    pub orientation_flipped: bool,
    pub tol: f64,
    pub restriction_pass: bool,
    pub star_pass: bool,
    pub pass: bool,
    pub failures: Vec<Failure>,
}

/// Evaluates the calibration ratio of every sample against `form` and
/// passes when the largest |ratio - 1| stays within `tol`. The orientation
/// is chosen once for the whole family: if the median ratio is negative
/// every ratio is negated and the flip is reported.
pub fn check_calibrated(
    form: &AlternatingForm,
    set: &FrameSet,
    tol: f64,
) -> Result<CalibrationReport, VerifyError> {
    if set.samples.is_empty() {
        return Err(VerifyError::NoSamples);
    }
    let degree = form.degree() as usize;
    let ambient = form.ambient_dim() as usize;
    for sample in &set.samples {
        if sample.frame.len() != degree {
            return Err(VerifyError::DegreeMismatch {
                form: degree,
                frame: sample.frame.len(),
            });
        }
        if sample.point.len() != ambient {
            return Err(VerifyError::AmbientMismatch {
                got: sample.point.len(),
                expected: ambient,
            });
        }
    }

    let mut ratios: Vec<f64> = set
        .samples
        .par_iter()
        .map(|sample| plane_ratio(form, &sample.frame))
        .collect();
    let flipped = median(&ratios) < 0.0;
    if flipped {
        for r in &mut ratios {
            *r = -*r;
        }
    }

    let mut max_deviation: f64 = 0.0;
    let mut failures = Vec::new();
    for (sample, ratio) in set.samples.iter().zip(&ratios) {
        let deviation = if ratio.is_finite() {
            (ratio - 1.0).abs()
        } else {
            f64::INFINITY
        };
        max_deviation = max_deviation.max(deviation);
        if deviation > tol {
            failures.push(Failure {
                params: sample.params.clone(),
                value: *ratio,
            });
        }
    }
    Ok(CalibrationReport {
        family: set.family.clone(),
        samples: set.samples.len(),
        max_deviation,
        orientation_flipped: flipped,
        tol,
        pass: failures.is_empty(),
        failures,
    })
}

/// Checks 4-frames in 7-space for coassociativity: the 3-form restriction
/// must vanish on all four sub-triples of each frame and the dual 4-form
/// must calibrate the frame, both within `tol`.
pub fn check_coassociative(set: &FrameSet, tol: f64) -> Result<CoassocReport, VerifyError> {
    if set.samples.is_empty() {
        return Err(VerifyError::NoSamples);
    }
    for sample in &set.samples {
        if sample.frame.len() != 4 {
            return Err(VerifyError::DegreeMismatch {
                form: 4,
                frame: sample.frame.len(),
            });
        }
        if sample.point.len() != 7 {
            return Err(VerifyError::AmbientMismatch {
                got: sample.point.len(),
                expected: 7,
            });
        }
    }
    let three_form = g2_form();
    let four_form = g2_star_form();

    let rows: Vec<(f64, f64)> = set
        .samples
        .par_iter()
        .map(|sample| {
            let restriction = match orthonormal_copy(&sample.frame) {
                Some(q) => {
                    let mut worst: f64 = 0.0;
                    for skip in 0..4 {
                        let triple: Vec<Vec<f64>> = (0..4)
                            .filter(|&i| i != skip)
                            .map(|i| q[i].clone())
                            .collect();
                        let value = three_form
                            .evaluate(&triple)
                            .map(|v| v.abs())
                            .unwrap_or(f64::INFINITY);
                        worst = worst.max(value);
                    }
                    worst
                }
                None => f64::INFINITY,
            };
            (restriction, plane_ratio(&four_form, &sample.frame))
        })
        .collect();

    let mut star_ratios: Vec<f64> = rows.iter().map(|&(_, r)| r).collect();
    let flipped = median(&star_ratios) < 0.0;
    if flipped {
        for r in &mut star_ratios {
            *r = -*r;
        }
    }

    let mut max_restriction: f64 = 0.0;
    let mut max_star_deviation: f64 = 0.0;
    let mut failures = Vec::new();
    for ((sample, &(restriction, _)), ratio) in
        set.samples.iter().zip(&rows).zip(&star_ratios)
    {
        let star_deviation = if ratio.is_finite() {
            (ratio - 1.0).abs()
        } else {
            f64::INFINITY
        };
        max_restriction = max_restriction.max(restriction);
        max_star_deviation = max_star_deviation.max(star_deviation);
        if restriction > tol || star_deviation > tol {
            failures.push(Failure {
                params: sample.params.clone(),
                value: restriction.max(star_deviation),
            });
        }
    }
    let restriction_pass = max_restriction <= tol;
    let star_pass = max_star_deviation <= tol;
    Ok(CoassocReport {
        family: set.family.clone(),
        samples: set.samples.len(),
        max_restriction,
        max_star_deviation,
        orientation_flipped: flipped,
        tol,
        restriction_pass,
        star_pass,
        pass: restriction_pass && star_pass,
        failures,
    })
}

/// Calibration ratio of the oriented plane spanned by the frame, computed
/// on an orthonormalized copy so the result is insensitive to the scale
/// and conditioning of the stored columns.
fn plane_ratio(form: &AlternatingForm, frame: &[Vec<f64>]) -> f64 {
    match orthonormal_copy(frame) {
        Some(q) => form.calibration_ratio(&q).unwrap_or(f64::NAN),
        None => f64::NAN,
    }
}

/// Modified Gram-Schmidt preserving orientation; `None` when a column is
/// numerically dependent on its predecessors.
fn orthonormal_copy(frame: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let mut q: Vec<Vec<f64>> = frame.to_vec();
    for i in 0..q.len() {
        let original = q[i].iter().map(|v| v * v).sum::<f64>().sqrt();
        for j in 0..i {
            let d: f64 = q[i].iter().zip(&q[j]).map(|(a, b)| a * b).sum();
            let (left, right) = q.split_at_mut(i);
            for (a, b) in right[0].iter_mut().zip(&left[j]) {
                *a -= d * b;
            }
        }
        let norm = q[i].iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(norm > 1e-10 * original.max(f64::MIN_POSITIVE)) {
            return None;
        }
        for v in &mut q[i] {
            *v /= norm;
        }
    }
    Some(q)
}

fn median(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    sorted[sorted.len() / 2]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::{FrameSample, FrameSource};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn axis(i: usize, n: usize) -> Vec<f64> {
        let mut e = vec![0.0; n];
        e[i] = 1.0;
        e
    }

    fn set_of(frames: Vec<Vec<Vec<f64>>>, n: usize) -> FrameSet {
        let samples = frames
            .into_iter()
            .enumerate()
            .map(|(i, frame)| FrameSample {
                params: vec![i as f64],
                point: vec![0.0; n],
                frame,
                source: FrameSource::Analytic,
            })
            .collect();
        FrameSet {
            family: "synthetic".into(),
            samples,
            skipped: Vec::new(),
        }
    }

    #[test]
    fn the_first_coordinate_plane_is_calibrated() {
        let set = set_of(vec![vec![axis(0, 7), axis(1, 7), axis(2, 7)]], 7);
        let report = check_calibrated(&g2_form(), &set, 1e-12).unwrap();
        assert!(report.pass);
        assert!(!report.orientation_flipped);
        assert!(report.max_deviation < 1e-14);
    }

    #[test]
    fn reversed_frames_pass_with_a_reported_flip() {
        let mut reversed = vec![axis(0, 7), axis(1, 7), axis(2, 7)];
        reversed[0][0] = -1.0;
        let set = set_of(vec![reversed; 3], 7);
        let report = check_calibrated(&g2_form(), &set, 1e-12).unwrap();
        assert!(report.pass);
        assert!(report.orientation_flipped);
    }

    #[test]
    fn random_planes_are_uncalibrated() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        let frames: Vec<Vec<Vec<f64>>> = (0..40)
            .map(|_| {
                (0..3)
                    .map(|_| (0..7).map(|_| rng.gen_range(-1.0..1.0)).collect())
                    .collect()
            })
            .collect();
        let set = set_of(frames, 7);
        let report = check_calibrated(&g2_form(), &set, 1e-3).unwrap();
        assert!(!report.pass);
        assert_eq!(report.failures.len(), 40);
        for failure in &report.failures {
            assert!(failure.value.abs() < 1.0 - 1e-3);
        }
    }

    #[test]
    fn skewed_frames_give_the_same_ratio_as_orthonormal_ones() {
        let e1 = axis(0, 7);
        let mut skew = axis(1, 7);
        skew[0] = 5.0;
        let mut long = axis(2, 7);
        long[0] = -2.0;
        long[1] = 3.0;
        let set = set_of(vec![vec![e1, skew, long]], 7);
        let report = check_calibrated(&g2_form(), &set, 1e-12).unwrap();
        assert!(report.pass, "max deviation {}", report.max_deviation);
    }

    #[test]
    fn the_dual_coordinate_plane_is_coassociative() {
        let frame = vec![axis(3, 7), axis(4, 7), axis(5, 7), axis(6, 7)];
        let set = set_of(vec![frame], 7);
        let report = check_coassociative(&set, 1e-12).unwrap();
        assert!(report.pass);
        assert!(report.restriction_pass && report.star_pass);
        assert!(report.max_restriction < 1e-14);
        assert!(report.max_star_deviation < 1e-14);
    }

    #[test]
    fn planes_meeting_an_associative_direction_fail_the_restriction() {
        let frame = vec![axis(0, 7), axis(1, 7), axis(2, 7), axis(3, 7)];
        let set = set_of(vec![frame], 7);
        let report = check_coassociative(&set, 1e-6).unwrap();
        assert!(!report.pass);
        assert!(!report.restriction_pass);
        assert!(report.max_restriction > 1.0 - 1e-12);
        assert_eq!(report.failures.len(), 1);
    }

    #[test]
    fn mismatched_degrees_are_rejected() {
        let set = set_of(vec![vec![axis(0, 7), axis(1, 7)]], 7);
        assert!(matches!(
            check_calibrated(&g2_form(), &set, 1e-5),
            Err(VerifyError::DegreeMismatch { .. })
        ));
        assert!(matches!(
            check_coassociative(&set, 1e-5),
            Err(VerifyError::DegreeMismatch { .. })
        ));
        let empty = FrameSet {
            family: "empty".into(),
            samples: Vec::new(),
            skipped: Vec::new(),
        };
        assert!(matches!(
            check_calibrated(&g2_form(), &empty, 1e-5),
            Err(VerifyError::NoSamples)
        ));
    }
}
