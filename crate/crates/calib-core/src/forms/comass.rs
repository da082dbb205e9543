//! Comass estimation by random frame sampling and local ascent.
//!
//! The comass of a constant k-form is the supremum of its value over
//! orthonormal k-frames. The estimator draws seeded Gaussian frames,
//! orthonormalizes them, evaluates the calibration ratio honestly against
//! the actual Gram determinant, and then refines the best candidates with a
//! projected gradient ascent that re-orthonormalizes after every step.
//! Every number it returns is the ratio attained by a concrete frame, so
//! the estimate can only approach the comass from below up to roundoff.

use super::{gram_det, AlternatingForm, GRAM_DET_THRESHOLD};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Tuning knobs for [`comass_estimate`].
#[derive(Debug, Clone)]
pub struct ComassOptions {
    /// Number of random orthonormal frames to sample.
    pub samples: usize,
    /// Number of ascent starts taken from the best-scoring samples.
    pub ascent_starts: usize,
    /// Maximum gradient ascent iterations per start.
    pub refine_steps: usize,
    /// Seed for the deterministic sample stream.
    pub seed: u64,
}

impl Default for ComassOptions {
    fn default() -> Self {
        ComassOptions {
            samples: 10_000,
            ascent_starts: 4,
            refine_steps: 200,
            seed: 0x5eed_f0a3,
        }
    }
}

/// Estimates the comass of a form.
///
/// Returns the largest absolute calibration ratio attained over all sampled
/// and refined frames. Returns zero for the zero form.
pub fn comass_estimate(form: &AlternatingForm, opts: &ComassOptions) -> f64 {
    if form.is_zero() {
        return 0.0;
    }
    let n = form.ambient_dim() as usize;
    let k = form.degree() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);

    let starts = opts.ascent_starts.max(1);
    let mut leaders: Vec<(f64, Vec<Vec<f64>>)> = Vec::with_capacity(starts + 1);
    for _ in 0..opts.samples {
        let Some(frame) = random_orthonormal_frame(&mut rng, n, k) else {
            continue;
        };
        let r = abs_ratio(form, &frame);
        if leaders.len() < starts || r > leaders.last().map_or(0.0, |l| l.0) {
            leaders.push((r, frame));
            leaders.sort_by(|a, b| b.0.total_cmp(&a.0));
            leaders.truncate(starts);
        }
    }

    let mut best = leaders.first().map_or(0.0, |l| l.0);
    for (_, frame) in leaders {
        best = best.max(ascend(form, frame, opts.refine_steps));
    }
    best
}

/// Absolute calibration ratio of a frame, honest against its Gram
/// determinant rather than assuming orthonormality.
fn abs_ratio(form: &AlternatingForm, frame: &[Vec<f64>]) -> f64 {
    let g = gram_det(frame);
    if !(g > GRAM_DET_THRESHOLD) {
        return 0.0;
    }
    let value: f64 = form.evaluate(frame).expect("frame shape fixed by caller");
    value.abs() / g.sqrt()
}

fn ascend(form: &AlternatingForm, start: Vec<Vec<f64>>, max_steps: usize) -> f64 {
    let n = form.ambient_dim() as usize;
    let k = form.degree() as usize;
    let mut frame = start;
    if form
        .evaluate(&frame)
        .expect("frame shape fixed by caller")
        < 0.0
    {
        for x in frame[0].iter_mut() {
            *x = -*x;
        }
    }
    let mut val = abs_ratio(form, &frame);
    let mut step = 0.25;
    for _ in 0..max_steps {
        let grad = gradient(form, &frame, n, k);
        let gnorm_sq: f64 = grad.iter().flatten().map(|g| g * g).sum();
        if gnorm_sq < 1e-28 {
            break;
        }
        let mut improved = false;
        let mut s = step;
        for _ in 0..60 {
            let moved: Vec<Vec<f64>> = frame
                .iter()
                .zip(&grad)
                .map(|(v, g)| v.iter().zip(g).map(|(a, b)| a + s * b).collect())
                .collect();
            if let Some(candidate) = orthonormalize(&moved) {
                let cval = abs_ratio(form, &candidate);
                if cval > val {
                    frame = candidate;
                    val = cval;
                    step = (s * 1.8).min(1.0);
                    improved = true;
                    break;
                }
            }
            s *= 0.5;
            if s < 1e-18 {
                break;
            }
        }
        if !improved {
            break;
        }
    }
    val
}

/// Euclidean gradient of the frame evaluation map. By multilinearity the
/// partial derivative in entry `(j, i)` is the form evaluated with the j-th
/// frame vector replaced by the i-th coordinate vector.
fn gradient(form: &AlternatingForm, frame: &[Vec<f64>], n: usize, k: usize) -> Vec<Vec<f64>> {
    let mut grad = vec![vec![0.0; n]; k];
    let mut probe = frame.to_vec();
    for j in 0..k {
        let saved = std::mem::replace(&mut probe[j], vec![0.0; n]);
        for i in 0..n {
            probe[j][i] = 1.0;
            grad[j][i] = form.evaluate(&probe).expect("frame shape fixed by caller");
            probe[j][i] = 0.0;
        }
        probe[j] = saved;
    }
    grad
}

fn orthonormalize(frame: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let mut q = frame.to_vec();
    for j in 0..q.len() {
        // Two projection passes keep the basis orthogonal to roundoff even
        // when the input is poorly conditioned.
        for _ in 0..2 {
            for i in 0..j {
                let proj: f64 = q[j].iter().zip(&q[i]).map(|(a, b)| a * b).sum();
                let qi = q[i].clone();
                for (a, b) in q[j].iter_mut().zip(&qi) {
                    *a -= proj * b;
                }
            }
        }
        let norm: f64 = q[j].iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm < 1e-10 {
            return None;
        }
        for a in q[j].iter_mut() {
            *a /= norm;
        }
    }
    Some(q)
}

fn random_orthonormal_frame(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Option<Vec<Vec<f64>>> {
    let frame: Vec<Vec<f64>> = (0..k)
        .map(|_| (0..n).map(|_| gaussian(rng)).collect())
        .collect();
    orthonormalize(&frame)
}

/// Standard normal sample by the Box-Muller transform.
fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}
