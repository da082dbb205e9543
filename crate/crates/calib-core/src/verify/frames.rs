//! Parametrized families and tangent-frame extraction.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::sync::Arc;

use super::VerifyError;

/// Relative Gram-determinant threshold below which a frame is degenerate.
const DEGENERACY_THRESHOLD: f64 = 1e-10;

type PointFn = dyn Fn(&[f64]) -> Vec<f64> + Send + Sync;
type FrameFn = dyn Fn(&[f64]) -> Vec<Vec<f64>> + Send + Sync;

/// A smooth map from a parameter box into Euclidean space whose image is
/// the family under test. The evaluator must return finite coordinates on
/// the stated domain; an optional closed-form frame map supplies exact
/// tangent vectors where the construction provides them.
#[derive(Clone)]
pub struct Parametrization {
    name: String,
    domain: Vec<(f64, f64)>,
    ambient_dim: usize,
    eval: Arc<PointFn>,
    analytic: Option<Arc<FrameFn>>,
}

impl Parametrization {
    pub fn new(
        name: impl Into<String>,
        domain: Vec<(f64, f64)>,
        ambient_dim: usize,
        eval: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    ) -> Self {
        debug_assert!(!domain.is_empty());
        debug_assert!(domain.iter().all(|(lo, hi)| lo <= hi));
        Parametrization {
            name: name.into(),
            domain,
            ambient_dim,
            eval: Arc::new(eval),
            analytic: None,
        }
    }

    /// Attaches a closed-form tangent-frame map. The returned vectors must
    /// span the same plane as the partial derivatives of the evaluator.
    pub fn with_analytic_frames(
        mut self,
        frames: impl Fn(&[f64]) -> Vec<Vec<f64>> + Send + Sync + 'static,
    ) -> Self {
        self.analytic = Some(Arc::new(frames));
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn param_dim(&self) -> usize {
        self.domain.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn domain(&self) -> &[(f64, f64)] {
        &self.domain
    }

    pub fn evaluate(&self, params: &[f64]) -> Vec<f64> {
        (self.eval)(params)
    }

    pub fn has_analytic_frames(&self) -> bool {
        self.analytic.is_some()
    }
}

impl std::fmt::Debug for Parametrization {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Parametrization")
            .field("name", &self.name)
            .field("domain", &self.domain)
            .field("ambient_dim", &self.ambient_dim)
            .field("analytic", &self.analytic.is_some())
            .finish()
    }
}

/// How a frame was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum FrameSource {
    Analytic,
    FiniteDifference,
}

/// A sampled point of a family together with an ordered tangent frame.
#[derive(Debug, Clone)]
pub struct FrameSample {
    pub params: Vec<f64>,
    pub point: Vec<f64>,
    pub frame: Vec<Vec<f64>>,
    pub source: FrameSource,
}

/// The outcome of sampling a family: the accepted frames plus the
/// parameter values whose frames were degenerate and had to be skipped.
#[derive(Debug, Clone)]
pub struct FrameSet {
    pub family: String,
    pub samples: Vec<FrameSample>,
    pub skipped: Vec<Vec<f64>>,
}

/// Samples the family at `count` parameter values drawn uniformly from its
/// domain and extracts a tangent frame at each, preferring the closed-form
/// frames when the parametrization carries them and falling back to
/// central differences with step `fd_step`. Degenerate or nonfinite frames
/// are skipped and their parameter values recorded.
pub fn tangent_frames(
    p: &Parametrization,
    count: usize,
    seed: u64,
    fd_step: f64,
) -> Result<FrameSet, VerifyError> {
    sample_frames(p, count, seed, fd_step, false)
}

/// Like [`tangent_frames`] but always uses central differences, even when
/// closed-form frames are available. With the same seed the parameter
/// values match, which is what makes the two sources comparable.
pub fn finite_difference_frames(
    p: &Parametrization,
    count: usize,
    seed: u64,
    fd_step: f64,
) -> Result<FrameSet, VerifyError> {
    sample_frames(p, count, seed, fd_step, true)
}

fn sample_frames(
    p: &Parametrization,
    count: usize,
    seed: u64,
    fd_step: f64,
    force_fd: bool,
) -> Result<FrameSet, VerifyError> {
    if count == 0 {
        return Err(VerifyError::NoSamples);
    }
    if !(fd_step.is_finite() && fd_step > 0.0) {
        return Err(VerifyError::BadStep(fd_step));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let grid: Vec<Vec<f64>> = (0..count)
        .map(|_| {
            p.domain()
                .iter()
                .map(|&(lo, hi)| if lo == hi { lo } else { rng.gen_range(lo..hi) })
                .collect()
        })
        .collect();

    let rows: Vec<Result<FrameSample, Vec<f64>>> = grid
        .into_par_iter()
        .map(|params| frame_at(p, params, fd_step, force_fd))
        .collect();

    let mut samples = Vec::new();
    let mut skipped = Vec::new();
    for row in rows {
        match row {
            Ok(sample) => samples.push(sample),
            Err(params) => skipped.push(params),
        }
    }
    Ok(FrameSet {
        family: p.name().to_string(),
        samples,
        skipped,
    })
}

fn frame_at(
    p: &Parametrization,
    params: Vec<f64>,
    fd_step: f64,
    force_fd: bool,
) -> Result<FrameSample, Vec<f64>> {
    let point = p.evaluate(&params);
    if point.len() != p.ambient_dim() || point.iter().any(|v| !v.is_finite()) {
        return Err(params);
    }
    let (frame, source) = match (&p.analytic, force_fd) {
        (Some(f), false) => (f(&params), FrameSource::Analytic),
        _ => (fd_frame(p, &params, fd_step), FrameSource::FiniteDifference),
    };
    if frame.len() != p.param_dim()
        || frame
            .iter()
            .any(|col| col.len() != p.ambient_dim() || col.iter().any(|v| !v.is_finite()))
        || is_degenerate(&frame)
    {
        return Err(params);
    }
    Ok(FrameSample {
        params,
        point,
        frame,
        source,
    })
}

fn fd_frame(p: &Parametrization, params: &[f64], fd_step: f64) -> Vec<Vec<f64>> {
    (0..params.len())
        .map(|i| {
            let mut forward = params.to_vec();
            let mut backward = params.to_vec();
            forward[i] += fd_step;
            backward[i] -= fd_step;
            let plus = p.evaluate(&forward);
            let minus = p.evaluate(&backward);
            plus.iter()
                .zip(&minus)
                .map(|(a, b)| (a - b) / (2.0 * fd_step))
                .collect()
        })
        .collect()
}

/// Scale-free degeneracy test: the Gram determinant of the column-normalized
/// frame must stay above a fixed threshold.
fn is_degenerate(frame: &[Vec<f64>]) -> bool {
    let mut normalized = Vec::with_capacity(frame.len());
    for col in frame {
        let norm = col.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm < 1e-14 {
            return true;
        }
        normalized.push(col.iter().map(|v| v / norm).collect::<Vec<f64>>());
    }
    crate::forms::gram_det(&normalized) < DEGENERACY_THRESHOLD
}

#[cfg(test)]
mod tests {
    use super::*;

    fn coordinate_plane() -> Parametrization {
        Parametrization::new("coordinate-plane", vec![(-1.0, 1.0); 3], 7, |q| {
            vec![q[0], q[1], q[2], 0.0, 0.0, 0.0, 0.0]
        })
        .with_analytic_frames(|_| {
            (0..3)
                .map(|i| {
                    let mut e = vec![0.0; 7];
                    e[i] = 1.0;
                    e
                })
                .collect()
        })
    }

    #[test]
    fn coordinate_plane_frames_are_the_axes() {
        let p = coordinate_plane();
        let set = tangent_frames(&p, 5, 11, 1e-5).unwrap();
        assert_eq!(set.samples.len(), 5);
        assert!(set.skipped.is_empty());
        for sample in &set.samples {
            assert_eq!(sample.source, FrameSource::Analytic);
            for (i, col) in sample.frame.iter().enumerate() {
                for (j, v) in col.iter().enumerate() {
                    let expected = if i == j { 1.0 } else { 0.0 };
                    assert!((v - expected).abs() < 1e-14);
                }
            }
        }
        let fd = finite_difference_frames(&p, 5, 11, 1e-5).unwrap();
        for (a, b) in set.samples.iter().zip(&fd.samples) {
            assert_eq!(b.source, FrameSource::FiniteDifference);
            assert_eq!(a.params, b.params);
            for (ca, cb) in a.frame.iter().zip(&b.frame) {
                for (va, vb) in ca.iter().zip(cb) {
                    assert!((va - vb).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn same_seed_reproduces_the_parameter_draw() {
        let p = coordinate_plane();
        let a = tangent_frames(&p, 8, 3, 1e-5).unwrap();
        let b = tangent_frames(&p, 8, 3, 1e-5).unwrap();
        for (x, y) in a.samples.iter().zip(&b.samples) {
            assert_eq!(x.params, y.params);
        }
        let c = tangent_frames(&p, 8, 4, 1e-5).unwrap();
        assert_ne!(a.samples[0].params, c.samples[0].params);
    }

    #[test]
    fn collapsed_families_are_skipped_with_their_parameters() {
        let p = Parametrization::new("collapsed", vec![(0.0, 1.0); 3], 7, |_| vec![0.0; 7]);
        let set = tangent_frames(&p, 4, 5, 1e-5).unwrap();
        assert!(set.samples.is_empty());
        assert_eq!(set.skipped.len(), 4);
        for params in &set.skipped {
            assert_eq!(params.len(), 3);
        }
    }

    #[test]
    fn nearly_parallel_frames_are_degenerate() {
        let p = Parametrization::new("thin", vec![(-1.0, 1.0); 2], 7, |q| {
            let mut y = vec![0.0; 7];
            y[0] = q[0] + q[1];
            y[1] = 1e-13 * q[1];
            y
        });
        let set = tangent_frames(&p, 3, 9, 1e-5).unwrap();
        assert!(set.samples.is_empty());
        assert_eq!(set.skipped.len(), 3);
    }

    #[test]
    fn zero_sample_counts_are_rejected() {
        let p = coordinate_plane();
        assert!(matches!(
            tangent_frames(&p, 0, 1, 1e-5),
            Err(VerifyError::NoSamples)
        ));
        assert!(matches!(
            tangent_frames(&p, 1, 1, 0.0),
            Err(VerifyError::BadStep(_))
        ));
    }

    #[test]
    fn nonfinite_evaluations_are_skipped() {
        let p = Parametrization::new("pole", vec![(-1.0, 1.0); 3], 7, |q| {
            let mut y = vec![0.0; 7];
            y[0] = 1.0 / q[0];
            y[1] = q[1];
            y[2] = q[2];
            y
        });
        // Central differences straddle the pole for draws near zero; every
        // accepted sample must still be finite.
        let set = tangent_frames(&p, 20, 2, 1e-5).unwrap();
        for sample in &set.samples {
            assert!(sample.point.iter().all(|v| v.is_finite()));
            assert!(sample
                .frame
                .iter()
                .all(|col| col.iter().all(|v| v.is_finite())));
        }
    }
}
