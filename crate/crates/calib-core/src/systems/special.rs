//! Closed-form solutions and extremal values for the associative cone
//! system.

use num::complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Largest value of `Re(z1 z2 z3)` on the unit sphere of `R^7`.
///
/// The product of the three moduli is maximized when the real coordinate
/// vanishes and the moduli are equal, giving `(1/sqrt(3))^3`, and the
/// phase factor reaches one when the arguments sum to zero.
pub fn link_invariant_extremum() -> f64 {
    27f64.sqrt().recip()
}

/// Options for the numeric maximization of the link invariant.
#[derive(Debug, Clone, Copy)]
pub struct ExtremumOptions {
    /// Independent random starting points on the sphere.
    pub starts: usize,
    /// Projected gradient steps per start.
    pub steps: usize,
    pub seed: u64,
}

impl Default for ExtremumOptions {
    fn default() -> Self {
        ExtremumOptions {
            starts: 24,
            steps: 500,
            seed: 0x1e57_ab1e,
        }
    }
}

/// Outcome of the numeric maximization.
#[derive(Debug, Clone)]
pub struct ExtremumEstimate {
    pub value: f64,
    pub point: [f64; 7],
}

impl ExtremumEstimate {
    /// Modulus of each complex coordinate of the maximizer.
    pub fn moduli(&self) -> [f64; 3] {
        [
            self.point[1].hypot(self.point[2]),
            self.point[3].hypot(self.point[4]),
            self.point[5].hypot(self.point[6]),
        ]
    }

    /// The complex cubic `z1 z2 z3` at the maximizer.
    pub fn cubic(&self) -> Complex64 {
        let z = |j: usize| Complex64::new(self.point[1 + 2 * j], self.point[2 + 2 * j]);
        z(0) * z(1) * z(2)
    }
}

fn invariant(y: &[f64; 7]) -> f64 {
    let z1 = Complex64::new(y[1], y[2]);
    let z2 = Complex64::new(y[3], y[4]);
    let z3 = Complex64::new(y[5], y[6]);
    (z1 * z2 * z3).re
}

/// Euclidean gradient of `Re(z1 z2 z3)`; the pair of partial derivatives
/// with respect to a complex coordinate is the conjugate of the product
/// of the other two.
fn invariant_gradient(y: &[f64; 7]) -> [f64; 7] {
    let z1 = Complex64::new(y[1], y[2]);
    let z2 = Complex64::new(y[3], y[4]);
    let z3 = Complex64::new(y[5], y[6]);
    let g1 = (z2 * z3).conj();
    let g2 = (z3 * z1).conj();
    let g3 = (z1 * z2).conj();
    [0.0, g1.re, g1.im, g2.re, g2.im, g3.re, g3.im]
}

fn normalize(y: &mut [f64; 7]) {
    let n = y.iter().map(|v| v * v).sum::<f64>().sqrt();
    for v in y.iter_mut() {
        *v /= n;
    }
}

/// Maximizes the link invariant over the unit sphere by seeded projected
/// gradient ascent with backtracking. Deterministic for a fixed seed.
pub fn link_invariant_maximum_numeric(opts: &ExtremumOptions) -> ExtremumEstimate {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut gaussian = move || {
        let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
        let u2: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        (-2.0 * u1.ln()).sqrt() * u2.cos()
    };
    let mut best_value = f64::NEG_INFINITY;
    let mut best_point = [0.0; 7];
    for _ in 0..opts.starts {
        let mut y = [0.0; 7];
        for v in y.iter_mut() {
            *v = gaussian();
        }
        normalize(&mut y);
        let mut value = invariant(&y);
        let mut step = 0.5;
        for _ in 0..opts.steps {
            let g = invariant_gradient(&y);
            let radial: f64 = g.iter().zip(&y).map(|(a, b)| a * b).sum();
            let mut tangent = [0.0; 7];
            let mut tangent_sq = 0.0;
            for j in 0..7 {
                tangent[j] = g[j] - radial * y[j];
                tangent_sq += tangent[j] * tangent[j];
            }
            if tangent_sq < 1e-30 {
                break;
            }
            let mut advanced = false;
            while step > 1e-16 {
                let mut trial = y;
                for j in 0..7 {
                    trial[j] += step * tangent[j];
                }
                normalize(&mut trial);
                let trial_value = invariant(&trial);
                if trial_value > value {
                    y = trial;
                    value = trial_value;
                    step = (step * 1.5).min(0.5);
                    advanced = true;
                    break;
                }
                step *= 0.5;
            }
            if !advanced {
                break;
            }
        }
        if value > best_value {
            best_value = value;
            best_point = y;
        }
    }
    ExtremumEstimate {
        value: best_value,
        point: best_point,
    }
}

fn phase_rates(windings: [i64; 3]) -> [f64; 3] {
    let beta = [
        (windings[1] - windings[2]) as f64,
        (windings[2] - windings[0]) as f64,
        (windings[0] - windings[1]) as f64,
    ];
    beta.map(|b| b / 3f64.sqrt())
}

/// Exact solution of the associative cone system at the extremal value of
/// the link invariant: the real coordinate stays at zero and each complex
/// coordinate circles at modulus `1/sqrt(3)` with constant angular rate.
///
/// `phases` are the initial arguments of the first two coordinates; the
/// third is their negated sum, which keeps the solution exact.
pub fn special_torus_solution(windings: [i64; 3], phases: [f64; 2], t: f64) -> [f64; 7] {
    let gammas = [phases[0], phases[1], -phases[0] - phases[1]];
    let rates = phase_rates(windings);
    let r = 3f64.sqrt().recip();
    let mut y = [0.0; 7];
    for j in 0..3 {
        let z = Complex64::from_polar(r, rates[j] * t + gammas[j]);
        y[1 + 2 * j] = z.re;
        y[2 + 2 * j] = z.im;
    }
    y
}

/// Time derivative of [`special_torus_solution`].
pub fn special_torus_velocity(windings: [i64; 3], phases: [f64; 2], t: f64) -> [f64; 7] {
    let y = special_torus_solution(windings, phases, t);
    let rates = phase_rates(windings);
    let mut dy = [0.0; 7];
    for j in 0..3 {
        let z = Complex64::new(y[1 + 2 * j], y[2 + 2 * j]);
        let d = Complex64::i() * rates[j] * z;
        dy[1 + 2 * j] = d.re;
        dy[2 + 2 * j] = d.im;
    }
    dy
}

/// Minimal period of the extremal torus solution, or `None` when the
/// solution is stationary.
pub fn special_torus_period(windings: [i64; 3]) -> Option<f64> {
    let beta = [
        (windings[1] - windings[2]).unsigned_abs(),
        (windings[2] - windings[0]).unsigned_abs(),
        (windings[0] - windings[1]).unsigned_abs(),
    ];
    let g = beta.into_iter().filter(|&b| b != 0).fold(0u64, gcd);
    if g == 0 {
        return None;
    }
    Some(std::f64::consts::TAU * 3f64.sqrt() / g as f64)
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}
