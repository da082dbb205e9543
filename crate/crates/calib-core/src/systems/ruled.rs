//! Ruled deformations of the doubled-winding associative cone.
//!
//! Each solution curve of the winding `(2, -1, -1)` system on the unit
//! sphere sweeps a cone. Replacing the ray through a curve point by an
//! affine line whose direction is modulated by a pair of conjugate
//! harmonic functions keeps the swept surface calibrated, and the result
//! converges back to the cone at the sharpest possible rate.

use num::complex::Complex64;
use std::sync::Arc;

/// A pair of conjugate harmonic functions `(u, v)` of the surface
/// coordinates, the modulation data of a ruled deformation.
#[derive(Clone)]
pub enum HarmonicPair {
    /// The unmodulated cone.
    Zero,
    /// Real and imaginary parts of a polynomial in `s + it`.
    Holomorphic { coeffs: Vec<Complex64> },
    /// Arbitrary pair; the caller is responsible for conjugacy.
    Custom(Arc<dyn Fn(f64, f64) -> (f64, f64) + Send + Sync>),
}

impl HarmonicPair {
    pub fn holomorphic(coeffs: Vec<Complex64>) -> Self {
        HarmonicPair::Holomorphic { coeffs }
    }

    /// Constant pair `(u, v)`.
    pub fn constant(u: f64, v: f64) -> Self {
        HarmonicPair::Holomorphic {
            coeffs: vec![Complex64::new(u, v)],
        }
    }

    pub fn eval(&self, s: f64, t: f64) -> (f64, f64) {
        match self {
            HarmonicPair::Zero => (0.0, 0.0),
            HarmonicPair::Holomorphic { coeffs } => {
                let w = Complex64::new(s, t);
                let mut f = Complex64::new(0.0, 0.0);
                for c in coeffs.iter().rev() {
                    f = f * w + c;
                }
                (f.re, f.im)
            }
            HarmonicPair::Custom(f) => f(s, t),
        }
    }
}

impl std::fmt::Debug for HarmonicPair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            HarmonicPair::Zero => f.write_str("HarmonicPair::Zero"),
            HarmonicPair::Holomorphic { coeffs } => f
                .debug_struct("HarmonicPair::Holomorphic")
                .field("coeffs", coeffs)
                .finish(),
            HarmonicPair::Custom(_) => f.write_str("HarmonicPair::Custom"),
        }
    }
}

/// The extremal solution curve of the winding `(2, -1, -1)` system: the
/// real coordinate stays at zero and the moduli stay equal, so the curve
/// winds around a flat torus in the unit sphere.
#[derive(Debug, Clone, Copy)]
pub struct TorusCurve {
    gammas: [f64; 3],
}

/// Builds the extremal torus curve with the given initial arguments of
/// the first two complex coordinates. The third argument is their negated
/// sum, which is what keeps the curve a solution.
pub fn torus_cone_curve(phases: [f64; 2]) -> TorusCurve {
    TorusCurve {
        gammas: [phases[0], phases[1], -phases[0] - phases[1]],
    }
}

impl TorusCurve {
    /// Angular rates of the three coordinates.
    fn rates() -> [f64; 3] {
        let root = 3f64.sqrt();
        [0.0, -root, root]
    }

    /// Curve point at time `t`, a unit vector.
    pub fn state(&self, t: f64) -> [f64; 7] {
        let r = 3f64.sqrt().recip();
        let rates = TorusCurve::rates();
        let mut y = [0.0; 7];
        for j in 0..3 {
            let z = Complex64::from_polar(r, rates[j] * t + self.gammas[j]);
            y[1 + 2 * j] = z.re;
            y[2 + 2 * j] = z.im;
        }
        y
    }

    /// Curve velocity at time `t`.
    pub fn velocity(&self, t: f64) -> [f64; 7] {
        let y = self.state(t);
        let rates = TorusCurve::rates();
        let mut dy = [0.0; 7];
        for j in 0..3 {
            let d = Complex64::i() * rates[j] * Complex64::new(y[1 + 2 * j], y[2 + 2 * j]);
            dy[1 + 2 * j] = d.re;
            dy[2 + 2 * j] = d.im;
        }
        dy
    }
}

/// Point of the cone over a sphere curve: the curve state is rotated by
/// the weighted circle action and scaled along the ray.
pub fn cone_point(state: &[f64], s: f64, r: f64) -> [f64; 7] {
    debug_assert_eq!(state.len(), 7);
    let z = |j: usize| Complex64::new(state[1 + 2 * j], state[2 + 2 * j]);
    let w1 = Complex64::from_polar(1.0, 2.0 * s) * z(0) * r;
    let w2 = Complex64::from_polar(1.0, -s) * z(1) * r;
    let w3 = Complex64::from_polar(1.0, -s) * z(2) * r;
    [
        r * state[0],
        w1.re,
        w1.im,
        w2.re,
        w2.im,
        w3.re,
        w3.im,
    ]
}

/// Point of the ruled deformation of the cone over a sphere solution
/// curve of the winding `(2, -1, -1)` system.
///
/// `state` is the curve point at time `t`, `s` the circle coordinate,
/// `r` the ray coordinate, and `(u, v)` the harmonic pair evaluated at
/// `(s, t)`. With `u = v = 0` this is exactly [`cone_point`].
pub fn ruled_point(state: &[f64], s: f64, r: f64, u: f64, v: f64) -> [f64; 7] {
    debug_assert_eq!(state.len(), 7);
    let x1 = state[0];
    let z = |j: usize| Complex64::new(state[1 + 2 * j], state[2 + 2 * j]);
    let (z1, z2, z3) = (z(0), z(1), z(2));
    let i = Complex64::i();
    let first = r * x1 + v * (2.0 * z1.norm_sqr() - z2.norm_sqr() - z3.norm_sqr());
    let lead = Complex64::new(r, 0.0) + 2.0 * i * u - 2.0 * v * x1;
    let tail = Complex64::new(r, 0.0) - i * u + Complex64::new(v * x1, 0.0);
    let w1 = Complex64::from_polar(1.0, 2.0 * s) * lead * z1;
    let w2 = Complex64::from_polar(1.0, -s) * (tail * z2 - 3.0 * i * v * (z3 * z1).conj());
    let w3 = Complex64::from_polar(1.0, -s) * (tail * z3 + 3.0 * i * v * (z1 * z2).conj());
    [first, w1.re, w1.im, w2.re, w2.im, w3.re, w3.im]
}
