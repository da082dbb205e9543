//! Closed-form families and orbit invariants.
//!
//! Two limits of the mixed translation-rotation system integrate in
//! closed form, and the quaternionic system's orbits are cut out by
//! explicit level sets. These constructions feed the calibration checks
//! with exactly parametrized submanifolds that bypass integration.

use num::complex::Complex64;

/// Point of the product family arising when the coupling vanishes: the
/// flow is linear and diagonal, so each complex coordinate spirals
/// independently while the real line factors off.
///
/// `initial` holds the complex coordinates at `t = 0`, `x` moves along the
/// line, `s` along the group circle, and `t` along the flow.
pub fn translation_family_point(
    mu: f64,
    nu: f64,
    initial: [Complex64; 3],
    x: f64,
    s: f64,
    t: f64,
) -> [f64; 7] {
    let z1 = initial[0] * Complex64::from_polar(1.0, nu * s) * (-nu * t).exp();
    let z2 = initial[1] * Complex64::from_polar(1.0, -mu * s) * (mu * t).exp();
    let z3 = initial[2] * Complex64::from_polar(1.0, (mu - nu) * s) * ((nu - mu) * t).exp();
    [x, z1.re, z1.im, z2.re, z2.im, z3.re, z3.im]
}

/// Point of the level-set family arising when both rotation weights
/// vanish: a slice of constant first coordinate cut out by the imaginary
/// cubic and two modulus differences.
///
/// `a` is the value of `Im(z1 z2 z3)`, `b` of `|z1|^2 - |z3|^2`, `c` of
/// `|z2|^2 - |z3|^2`. The surface coordinates are the third modulus `rho`
/// and two phases. Returns `None` outside the domain where the moduli and
/// the phase offset exist.
pub fn torus_level_point(
    x: f64,
    a: f64,
    b: f64,
    c: f64,
    rho: f64,
    phi1: f64,
    phi2: f64,
) -> Option<[f64; 7]> {
    if rho <= 0.0 {
        return None;
    }
    let r1_sq = b + rho * rho;
    let r2_sq = c + rho * rho;
    if r1_sq <= 0.0 || r2_sq <= 0.0 {
        return None;
    }
    let (r1, r2) = (r1_sq.sqrt(), r2_sq.sqrt());
    let sine = a / (r1 * r2 * rho);
    if sine.abs() > 1.0 {
        return None;
    }
    let zeta = sine.asin();
    let z1 = Complex64::from_polar(r1, phi1);
    let z2 = Complex64::from_polar(r2, phi2);
    let z3 = Complex64::from_polar(rho, zeta - phi1 - phi2);
    Some([x, z1.re, z1.im, z2.re, z2.im, z3.re, z3.im])
}

/// Orbit invariants of the quaternionic system. The first four transform
/// by a common exponential multiplier along the flow; the imaginary cross
/// term carries the opposite multiplier, so the products in
/// [`CayleyOrbitInvariants::levels`] are exact constants.
#[derive(Debug, Clone, Copy)]
pub struct CayleyOrbitInvariants {
    /// `|z1|^2 - |z2|^2 + |z3|^2 - |z4|^2`
    pub balance: f64,
    /// `z1 conj(z2) + z3 conj(z4)`
    pub mix12: Complex64,
    /// `z1 z4 - z2 z3`
    pub cross: Complex64,
    /// `z1 conj(z3) + z2 conj(z4)`
    pub mix13: Complex64,
    /// `balance^2 + 4 |mix12|^2`
    pub quartic: f64,
}

impl CayleyOrbitInvariants {
    /// The four exactly conserved level constants.
    pub fn levels(&self) -> [f64; 4] {
        let w = self.cross.im;
        [
            self.quartic * w * w,
            self.cross.re * w,
            self.mix13.re * w,
            self.mix13.im * w,
        ]
    }
}

/// Evaluates the orbit invariants of an eight-dimensional state.
pub fn orbit_invariants(state: &[f64]) -> CayleyOrbitInvariants {
    debug_assert_eq!(state.len(), 8);
    let z = |j: usize| Complex64::new(state[2 * j], state[2 * j + 1]);
    let (z1, z2, z3, z4) = (z(0), z(1), z(2), z(3));
    let balance = z1.norm_sqr() - z2.norm_sqr() + z3.norm_sqr() - z4.norm_sqr();
    let mix12 = z1 * z2.conj() + z3 * z4.conj();
    let cross = z1 * z4 - z2 * z3;
    let mix13 = z1 * z3.conj() + z2 * z4.conj();
    let quartic = balance * balance + 4.0 * mix12.norm_sqr();
    CayleyOrbitInvariants {
        balance,
        mix12,
        cross,
        mix13,
        quartic,
    }
}

/// Applies the group element with Cayley-Klein pair `(a, b)` to a state.
/// The pair must satisfy `|a|^2 + |b|^2 = 1`; the element acts diagonally
/// on the coordinate pairs `(z1, z2)` and `(z3, z4)`.
pub fn su2_orbit_point(state: &[f64], a: Complex64, b: Complex64) -> [f64; 8] {
    debug_assert_eq!(state.len(), 8);
    let z = |j: usize| Complex64::new(state[2 * j], state[2 * j + 1]);
    let (z1, z2, z3, z4) = (z(0), z(1), z(2), z(3));
    let w1 = a * z1 + b * z2;
    let w2 = -b.conj() * z1 + a.conj() * z2;
    let w3 = a * z3 + b * z4;
    let w4 = -b.conj() * z3 + a.conj() * z4;
    [w1.re, w1.im, w2.re, w2.im, w3.re, w3.im, w4.re, w4.im]
}

/// Cayley-Klein pair of the exponential of `v1 X1 + v2 X2 + v3 X3` in the
/// standard anti-Hermitian basis, a chart of the group that is smooth
/// near the origin.
pub fn su2_from_exponential(v: [f64; 3]) -> (Complex64, Complex64) {
    let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    let sinc = if norm < 1e-8 {
        1.0 - norm * norm / 6.0
    } else {
        norm.sin() / norm
    };
    let a = Complex64::new(norm.cos(), v[0] * sinc);
    let b = Complex64::new(v[1] * sinc, v[2] * sinc);
    (a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::SystemSpec;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn translation_family_time_curves_solve_the_flow() {
        let (mu, nu) = (0.8, -0.6);
        let spec = SystemSpec::assoc_r_u1sq(0.0, mu, nu).unwrap();
        let rhs = spec.rhs();
        let initial = [
            Complex64::new(0.4, 0.1),
            Complex64::new(-0.2, 0.7),
            Complex64::new(0.5, -0.3),
        ];
        let h = 1e-6;
        for &(s, t) in &[(0.0, 0.0), (1.2, 0.5), (-0.7, 2.0)] {
            let y = translation_family_point(mu, nu, initial, 0.3, s, t);
            let plus = translation_family_point(mu, nu, initial, 0.3, s, t + h);
            let minus = translation_family_point(mu, nu, initial, 0.3, s, t - h);
            let mut dy = [0.0; 7];
            rhs(&y, &mut dy);
            for j in 0..7 {
                let fd = (plus[j] - minus[j]) / (2.0 * h);
                assert!((fd - dy[j]).abs() < 1e-8, "component {j} at ({s}, {t})");
            }
        }
    }

    #[test]
    fn torus_level_point_hits_its_levels() {
        let (x, a, b, c) = (0.4, 0.15, 0.3, -0.1);
        let y = torus_level_point(x, a, b, c, 0.8, 1.1, -2.3).unwrap();
        let z1 = Complex64::new(y[1], y[2]);
        let z2 = Complex64::new(y[3], y[4]);
        let z3 = Complex64::new(y[5], y[6]);
        assert!((y[0] - x).abs() < 1e-15);
        assert!(((z1 * z2 * z3).im - a).abs() < 1e-14);
        assert!((z1.norm_sqr() - z3.norm_sqr() - b).abs() < 1e-14);
        assert!((z2.norm_sqr() - z3.norm_sqr() - c).abs() < 1e-14);
    }

    #[test]
    fn torus_level_point_rejects_impossible_data() {
        assert!(torus_level_point(0.0, 0.0, -1.0, 0.0, 0.5, 0.0, 0.0).is_none());
        assert!(torus_level_point(0.0, 5.0, 0.0, 0.0, 0.1, 0.0, 0.0).is_none());
        assert!(torus_level_point(0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0).is_none());
    }

    #[test]
    fn group_action_preserves_invariants() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let state: Vec<f64> = (0..8).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let v = [
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
            ];
            let (a, b) = su2_from_exponential(v);
            assert!((a.norm_sqr() + b.norm_sqr() - 1.0).abs() < 1e-12);
            let moved = su2_orbit_point(&state, a, b);
            let before = orbit_invariants(&state);
            let after = orbit_invariants(&moved);
            // The quartic is the squared norm of the moment map, the cross
            // term is a determinant, and the mixed term is a Hermitian
            // pairing; all three are invariant. The balance alone is not.
            assert!((before.quartic - after.quartic).abs() < 1e-12);
            assert!((before.cross - after.cross).norm() < 1e-12);
            assert!((before.mix13 - after.mix13).norm() < 1e-12);
            for (p, q) in before.levels().iter().zip(after.levels()) {
                assert!((p - q).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn exponential_chart_is_a_group_chart() {
        let (a, b) = su2_from_exponential([0.0, 0.0, 0.0]);
        assert!((a - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!(b.norm() < 1e-15);
        let (a, b) = su2_from_exponential([std::f64::consts::FRAC_PI_2, 0.0, 0.0]);
        assert!((a - Complex64::new(0.0, 1.0)).norm() < 1e-12);
        assert!(b.norm() < 1e-12);
    }
}
