//! Parametrizations of the constructed families, ready for frame sampling.
//!
//! Each builder wraps an integrated solution curve (or a closed-form
//! curve) together with the symmetry-group action that sweeps it into a
//! submanifold: a ray and a weighted circle for the cones, a two-torus for
//! the four-dimensional cones, a translation-rotation plane for the
//! product family, and the quaternionic group for the eight-dimensional
//! orbit family. Where the group action and the flow give closed-form
//! tangent vectors, the parametrization carries them as analytic frames.

use num::complex::Complex64;
use std::sync::Arc;

use super::{Parametrization, VerifyError};
use crate::integrate::Trajectory;
use crate::systems::{cone_point, ruled_point, HarmonicPair, SystemSpec, TorusCurve};

const TAU: f64 = std::f64::consts::TAU;

/// Radial window shared by the cone families.
const RAY_RANGE: (f64, f64) = (0.5, 2.0);

fn trimmed_span(trajectory: &Trajectory) -> (f64, f64) {
    let (a, b) = (trajectory.t_start(), trajectory.t_end());
    let margin = 0.01 * (b - a);
    (a + margin, b - margin)
}

fn expect_dim(trajectory: &Trajectory, expected: usize) -> Result<(), VerifyError> {
    if trajectory.dim() == expected {
        Ok(())
    } else {
        Err(VerifyError::AmbientMismatch {
            got: trajectory.dim(),
            expected,
        })
    }
}

fn complex_at(y: &[f64], slot: usize) -> Complex64 {
    Complex64::new(y[slot], y[slot + 1])
}

fn write_complex(out: &mut [f64], slot: usize, z: Complex64) {
    out[slot] = z.re;
    out[slot + 1] = z.im;
}

/// Cone over the weighted-circle orbit of an integrated sphere curve of
/// the winding system. Parameters are `(r, s, t)`: ray, circle, and flow.
pub fn assoc_cone_family(
    spec: &SystemSpec,
    trajectory: Arc<Trajectory>,
) -> Result<Parametrization, VerifyError> {
    let alpha = match spec {
        SystemSpec::AssocU1Cone { alpha } => alpha.map(|a| a as f64),
        other => {
            return Err(VerifyError::WrongSystem {
                expected: "assoc-u1-cone",
                got: other.name(),
            })
        }
    };
    expect_dim(&trajectory, 7)?;
    let (t_lo, t_hi) = trimmed_span(&trajectory);
    let domain = vec![RAY_RANGE, (0.0, TAU), (t_lo, t_hi)];

    let eval_traj = trajectory.clone();
    let eval = move |q: &[f64]| {
        let (r, s, t) = (q[0], q[1], q[2]);
        let y = eval_traj.sample_vec(t);
        let mut out = vec![r * y[0], 0.0, 0.0, 0.0, 0.0, 0.0, 0.0];
        for j in 0..3 {
            let z = complex_at(&y, 1 + 2 * j) * Complex64::from_polar(r, alpha[j] * s);
            write_complex(&mut out, 1 + 2 * j, z);
        }
        out
    };

    let frame_traj = trajectory;
    let frames = move |q: &[f64]| {
        let (r, s, t) = (q[0], q[1], q[2]);
        let mut y = vec![0.0; 7];
        let mut dy = vec![0.0; 7];
        frame_traj.sample_with_derivative(t, &mut y, &mut dy);
        let mut ray = vec![y[0], 0.0, 0.0, 0.0, 0.0, 0.0, 0.0];
        let mut circle = vec![0.0; 7];
        let mut flow = vec![r * dy[0], 0.0, 0.0, 0.0, 0.0, 0.0, 0.0];
        for j in 0..3 {
            let phase = Complex64::from_polar(1.0, alpha[j] * s);
            let z = complex_at(&y, 1 + 2 * j) * phase;
            write_complex(&mut ray, 1 + 2 * j, z);
            write_complex(&mut circle, 1 + 2 * j, Complex64::i() * alpha[j] * r * z);
            write_complex(&mut flow, 1 + 2 * j, complex_at(&dy, 1 + 2 * j) * phase * r);
        }
        vec![ray, circle, flow]
    };

    Ok(Parametrization::new("assoc-u1-cone", domain, 7, eval).with_analytic_frames(frames))
}

/// Cone over the two-torus orbit of an integrated sphere curve of the
/// coassociative system. Parameters are `(r, s1, s2, t)`.
pub fn coassoc_cone_family(trajectory: Arc<Trajectory>) -> Result<Parametrization, VerifyError> {
    expect_dim(&trajectory, 7)?;
    let (t_lo, t_hi) = trimmed_span(&trajectory);
    let domain = vec![RAY_RANGE, (0.0, TAU), (0.0, TAU), (t_lo, t_hi)];

    let rotate = |y: &[f64], s1: f64, s2: f64, scale: f64| -> [Complex64; 3] {
        [
            complex_at(y, 1) * Complex64::from_polar(scale, s1),
            complex_at(y, 3) * Complex64::from_polar(scale, s2),
            complex_at(y, 5) * Complex64::from_polar(scale, -s1 - s2),
        ]
    };

    let eval_traj = trajectory.clone();
    let eval = move |q: &[f64]| {
        let (r, s1, s2, t) = (q[0], q[1], q[2], q[3]);
        let y = eval_traj.sample_vec(t);
        let z = rotate(&y, s1, s2, r);
        let mut out = vec![r * y[0], 0.0, 0.0, 0.0, 0.0, 0.0, 0.0];
        for j in 0..3 {
            write_complex(&mut out, 1 + 2 * j, z[j]);
        }
        out
    };

    let frame_traj = trajectory;
    let frames = move |q: &[f64]| {
        let (r, s1, s2, t) = (q[0], q[1], q[2], q[3]);
        let mut y = vec![0.0; 7];
        let mut dy = vec![0.0; 7];
        frame_traj.sample_with_derivative(t, &mut y, &mut dy);
        let z = rotate(&y, s1, s2, 1.0);
        let dz = rotate(&dy, s1, s2, r);
        let i = Complex64::i();
        let mut ray = vec![y[0], 0.0, 0.0, 0.0, 0.0, 0.0, 0.0];
        let mut torus1 = vec![0.0; 7];
        let mut torus2 = vec![0.0; 7];
        let mut flow = vec![r * dy[0], 0.0, 0.0, 0.0, 0.0, 0.0, 0.0];
        for j in 0..3 {
            write_complex(&mut ray, 1 + 2 * j, z[j]);
            write_complex(&mut flow, 1 + 2 * j, dz[j]);
        }
        write_complex(&mut torus1, 1, i * r * z[0]);
        write_complex(&mut torus1, 5, -i * r * z[2]);
        write_complex(&mut torus2, 3, i * r * z[1]);
        write_complex(&mut torus2, 5, -i * r * z[2]);
        vec![ray, torus1, torus2, flow]
    };

    Ok(Parametrization::new("coassoc-u1sq-cone", domain, 7, eval).with_analytic_frames(frames))
}

/// Orthonormal basis of the symmetry plane annihilated by the covector
/// `(mu, nu, lambda)` in the (rotation, rotation, translation) generator
/// basis of the product system.
fn annihilated_plane(mu: f64, nu: f64, lambda: f64) -> [[f64; 3]; 2] {
    let norm = (mu * mu + nu * nu + lambda * lambda).sqrt();
    let n = [mu / norm, nu / norm, lambda / norm];
    let axis = (0..3).min_by(|&i, &j| n[i].abs().total_cmp(&n[j].abs())).unwrap();
    let mut e1 = [0.0; 3];
    e1[axis] = 1.0;
    for k in 0..3 {
        e1[k] -= n[axis] * n[k];
    }
    let len = e1.iter().map(|v| v * v).sum::<f64>().sqrt();
    for v in &mut e1 {
        *v /= len;
    }
    let e2 = [
        n[1] * e1[2] - n[2] * e1[1],
        n[2] * e1[0] - n[0] * e1[2],
        n[0] * e1[1] - n[1] * e1[0],
    ];
    [e1, e2]
}

/// Orbit of an integrated curve of the product system under its
/// two-dimensional symmetry plane of rotations and translation.
/// Parameters are `(a, b, t)`: two group coordinates and the flow.
pub fn assoc_r_u1sq_family(
    spec: &SystemSpec,
    trajectory: Arc<Trajectory>,
) -> Result<Parametrization, VerifyError> {
    let (lambda, mu, nu) = match spec {
        SystemSpec::AssocRU1Sq { lambda, mu, nu } => (*lambda, *mu, *nu),
        other => {
            return Err(VerifyError::WrongSystem {
                expected: "assoc-r-u1sq",
                got: other.name(),
            })
        }
    };
    expect_dim(&trajectory, 7)?;
    let plane = annihilated_plane(mu, nu, lambda);
    let (t_lo, t_hi) = trimmed_span(&trajectory);
    let domain = vec![(-1.0, 1.0), (-1.0, 1.0), (t_lo, t_hi)];

    let moved = move |y: &[f64], a: f64, b: f64| -> Vec<f64> {
        let p1 = a * plane[0][0] + b * plane[1][0];
        let p2 = a * plane[0][1] + b * plane[1][1];
        let shift = a * plane[0][2] + b * plane[1][2];
        let mut out = vec![y[0] + shift, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0];
        write_complex(&mut out, 1, complex_at(y, 1) * Complex64::from_polar(1.0, p1));
        write_complex(&mut out, 3, complex_at(y, 3) * Complex64::from_polar(1.0, p2));
        write_complex(
            &mut out,
            5,
            complex_at(y, 5) * Complex64::from_polar(1.0, -p1 - p2),
        );
        out
    };

    let eval_traj = trajectory.clone();
    let eval = move |q: &[f64]| moved(&eval_traj.sample_vec(q[2]), q[0], q[1]);

    let frame_traj = trajectory;
    let frames = move |q: &[f64]| {
        let (a, b, t) = (q[0], q[1], q[2]);
        let mut y = vec![0.0; 7];
        let mut dy = vec![0.0; 7];
        frame_traj.sample_with_derivative(t, &mut y, &mut dy);
        let point = moved(&y, a, b);
        let generator = |e: &[f64; 3]| -> Vec<f64> {
            let i = Complex64::i();
            let mut col = vec![e[2], 0.0, 0.0, 0.0, 0.0, 0.0, 0.0];
            write_complex(&mut col, 1, i * e[0] * complex_at(&point, 1));
            write_complex(&mut col, 3, i * e[1] * complex_at(&point, 3));
            write_complex(&mut col, 5, -i * (e[0] + e[1]) * complex_at(&point, 5));
            col
        };
        let mut flow = moved(&dy, a, b);
        flow[0] = dy[0];
        vec![generator(&plane[0]), generator(&plane[1]), flow]
    };

    Ok(Parametrization::new("assoc-r-u1sq", domain, 7, eval).with_analytic_frames(frames))
}

fn su2_generator_columns(p: &[f64]) -> [Vec<f64>; 3] {
    [
        vec![-p[1], p[0], p[3], -p[2], -p[5], p[4], p[7], -p[6]],
        vec![p[2], p[3], -p[0], -p[1], p[6], p[7], -p[4], -p[5]],
        vec![-p[3], p[2], -p[1], p[0], -p[7], p[6], -p[5], p[4]],
    ]
}

/// Orbit of an integrated curve of the quaternionic system under the
/// group, charted by the exponential. Parameters are `(v1, v2, v3, t)`.
pub fn cayley_su2_family(trajectory: Arc<Trajectory>) -> Result<Parametrization, VerifyError> {
    expect_dim(&trajectory, 8)?;
    let (t_lo, t_hi) = trimmed_span(&trajectory);
    let domain = vec![(-0.7, 0.7), (-0.7, 0.7), (-0.7, 0.7), (t_lo, t_hi)];

    let eval_traj = trajectory.clone();
    let eval = move |q: &[f64]| {
        let (a, b) = crate::systems::su2_from_exponential([q[0], q[1], q[2]]);
        crate::systems::su2_orbit_point(&eval_traj.sample_vec(q[3]), a, b).to_vec()
    };

    let frame_traj = trajectory;
    let frames = move |q: &[f64]| {
        let (a, b) = crate::systems::su2_from_exponential([q[0], q[1], q[2]]);
        let mut y = vec![0.0; 8];
        let mut dy = vec![0.0; 8];
        frame_traj.sample_with_derivative(q[3], &mut y, &mut dy);
        let point = crate::systems::su2_orbit_point(&y, a, b);
        let [x1, x2, x3] = su2_generator_columns(&point);
        let flow = crate::systems::su2_orbit_point(&dy, a, b).to_vec();
        vec![x1, x2, x3, flow]
    };

    Ok(Parametrization::new("cayley-su2", domain, 8, eval).with_analytic_frames(frames))
}

/// Orthonormal basis of the torus plane orthogonal to both the diagonal
/// phase and the winding vector, the directions that fix the quartic
/// level while preserving the cone construction.
fn torus_plane(a: [f64; 4]) -> [[f64; 4]; 2] {
    let ones = [0.5; 4];
    let a_norm = a.iter().map(|v| v * v).sum::<f64>().sqrt();
    let aw = a.map(|v| v / a_norm);
    let mut basis: Vec<[f64; 4]> = Vec::new();
    for k in 0..4 {
        let mut w = [0.0; 4];
        w[k] = 1.0;
        for n in [&ones, &aw].into_iter().chain(basis.iter()) {
            let d: f64 = w.iter().zip(n).map(|(x, y)| x * y).sum();
            for (x, y) in w.iter_mut().zip(n) {
                *x -= d * y;
            }
        }
        let len = w.iter().map(|v| v * v).sum::<f64>().sqrt();
        if len > 0.3 {
            basis.push(w.map(|v| v / len));
            if basis.len() == 2 {
                break;
            }
        }
    }
    [basis[0], basis[1]]
}

/// Cone over the two-torus orbit of an integrated sphere curve of the
/// four-winding system. Parameters are `(r, s1, s2, t)`.
pub fn cayley_cone_family(
    spec: &SystemSpec,
    trajectory: Arc<Trajectory>,
) -> Result<Parametrization, VerifyError> {
    let weights = match spec {
        SystemSpec::CayleyU1SqCone { a } => torus_plane(a.map(|v| v as f64)),
        other => {
            return Err(VerifyError::WrongSystem {
                expected: "cayley-u1sq-cone",
                got: other.name(),
            })
        }
    };
    expect_dim(&trajectory, 8)?;
    let (t_lo, t_hi) = trimmed_span(&trajectory);
    let domain = vec![RAY_RANGE, (0.0, TAU), (0.0, TAU), (t_lo, t_hi)];

    let rotate = move |y: &[f64], r: f64, s1: f64, s2: f64| -> Vec<f64> {
        let mut out = vec![0.0; 8];
        for j in 0..4 {
            let angle = s1 * weights[0][j] + s2 * weights[1][j];
            write_complex(&mut out, 2 * j, complex_at(y, 2 * j) * Complex64::from_polar(r, angle));
        }
        out
    };

    let eval_traj = trajectory.clone();
    let eval = move |q: &[f64]| rotate(&eval_traj.sample_vec(q[3]), q[0], q[1], q[2]);

    let frame_traj = trajectory;
    let frames = move |q: &[f64]| {
        let (r, s1, s2, t) = (q[0], q[1], q[2], q[3]);
        let mut y = vec![0.0; 8];
        let mut dy = vec![0.0; 8];
        frame_traj.sample_with_derivative(t, &mut y, &mut dy);
        let ray = rotate(&y, 1.0, s1, s2);
        let flow = rotate(&dy, r, s1, s2);
        let mut torus1 = vec![0.0; 8];
        let mut torus2 = vec![0.0; 8];
        for j in 0..4 {
            let z = complex_at(&ray, 2 * j);
            let i = Complex64::i();
            write_complex(&mut torus1, 2 * j, i * weights[0][j] * r * z);
            write_complex(&mut torus2, 2 * j, i * weights[1][j] * r * z);
        }
        vec![ray, torus1, torus2, flow]
    };

    Ok(Parametrization::new("cayley-u1sq-cone", domain, 8, eval).with_analytic_frames(frames))
}

/// Cone over the weighted-circle orbit of the closed-form extremal torus
/// curve. Parameters are `(r, s, t)`; frames are fully closed-form, which
/// makes this family the reference for source-comparison tests.
pub fn torus_cone_family(curve: TorusCurve) -> Parametrization {
    let domain = vec![RAY_RANGE, (0.0, TAU), (0.0, TAU)];
    let eval = move |q: &[f64]| cone_point(&curve.state(q[2]), q[1], q[0]).to_vec();
    let frames = move |q: &[f64]| {
        let (r, s, t) = (q[0], q[1], q[2]);
        let phi = cone_point(&curve.state(t), s, 1.0);
        let flow = cone_point(&curve.velocity(t), s, r);
        let circle = vec![
            0.0,
            -2.0 * r * phi[2],
            2.0 * r * phi[1],
            r * phi[4],
            -r * phi[3],
            r * phi[6],
            -r * phi[5],
        ];
        vec![phi.to_vec(), circle, flow.to_vec()]
    };
    Parametrization::new("assoc-torus-cone", domain, 7, eval).with_analytic_frames(frames)
}

/// Ruled deformation of the cone over the extremal torus curve, modulated
/// by a conjugate harmonic pair. Parameters are `(r, s, t)`; frames come
/// from finite differences since the pair may be an arbitrary closure.
pub fn ruled_family(curve: TorusCurve, pair: HarmonicPair) -> Parametrization {
    let domain = vec![RAY_RANGE, (0.0, TAU), (0.0, TAU)];
    let eval = move |q: &[f64]| {
        let (r, s, t) = (q[0], q[1], q[2]);
        let (u, v) = pair.eval(s, t);
        ruled_point(&curve.state(t), s, r, u, v).to_vec()
    };
    Parametrization::new("assoc-ruled", domain, 7, eval)
}
