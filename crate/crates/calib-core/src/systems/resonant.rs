//! Exactly periodic orbits of the winding-cone flow with an equal pair.
//!
//! When the last two windings coincide the flow splits. The axis pair
//! (x1, z1) obeys a closed planar system whose orbits are loops around
//! the equilibrium (0, 1/sqrt(3)), classified by the conserved level
//! b = r1 (x1^2 + r1^2 - 1). The remaining pair (z2, z3) evolves by a
//! scalar factor times the one-parameter rotation group generated by
//! J(z2, z3) = (i conj(z3), -i conj(z2)), which squares to minus the
//! identity; the scalar factor returns to one over each planar loop and
//! the rotation advances by a return angle that depends only on the
//! level b. A full orbit therefore closes exactly when the return angle
//! is a rational multiple of 2*pi. Such resonant levels are dense in the
//! admissible range, and every state over a resonant level closes, so
//! exactly periodic orbits form codimension-one families even though
//! they are not generic in measure.

use super::{SystemError, SystemSpec};

/// Supremum of |b| over the unit ball: attained at x1 = 0, r1 = 1/sqrt(3).
pub fn level_bound() -> f64 {
    2.0 / (3.0 * 3.0_f64.sqrt())
}

/// One loop of the axis-pair subsystem at a fixed level, together with
/// the rotation angle the transverse pair picks up per loop.
#[derive(Debug, Clone, Copy)]
pub struct PlanarCycle {
    windings: [i64; 3],
    /// Conserved planar level b = r1 (x1^2 + r1^2 - 1), in (-bound, 0).
    pub level: f64,
    /// Time for the planar pair to return to its starting point.
    pub period: f64,
    /// Signed rotation angle applied to (z2, z3) per planar loop.
    pub return_angle: f64,
    /// Loop point on the section x1 = 0, inner branch: (x1, r1).
    pub start: [f64; 2],
}

fn planar_rhs(a1: f64, a2: f64, y: &[f64; 3]) -> [f64; 3] {
    let [x, r, _] = *y;
    [
        a1 * r * r + a2 * (1.0 - x * x - r * r),
        -a1 * x * r,
        r,
    ]
}

fn planar_step(a1: f64, a2: f64, y: &[f64; 3], h: f64) -> [f64; 3] {
    let k1 = planar_rhs(a1, a2, y);
    let mut t = [0.0; 3];
    for j in 0..3 {
        t[j] = y[j] + 0.5 * h * k1[j];
    }
    let k2 = planar_rhs(a1, a2, &t);
    for j in 0..3 {
        t[j] = y[j] + 0.5 * h * k2[j];
    }
    let k3 = planar_rhs(a1, a2, &t);
    for j in 0..3 {
        t[j] = y[j] + h * k3[j];
    }
    let k4 = planar_rhs(a1, a2, &t);
    let mut out = [0.0; 3];
    for j in 0..3 {
        out[j] = y[j] + h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
    }
    out
}

fn equal_pair_windings(spec: &SystemSpec) -> Result<[i64; 3], SystemError> {
    match spec {
        SystemSpec::AssocU1Cone { alpha } if alpha[1] == alpha[2] => Ok(*alpha),
        _ => Err(SystemError::NeedsEqualPair(spec.name())),
    }
}

/// Inner positive root of r^3 - r = b, the loop's crossing of x1 = 0
/// with the smaller radius.
fn inner_section_radius(level: f64) -> f64 {
    let f = |r: f64| r * r * r - r - level;
    let (mut lo, mut hi) = (0.0_f64, 1.0 / 3.0_f64.sqrt());
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

const PLANAR_STEP: f64 = 1.0e-3;

/// Traces one loop of the axis-pair subsystem at the given level.
pub fn planar_cycle(spec: &SystemSpec, level: f64) -> Result<PlanarCycle, SystemError> {
    let windings = equal_pair_windings(spec)?;
    if !(level > -level_bound() && level < 0.0) {
        return Err(SystemError::BadLevel(level));
    }
    let (a1, a2) = (windings[0] as f64, windings[1] as f64);
    let r0 = inner_section_radius(level);
    let mut y = [0.0, r0, 0.0];
    let mut t = 0.0;
    let mut crossings = 0;
    let max_time = 1.0e4;
    loop {
        let next = planar_step(a1, a2, &y, PLANAR_STEP);
        if y[0].signum() != next[0].signum() && next[0] != 0.0 && t > 0.0 {
            crossings += 1;
            if crossings == 2 {
                let (mut lo, mut hi) = (0.0, PLANAR_STEP);
                let sign = next[0].signum();
                for _ in 0..80 {
                    let mid = 0.5 * (lo + hi);
                    if planar_step(a1, a2, &y, mid)[0].signum() == sign {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                let dt = 0.5 * (lo + hi);
                let end = planar_step(a1, a2, &y, dt);
                let beta2 = a2 - a1;
                return Ok(PlanarCycle {
                    windings,
                    level,
                    period: t + dt,
                    return_angle: beta2 * end[2],
                    start: [0.0, r0],
                });
            }
        }
        y = next;
        t += PLANAR_STEP;
        if t > max_time {
            return Err(SystemError::BadLevel(level));
        }
    }
}

impl PlanarCycle {
    /// Axis-pair point (x1, r1) after running the planar flow for `time`
    /// from the section start.
    pub fn planar_point(&self, time: f64) -> [f64; 2] {
        let (a1, a2) = (self.windings[0] as f64, self.windings[1] as f64);
        let mut y = [self.start[0], self.start[1], 0.0];
        let mut remaining = time;
        while remaining > PLANAR_STEP {
            y = planar_step(a1, a2, &y, PLANAR_STEP);
            remaining -= PLANAR_STEP;
        }
        if remaining > 0.0 {
            y = planar_step(a1, a2, &y, remaining);
        }
        [y[0], y[1]]
    }

    /// Unit state over this cycle: the planar point at `phase` times the
    /// period, with the transverse direction scaled to fill the sphere.
    /// A zero transverse direction yields the bare planar loop state.
    pub fn state(&self, phase: f64, transverse: [f64; 4]) -> [f64; 7] {
        let [x1, r1] = self.planar_point(phase * self.period);
        let room = (1.0 - x1 * x1 - r1 * r1).max(0.0).sqrt();
        let norm = transverse.iter().map(|v| v * v).sum::<f64>().sqrt();
        let w = if norm > 1.0e-12 {
            transverse.map(|v| v * room / norm)
        } else {
            [0.0; 4]
        };
        let scale = if norm > 1.0e-12 {
            1.0
        } else {
            // Without a transverse part the state must renormalize the
            // planar pair onto the unit sphere.
            (x1 * x1 + r1 * r1).sqrt().recip()
        };
        [
            x1 * scale,
            r1 * scale,
            0.0,
            w[0],
            w[1],
            w[2],
            w[3],
        ]
    }
}

/// Rotation of the transverse pair by `angle` along the group generated
/// by J(z2, z3) = (i conj(z3), -i conj(z2)).
pub fn transverse_rotation(w: &[f64; 4], angle: f64) -> [f64; 4] {
    let (c, s) = (angle.cos(), angle.sin());
    let jw = [w[3], w[2], -w[1], -w[0]];
    [
        c * w[0] + s * jw[0],
        c * w[1] + s * jw[1],
        c * w[2] + s * jw[2],
        c * w[3] + s * jw[3],
    ]
}

/// Finds the level whose return angle is 2*pi*p/q in magnitude, so every
/// state over it closes after q planar loops. The attainable ratio band
/// is roughly (0.750, 0.866); targets outside it are rejected.
pub fn resonant_level(spec: &SystemSpec, p: u32, q: u32) -> Result<PlanarCycle, SystemError> {
    if p == 0 || q == 0 {
        return Err(SystemError::NoResonance { p, q });
    }
    let target = 2.0 * std::f64::consts::PI * p as f64 / q as f64;
    let bound = level_bound();
    let ratio = |level: f64| -> Result<f64, SystemError> {
        Ok(planar_cycle(spec, level)?.return_angle.abs() - target)
    };
    let grid: Vec<f64> = (0..40)
        .map(|k| -bound * (0.999 - 0.978 * k as f64 / 39.0))
        .collect();
    let mut prev = (grid[0], ratio(grid[0])?);
    for &level in &grid[1..] {
        let here = (level, ratio(level)?);
        if prev.1 * here.1 <= 0.0 {
            let (mut lo, mut hi) = (prev, here);
            for _ in 0..60 {
                let mid = 0.5 * (lo.0 + hi.0);
                let val = ratio(mid)?;
                if val * lo.1 <= 0.0 {
                    hi = (mid, val);
                } else {
                    lo = (mid, val);
                }
            }
            return planar_cycle(spec, 0.5 * (lo.0 + hi.0));
        }
        prev = here;
    }
    Err(SystemError::NoResonance { p, q })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrate::{integrate, IntegratorConfig};
    use std::f64::consts::PI;

    fn doubled() -> SystemSpec {
        SystemSpec::assoc_u1_cone([2, -1, -1]).unwrap()
    }

    #[test]
    fn planar_cycle_returns_to_its_section_point() {
        let cycle = planar_cycle(&doubled(), -0.25).unwrap();
        let end = cycle.planar_point(cycle.period);
        assert!(end[0].abs() < 1.0e-9, "x1 end {}", end[0]);
        assert!((end[1] - cycle.start[1]).abs() < 1.0e-9);
        let half = cycle.planar_point(0.5 * cycle.period);
        assert!((half[0] - cycle.start[0]).abs() > 1.0e-3 || (half[1] - cycle.start[1]).abs() > 1.0e-3);
    }

    #[test]
    fn small_loops_match_the_linearized_frequency() {
        // Near the planar equilibrium (0, 1/sqrt(3)) the loop frequency
        // tends to 2, so the period tends to pi, and the mean of r1 tends
        // to 1/sqrt(3), making the return angle tend to sqrt(3)*pi.
        let cycle = planar_cycle(&doubled(), -0.9995 * level_bound()).unwrap();
        assert!((cycle.period - PI).abs() < 1.0e-2, "period {}", cycle.period);
        assert!(
            (cycle.return_angle.abs() - 3.0_f64.sqrt() * PI).abs() < 3.0e-2,
            "angle {}",
            cycle.return_angle
        );
    }

    #[test]
    fn transverse_motion_is_the_closed_form_rotation() {
        let cycle = planar_cycle(&doubled(), -0.21).unwrap();
        let spec = doubled();
        let w0 = [0.31, -0.52, 0.64, 0.17];
        let state = cycle.state(0.0, w0);
        let config = IntegratorConfig::adaptive(1.0e-12, 1.0e-13, cycle.period);
        let traj = integrate(&spec, &state, &config).unwrap();
        let end = traj.final_state();
        assert!((end[0] - state[0]).abs() < 1.0e-8);
        assert!((end[1] - state[1]).abs() < 1.0e-8);
        assert!(end[2].abs() < 1.0e-10);
        let w_in = [state[3], state[4], state[5], state[6]];
        let w_expect = transverse_rotation(&w_in, cycle.return_angle);
        for j in 0..4 {
            assert!(
                (end[3 + j] - w_expect[j]).abs() < 1.0e-7,
                "component {j}: {} vs {}",
                end[3 + j],
                w_expect[j]
            );
        }
    }

    #[test]
    fn resonant_level_closes_the_full_orbit() {
        let spec = doubled();
        let cycle = resonant_level(&spec, 4, 5).unwrap();
        assert!(
            (cycle.return_angle.abs() - 2.0 * PI * 0.8).abs() < 1.0e-9,
            "angle {}",
            cycle.return_angle
        );
        let state = cycle.state(0.35, [0.9, 0.1, -0.4, 0.6]);
        let t_end = 5.0 * cycle.period;
        let config = IntegratorConfig::adaptive(1.0e-11, 1.0e-12, t_end);
        let traj = integrate(&spec, &state, &config).unwrap();
        let end = traj.final_state();
        let dist: f64 = end
            .iter()
            .zip(&state)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        assert!(dist < 1.0e-7, "closure {dist:.3e}");
    }

    #[test]
    fn off_resonance_targets_are_rejected() {
        assert!(matches!(
            resonant_level(&doubled(), 1, 2),
            Err(SystemError::NoResonance { p: 1, q: 2 })
        ));
        assert!(matches!(
            resonant_level(&doubled(), 0, 3),
            Err(SystemError::NoResonance { .. })
        ));
    }

    #[test]
    fn only_equal_pair_systems_have_planar_cycles() {
        let spec = SystemSpec::assoc_u1_cone([-5, 2, 3]).unwrap();
        assert!(matches!(
            planar_cycle(&spec, -0.2),
            Err(SystemError::NeedsEqualPair(_))
        ));
        assert!(matches!(
            planar_cycle(&doubled(), 0.1),
            Err(SystemError::BadLevel(_))
        ));
        assert!(matches!(
            planar_cycle(&doubled(), -0.5),
            Err(SystemError::BadLevel(_))
        ));
    }
}
