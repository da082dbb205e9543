//! Detection of periodic orbits on dense trajectories.

use super::Trajectory;

/// Outcome of a periodicity search.
#[derive(Debug, Clone, Copy)]
pub struct PeriodicityResult {
    /// Whether a return below the closure tolerance was found.
    pub found: bool,
    /// Time of the first sufficiently close return, measured from the
    /// trajectory start; meaningful only when `found`.
    pub period: f64,
    /// Distance between the interpolated state at the period and the
    /// initial state.
    pub closure: f64,
    /// Total refinement iterations spent across candidates.
    pub refinements: u32,
}

fn distance_sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Searches the trajectory for the first time `T` past `min_period` at
/// which the dense state returns to the initial state within
/// `closure_tol`.
///
/// Candidate returns are local minima of the distance over the stored
/// nodes; each is refined by bisecting the derivative of the squared
/// distance on the bracketing interval. Absence of a close return is a
/// valid result, reported with `found = false`.
pub fn detect_period(traj: &Trajectory, closure_tol: f64, min_period: f64) -> PeriodicityResult {
    let mut best = PeriodicityResult {
        found: false,
        period: 0.0,
        closure: f64::INFINITY,
        refinements: 0,
    };
    if traj.len() < 3 {
        return best;
    }
    let y0 = traj.state(0).to_vec();
    let t0 = traj.t_start();
    let dist: Vec<f64> = (0..traj.len())
        .map(|i| distance_sq(traj.state(i), &y0).sqrt())
        .collect();
    let mut refinements = 0u32;
    for i in 1..traj.len() - 1 {
        if traj.time(i) - t0 < min_period {
            continue;
        }
        if !(dist[i] <= dist[i - 1] && dist[i] < dist[i + 1]) {
            continue;
        }
        let a = traj.time(i - 1).max(t0 + min_period);
        let b = traj.time(i + 1);
        let (t_min, closure, iters) = refine_minimum(traj, &y0, a, b);
        refinements += iters;
        let period = t_min - t0;
        if period >= min_period && closure < best.closure {
            best = PeriodicityResult {
                found: closure <= closure_tol,
                period,
                closure,
                refinements,
            };
            if best.found {
                return best;
            }
        }
    }
    best.refinements = refinements;
    best
}

/// Bisection on the derivative of the squared distance to the initial
/// state. Falls back to a ternary search when the derivative does not
/// change sign over the bracket.
fn refine_minimum(traj: &Trajectory, y0: &[f64], mut a: f64, mut b: f64) -> (f64, f64, u32) {
    let dim = traj.dim();
    let mut y = vec![0.0; dim];
    let mut dy = vec![0.0; dim];
    let slope = |t: f64, y: &mut Vec<f64>, dy: &mut Vec<f64>| {
        traj.sample_with_derivative(t, y, dy);
        2.0 * y
            .iter()
            .zip(dy.iter())
            .zip(y0)
            .map(|((yi, di), y0i)| (yi - y0i) * di)
            .sum::<f64>()
    };
    let mut iters = 0u32;
    let (sa, sb) = (slope(a, &mut y, &mut dy), slope(b, &mut y, &mut dy));
    if sa < 0.0 && sb > 0.0 {
        while b - a > 1e-13 * b.abs().max(1.0) && iters < 80 {
            let mid = 0.5 * (a + b);
            if slope(mid, &mut y, &mut dy) < 0.0 {
                a = mid;
            } else {
                b = mid;
            }
            iters += 1;
        }
    } else {
        let value = |t: f64, y: &mut Vec<f64>| {
            traj.sample(t, y);
            distance_sq(y, y0)
        };
        while b - a > 1e-13 * b.abs().max(1.0) && iters < 120 {
            let m1 = a + (b - a) / 3.0;
            let m2 = b - (b - a) / 3.0;
            if value(m1, &mut y) < value(m2, &mut y) {
                b = m2;
            } else {
                a = m1;
            }
            iters += 1;
        }
    }
    let t_min = 0.5 * (a + b);
    traj.sample(t_min, &mut y);
    (t_min, distance_sq(&y, y0).sqrt(), iters)
}

/// Largest distance between the dense states at `t` and `t + period`
/// over `samples` base times spread across the trajectory. Distinguishes
/// a genuine closed loop from a single near-return.
pub fn loop_consistency(traj: &Trajectory, period: f64, samples: usize) -> f64 {
    assert!(samples >= 1);
    let usable = traj.t_end() - traj.t_start() - period;
    assert!(
        usable >= 0.0,
        "period {period} exceeds the trajectory span"
    );
    let dim = traj.dim();
    let mut a = vec![0.0; dim];
    let mut b = vec![0.0; dim];
    let mut worst = 0.0f64;
    for k in 0..samples {
        let t = traj.t_start() + usable * k as f64 / samples as f64;
        traj.sample(t, &mut a);
        traj.sample(t + period, &mut b);
        worst = worst.max(distance_sq(&a, &b).sqrt());
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circle_trajectory(rate: f64, growth: f64, t_end: f64, step: f64) -> Trajectory {
        let mut traj = Trajectory::new(2);
        let mut t = 0.0;
        while t <= t_end + 1e-12 {
            let r = (growth * t).exp();
            let (s, c) = (rate * t).sin_cos();
            let state = [r * c, r * s];
            let deriv = [
                growth * r * c - rate * r * s,
                growth * r * s + rate * r * c,
            ];
            traj.push_node(t, &state, &deriv);
            t += step;
        }
        traj
    }

    #[test]
    fn finds_the_circle_period() {
        let traj = circle_trajectory(1.0, 0.0, 10.0, 0.05);
        let result = detect_period(&traj, 1e-6, 0.5);
        assert!(result.found);
        assert!((result.period - std::f64::consts::TAU).abs() < 1e-6);
        assert!(result.closure <= 1e-6);
        assert!(result.refinements > 0);
    }

    #[test]
    fn spiral_never_closes() {
        let traj = circle_trajectory(1.0, 0.05, 20.0, 0.05);
        let result = detect_period(&traj, 1e-6, 0.5);
        assert!(!result.found);
        // The best near-return is still reported.
        assert!(result.closure.is_finite());
    }

    #[test]
    fn min_period_excludes_the_trivial_return() {
        let traj = circle_trajectory(1.0, 0.0, 30.0, 0.05);
        let result = detect_period(&traj, 1e-6, 8.0);
        assert!(result.found);
        // The first admissible return is the second revolution.
        assert!((result.period - 2.0 * std::f64::consts::TAU).abs() < 1e-6);
    }

    #[test]
    fn loop_consistency_detects_genuine_loops() {
        let closed = circle_trajectory(1.0, 0.0, 20.0, 0.02);
        let tight = loop_consistency(&closed, std::f64::consts::TAU, 10);
        assert!(tight < 1e-7, "consistency {tight}");
        let spiral = circle_trajectory(1.0, 0.03, 20.0, 0.02);
        let loose = loop_consistency(&spiral, std::f64::consts::TAU, 10);
        assert!(loose > 1e-2);
    }
}
