//! Dense trajectories: accepted integration nodes with derivatives,
//! cubic Hermite interpolation between them, and drift records.

/// Observed drift of one conserved quantity along a trajectory.
#[derive(Debug, Clone, Copy)]
pub struct DriftEntry {
    pub name: &'static str,
    /// Value at the initial state.
    pub initial: f64,
    /// Largest `|value(t) - value(0)|` over the accepted nodes.
    pub max_drift: f64,
}

/// An integrated solution: strictly increasing times, states and state
/// derivatives at each accepted step, and per-quantity drift. Values
/// between nodes come from cubic Hermite interpolation, which matches
/// both endpoint states and endpoint derivatives.
#[derive(Debug, Clone)]
pub struct Trajectory {
    dim: usize,
    times: Vec<f64>,
    states: Vec<f64>,
    derivs: Vec<f64>,
    drift: Vec<DriftEntry>,
}

impl Trajectory {
    pub(crate) fn new(dim: usize) -> Self {
        Trajectory {
            dim,
            times: Vec::new(),
            states: Vec::new(),
            derivs: Vec::new(),
            drift: Vec::new(),
        }
    }

    pub(crate) fn push_node(&mut self, t: f64, state: &[f64], deriv: &[f64]) {
        debug_assert_eq!(state.len(), self.dim);
        debug_assert_eq!(deriv.len(), self.dim);
        debug_assert!(self.times.last().map_or(true, |&last| t > last));
        self.times.push(t);
        self.states.extend_from_slice(state);
        self.derivs.extend_from_slice(deriv);
    }

    pub(crate) fn set_drift(&mut self, drift: Vec<DriftEntry>) {
        self.drift = drift;
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of stored nodes.
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn t_start(&self) -> f64 {
        self.times[0]
    }

    pub fn t_end(&self) -> f64 {
        *self.times.last().unwrap()
    }

    pub fn time(&self, i: usize) -> f64 {
        self.times[i]
    }

    pub fn state(&self, i: usize) -> &[f64] {
        &self.states[i * self.dim..(i + 1) * self.dim]
    }

    pub fn deriv(&self, i: usize) -> &[f64] {
        &self.derivs[i * self.dim..(i + 1) * self.dim]
    }

    pub fn final_state(&self) -> &[f64] {
        self.state(self.len() - 1)
    }

    /// Drift entries for the monitored conserved quantities.
    pub fn drift(&self) -> &[DriftEntry] {
        &self.drift
    }

    /// Largest drift across all monitored quantities, zero when none are
    /// monitored.
    pub fn max_drift(&self) -> f64 {
        self.drift.iter().map(|d| d.max_drift).fold(0.0, f64::max)
    }

    /// Index of the node at or immediately before `t`.
    fn bracket(&self, t: f64) -> usize {
        let upper = self.times.partition_point(|&node| node <= t);
        upper.saturating_sub(1).min(self.len().saturating_sub(2))
    }

    /// Interpolated state at `t`, which must lie within the time span up
    /// to a small tolerance; values are clamped to the span.
    pub fn sample(&self, t: f64, out: &mut [f64]) {
        self.sample_parts(t, out, None);
    }

    pub fn sample_vec(&self, t: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        self.sample(t, &mut out);
        out
    }

    /// Interpolated state and its time derivative at `t`.
    pub fn sample_with_derivative(&self, t: f64, out: &mut [f64], out_deriv: &mut [f64]) {
        self.sample_parts(t, out, Some(out_deriv));
    }

    fn sample_parts(&self, t: f64, out: &mut [f64], out_deriv: Option<&mut [f64]>) {
        assert!(self.len() >= 2, "trajectory has fewer than two nodes");
        assert!(
            t >= self.t_start() - 1e-9 && t <= self.t_end() + 1e-9,
            "sample time {t} outside [{}, {}]",
            self.t_start(),
            self.t_end()
        );
        let t = t.clamp(self.t_start(), self.t_end());
        let i = self.bracket(t);
        let (t0, t1) = (self.times[i], self.times[i + 1]);
        let h = t1 - t0;
        let s = (t - t0) / h;
        let (y0, y1) = (self.state(i), self.state(i + 1));
        let (f0, f1) = (self.deriv(i), self.deriv(i + 1));
        let h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
        let h10 = s * (1.0 - s) * (1.0 - s);
        let h01 = s * s * (3.0 - 2.0 * s);
        let h11 = s * s * (s - 1.0);
        for j in 0..self.dim {
            out[j] = h00 * y0[j] + h10 * h * f0[j] + h01 * y1[j] + h11 * h * f1[j];
        }
        if let Some(out_deriv) = out_deriv {
            let d00 = 6.0 * s * (s - 1.0);
            let d10 = (1.0 - s) * (1.0 - 3.0 * s);
            let d01 = 6.0 * s * (1.0 - s);
            let d11 = s * (3.0 * s - 2.0);
            for j in 0..self.dim {
                out_deriv[j] =
                    (d00 * y0[j] + d01 * y1[j]) / h + d10 * f0[j] + d11 * f1[j];
            }
        }
    }
}
