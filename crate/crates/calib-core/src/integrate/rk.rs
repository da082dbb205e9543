//! Runge-Kutta steppers for autonomous systems: classical fourth order
//! with a fixed step, and the Dormand-Prince embedded 5(4) pair with a
//! reusable final stage.

pub(crate) struct Rk4Scratch {
    k1: Vec<f64>,
    k2: Vec<f64>,
    k3: Vec<f64>,
    k4: Vec<f64>,
    tmp: Vec<f64>,
}

impl Rk4Scratch {
    pub fn new(dim: usize) -> Self {
        Rk4Scratch {
            k1: vec![0.0; dim],
            k2: vec![0.0; dim],
            k3: vec![0.0; dim],
            k4: vec![0.0; dim],
            tmp: vec![0.0; dim],
        }
    }
}

/// One classical fourth-order step of size `h` from `y` into `out`.
pub(crate) fn rk4_step<F>(f: &F, y: &[f64], h: f64, out: &mut [f64], s: &mut Rk4Scratch)
where
    F: Fn(&[f64], &mut [f64]) + ?Sized,
{
    let n = y.len();
    f(y, &mut s.k1);
    for j in 0..n {
        s.tmp[j] = y[j] + 0.5 * h * s.k1[j];
    }
    f(&s.tmp, &mut s.k2);
    for j in 0..n {
        s.tmp[j] = y[j] + 0.5 * h * s.k2[j];
    }
    f(&s.tmp, &mut s.k3);
    for j in 0..n {
        s.tmp[j] = y[j] + h * s.k3[j];
    }
    f(&s.tmp, &mut s.k4);
    for j in 0..n {
        out[j] = y[j] + h / 6.0 * (s.k1[j] + 2.0 * s.k2[j] + 2.0 * s.k3[j] + s.k4[j]);
    }
}

const A2: [f64; 1] = [1.0 / 5.0];
const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
const A5: [f64; 4] = [
    19372.0 / 6561.0,
    -25360.0 / 2187.0,
    64448.0 / 6561.0,
    -212.0 / 729.0,
];
const A6: [f64; 5] = [
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
];
/// Fifth-order weights; also the last stage row, so the final stage
/// evaluation is the first stage of the next step.
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
/// Difference between the fifth- and fourth-order weights.
const ERR: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

pub(crate) struct DopriStepper {
    k: [Vec<f64>; 7],
    tmp: Vec<f64>,
    first_stage_ready: bool,
}

impl DopriStepper {
    pub fn new(dim: usize) -> Self {
        DopriStepper {
            k: std::array::from_fn(|_| vec![0.0; dim]),
            tmp: vec![0.0; dim],
            first_stage_ready: false,
        }
    }

    /// Invalidates the cached first stage, forcing a fresh evaluation on
    /// the next attempt. Needed after the state is modified outside the
    /// stepper, such as by sphere renormalization.
    pub fn reset(&mut self) {
        self.first_stage_ready = false;
    }

    /// Attempts one step of size `h` from `y` into `out` and returns the
    /// scaled error norm; the step should be accepted when it is at most
    /// one. On acceptance the caller must call [`DopriStepper::accept`].
    pub fn try_step<F>(
        &mut self,
        f: &F,
        y: &[f64],
        h: f64,
        abs_tol: f64,
        rel_tol: f64,
        out: &mut [f64],
    ) -> f64
    where
        F: Fn(&[f64], &mut [f64]) + ?Sized,
    {
        let n = y.len();
        if !self.first_stage_ready {
            f(y, &mut self.k[0]);
            self.first_stage_ready = true;
        }
        let rows: [&[f64]; 5] = [&A2, &A3, &A4, &A5, &A6];
        for (stage, row) in rows.iter().enumerate() {
            for j in 0..n {
                let mut acc = 0.0;
                for (i, a) in row.iter().enumerate() {
                    acc += a * self.k[i][j];
                }
                self.tmp[j] = y[j] + h * acc;
            }
            let (_, tail) = self.k.split_at_mut(stage + 1);
            f(&self.tmp, &mut tail[0]);
        }
        for j in 0..n {
            let mut acc = 0.0;
            for i in 0..6 {
                acc += B5[i] * self.k[i][j];
            }
            out[j] = y[j] + h * acc;
        }
        f(out, &mut self.k[6]);
        let mut err_sq = 0.0;
        for j in 0..n {
            let mut e = 0.0;
            for i in 0..7 {
                e += ERR[i] * self.k[i][j];
            }
            e *= h;
            let scale = abs_tol + rel_tol * y[j].abs().max(out[j].abs());
            let ratio = e / scale;
            err_sq += ratio * ratio;
        }
        (err_sq / n as f64).sqrt()
    }

    /// Promotes the final stage of an accepted step to the first stage of
    /// the next one.
    pub fn accept(&mut self) {
        self.k.swap(0, 6);
        self.first_stage_ready = true;
    }

    /// Derivative at the accepted state, valid right after [`accept`].
    ///
    /// [`accept`]: DopriStepper::accept
    pub fn accepted_derivative(&self) -> &[f64] {
        &self.k[0]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exp_rhs(y: &[f64], dy: &mut [f64]) {
        dy[0] = y[0];
    }

    #[test]
    fn rk4_step_has_fifth_order_local_error() {
        let mut scratch = Rk4Scratch::new(1);
        let mut local = |h: f64| {
            let mut out = [0.0];
            rk4_step(&exp_rhs, &[1.0], h, &mut out, &mut scratch);
            (out[0] - h.exp()).abs()
        };
        let coarse = local(0.1);
        let fine = local(0.05);
        let ratio = coarse / fine;
        assert!(
            (24.0..40.0).contains(&ratio),
            "local error ratio {ratio} not near 2^5"
        );
    }

    #[test]
    fn dopri_error_estimate_tracks_the_true_error() {
        let mut stepper = DopriStepper::new(1);
        let mut out = [0.0];
        let err = stepper.try_step(&exp_rhs, &[1.0], 0.1, 1e-12, 1e-12, &mut out);
        let true_err = (out[0] - 0.1f64.exp()).abs();
        assert!(true_err < 1e-9);
        assert!(err.is_finite() && err > 0.0);
    }

    #[test]
    fn final_stage_matches_derivative_at_the_new_state() {
        let mut stepper = DopriStepper::new(1);
        let mut out = [0.0];
        stepper.try_step(&exp_rhs, &[1.0], 0.05, 1e-10, 1e-10, &mut out);
        stepper.accept();
        let mut expected = [0.0];
        exp_rhs(&out, &mut expected);
        assert_eq!(stepper.accepted_derivative()[0], expected[0]);
    }
}
