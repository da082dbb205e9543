//! Batch integration over grids of initial conditions.

use super::{detect_period, integrate, IntegratorConfig};
use crate::systems::SystemSpec;
use rayon::prelude::*;

/// Sweep settings: how to integrate each grid point and how to search
/// the resulting trajectory for a period.
#[derive(Debug, Clone, Copy)]
pub struct SweepConfig {
    pub integrator: IntegratorConfig,
    pub closure_tol: f64,
    pub min_period: f64,
}

/// Outcome for one grid point. Failures are recorded in place; a sweep
/// never aborts because one row failed.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub index: usize,
    pub initial: Vec<f64>,
    /// Conserved-quantity values at the initial state, in catalog order.
    pub constants: Vec<(&'static str, f64)>,
    /// Largest conserved-quantity drift over the trajectory; absent when
    /// integration failed.
    pub max_drift: Option<f64>,
    /// Detected period, when the orbit closes below the tolerance.
    pub period: Option<f64>,
    /// Closure distance at the detected period.
    pub closure: Option<f64>,
    pub error: Option<String>,
}

/// Integrates every initial state and searches each trajectory for a
/// periodic return. Rows come back in grid order regardless of the
/// worker count, and a rerun with identical inputs produces identical
/// rows.
pub fn sweep(
    spec: &SystemSpec,
    initial_states: &[Vec<f64>],
    config: &SweepConfig,
    parallelism: Option<usize>,
) -> Vec<SweepRow> {
    let quantities: Vec<(&'static str, crate::symbolic::CompiledPoly)> = spec
        .conserved_quantities()
        .iter()
        .map(|q| (q.name, q.poly.compile()))
        .collect();
    let params = spec.param_values();
    let run = || {
        initial_states
            .par_iter()
            .enumerate()
            .map(|(index, y0)| {
                let mut values = params.clone();
                values.extend_from_slice(y0);
                let constants: Vec<(&'static str, f64)> = quantities
                    .iter()
                    .map(|(name, poly)| (*name, poly.eval(&values)))
                    .collect();
                match integrate(spec, y0, &config.integrator) {
                    Ok(traj) => {
                        let result = detect_period(&traj, config.closure_tol, config.min_period);
                        SweepRow {
                            index,
                            initial: y0.clone(),
                            constants,
                            max_drift: Some(traj.max_drift()),
                            period: result.found.then_some(result.period),
                            closure: result.found.then_some(result.closure),
                            error: None,
                        }
                    }
                    Err(e) => SweepRow {
                        index,
                        initial: y0.clone(),
                        constants,
                        max_drift: None,
                        period: None,
                        closure: None,
                        error: Some(e.to_string()),
                    },
                }
            })
            .collect()
    };
    match parallelism {
        Some(workers) => rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .expect("failed to build sweep thread pool")
            .install(run),
        None => run(),
    }
}
