//! `calib integrate`: run one configured system and write the dense
//! trajectory, a run summary, and the manifest.

use std::fs;
use std::path::PathBuf;

use calib_core::{detect_period, SystemSpec, Trajectory};
use clap::Args;
use serde::Serialize;

use crate::config::{self, IntegrateConfig};
use crate::manifest::ManifestBuilder;
use crate::Failure;

#[derive(Debug, Args)]
pub struct IntegrateArgs {
    /// Run configuration (JSON)
    #[arg(long, value_name = "FILE")]
    pub config: PathBuf,
    /// Output directory
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
    /// Seed recorded in the manifest (integration itself is deterministic)
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Serialize)]
struct PeriodSummary {
    found: bool,
    period: f64,
    closure: f64,
}

#[derive(Debug, Serialize)]
struct Summary {
    system: String,
    t_start: f64,
    t_end: f64,
    steps: usize,
    initial_state: Vec<f64>,
    final_state: Vec<f64>,
    /// Conserved-quantity values at the initial state, full precision.
    constants: Vec<(String, f64)>,
    drift: Vec<(String, f64)>,
    max_drift: Option<f64>,
    period: Option<PeriodSummary>,
    normalized: bool,
    gauge_fixed: bool,
    notes: Vec<String>,
    partial: bool,
    error: Option<String>,
}

/// Projects cone-system states onto the unit sphere and applies the
/// residual phase gauge when requested. Returns the prepared state with
/// bookkeeping for the summary.
pub fn prepare_state(
    spec: &SystemSpec,
    state: &[f64],
    gauge_fix: bool,
) -> Result<(Vec<f64>, bool, bool, Vec<String>), Failure> {
    let dim = spec.vars().num_coords();
    if state.len() != dim {
        return Err(Failure::invalid(format!(
            "{} expects {dim} state components, got {}",
            spec.name(),
            state.len()
        )));
    }
    if state.iter().any(|v| !v.is_finite()) {
        return Err(Failure::invalid("initial state must be finite"));
    }
    let mut y0 = state.to_vec();
    let mut notes = Vec::new();

    let is_cone = matches!(
        spec.name(),
        "assoc-u1-cone" | "coassoc-u1sq-cone" | "cayley-u1sq-cone"
    );
    let mut normalized = false;
    if is_cone {
        let norm = y0.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm < 1e-12 {
            return Err(Failure::invalid("cone-system state must be nonzero"));
        }
        if (norm - 1.0).abs() > 1e-12 {
            for v in &mut y0 {
                *v /= norm;
            }
            notes.push(format!("state scaled by {} onto the unit sphere", 1.0 / norm));
            normalized = true;
        }
    }

    let mut gauge_fixed = false;
    if gauge_fix {
        match spec.phase_gauge(&y0) {
            Some(gauge) => {
                y0 = gauge.apply(&y0);
                notes.push("phase rotated to the canonical orbit representative".to_string());
                gauge_fixed = true;
            }
            None => notes.push(
                "gauge fixing requested but the system has no unit-winding phase".to_string(),
            ),
        }
    }
    Ok((y0, normalized, gauge_fixed, notes))
}

/// Evaluates the initial constraints; any violation is an input error.
pub fn check_constraints(spec: &SystemSpec, y0: &[f64]) -> Result<(), Failure> {
    let params = spec.param_values();
    let mut violations = Vec::new();
    for (name, poly) in spec.initial_constraints() {
        let mut values = params.clone();
        values.extend_from_slice(y0);
        let value = poly.eval_f64(&values);
        if value.abs() > 1e-9 {
            violations.push(format!("{name} = {value}"));
        }
    }
    if violations.is_empty() {
        Ok(())
    } else {
        Err(Failure::invalid(format!(
            "initial state violates {}: {}",
            spec.name(),
            violations.join(", ")
        )))
    }
}

fn write_trajectory(
    path: &std::path::Path,
    spec: &SystemSpec,
    traj: &Trajectory,
) -> Result<Vec<(String, f64)>, Failure> {
    let quantities: Vec<(&str, calib_core::symbolic::CompiledPoly, bool)> = spec
        .conserved_quantities()
        .iter()
        .map(|q| {
            let constant = !matches!(q.kind, calib_core::QuantityKind::Multiplier { .. });
            (q.name, q.poly.compile(), constant)
        })
        .collect();
    let params = spec.param_values();
    let dim = traj.dim();

    let mut csv = String::from("t");
    for j in 1..=dim {
        csv.push_str(&format!(",x{j}"));
    }
    for (name, _, _) in &quantities {
        csv.push_str(&format!(",{name}"));
    }
    csv.push('\n');

    let mut constants = Vec::new();
    let mut values = params.clone();
    values.extend_from_slice(traj.state(0));
    for (name, poly, constant) in &quantities {
        if *constant {
            constants.push((name.to_string(), poly.eval(&values)));
        }
    }

    for i in 0..traj.len() {
        csv.push_str(&traj.time(i).to_string());
        for v in traj.state(i) {
            csv.push(',');
            csv.push_str(&v.to_string());
        }
        let mut values = params.clone();
        values.extend_from_slice(traj.state(i));
        for (_, poly, _) in &quantities {
            csv.push(',');
            csv.push_str(&poly.eval(&values).to_string());
        }
        csv.push('\n');
    }
    fs::write(path, csv).map_err(Failure::io)?;
    Ok(constants)
}

pub fn run(args: &IntegrateArgs) -> Result<(), Failure> {
    let (cfg, bytes) = config::load::<IntegrateConfig>(&args.config)?;
    let spec = config::build_spec(&cfg.system, &cfg.parameters)?;
    let (y0, normalized, gauge_fixed, notes) =
        prepare_state(&spec, &cfg.initial_state, cfg.gauge_fix)?;
    check_constraints(&spec, &y0)?;

    fs::create_dir_all(&args.out).map_err(Failure::io)?;
    let mut manifest = ManifestBuilder::new("integrate", Some(&args.config), &bytes, args.seed);

    let result = calib_core::integrate(&spec, &y0, &cfg.integrator.to_config());
    let summary_path = args.out.join("summary.json");
    match result {
        Ok(traj) => {
            let csv_path = args.out.join("trajectory.csv");
            let constants = write_trajectory(&csv_path, &spec, &traj)?;
            manifest.record(&csv_path);

            let period = cfg.period.as_ref().map(|req| {
                let hit = detect_period(&traj, req.closure_tol, req.min_period);
                PeriodSummary {
                    found: hit.found,
                    period: hit.period,
                    closure: hit.closure,
                }
            });

            let summary = Summary {
                system: spec.name().to_string(),
                t_start: traj.t_start(),
                t_end: traj.t_end(),
                steps: traj.len(),
                initial_state: y0,
                final_state: traj.final_state().to_vec(),
                constants,
                drift: traj
                    .drift()
                    .iter()
                    .map(|d| (d.name.to_string(), d.max_drift))
                    .collect(),
                max_drift: Some(traj.max_drift()),
                period,
                normalized,
                gauge_fixed,
                notes,
                partial: false,
                error: None,
            };
            let mut body = serde_json::to_string_pretty(&summary).map_err(Failure::io_json)?;
            body.push('\n');
            fs::write(&summary_path, body).map_err(Failure::io)?;
            manifest.record(&summary_path);
            manifest.write(&args.out).map_err(Failure::io)?;
            Ok(())
        }
        Err(e) => {
            let summary = Summary {
                system: spec.name().to_string(),
                t_start: 0.0,
                t_end: 0.0,
                steps: 0,
                initial_state: y0,
                final_state: Vec::new(),
                constants: Vec::new(),
                drift: Vec::new(),
                max_drift: None,
                period: None,
                normalized,
                gauge_fixed,
                notes,
                partial: true,
                error: Some(e.to_string()),
            };
            let mut body = serde_json::to_string_pretty(&summary).map_err(Failure::io_json)?;
            body.push('\n');
            fs::write(&summary_path, body).map_err(Failure::io)?;
            manifest.record(&summary_path);
            manifest.write(&args.out).map_err(Failure::io)?;
            Err(Failure::numerical(format!("integration failed: {e}")))
        }
    }
}
