//! `calib sweep`: integrate a grid of initial states and write one CSV row
//! per state. Failed rows are recorded in place; the sweep itself succeeds
//! whenever the grid was valid. Output is byte-identical across worker
//! counts and re-runs with the same seed.

use std::fs;
use std::path::PathBuf;

use calib_core::systems::resonant_level;
use calib_core::SystemSpec;
use clap::Args;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cmd_integrate::prepare_state;
use crate::config::{self, States, SweepConfig};
use crate::manifest::ManifestBuilder;
use crate::Failure;

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Sweep configuration (JSON)
    #[arg(long, value_name = "FILE")]
    pub config: PathBuf,
    /// Output directory
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
    /// Seed for generated initial states
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads (defaults to all cores); results do not depend on it
    #[arg(long, value_name = "N")]
    pub parallelism: Option<usize>,
}

fn unit_sphere_state(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim)
            .map(|_| {
                let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
                let u2: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
                (-2.0 * u1.ln()).sqrt() * u2.cos()
            })
            .collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-6 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

fn build_states(
    spec: &SystemSpec,
    states: &States,
    gauge_fix: bool,
    seed: u64,
) -> Result<Vec<Vec<f64>>, Failure> {
    let dim = spec.vars().num_coords();
    let raw: Vec<Vec<f64>> = match states {
        States::Explicit { values } => values.clone(),
        States::Random { count } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..*count).map(|_| unit_sphere_state(&mut rng, dim)).collect()
        }
        States::Resonant { p, q, count } => {
            let cycle = resonant_level(spec, *p, *q)
                .map_err(|e| Failure::invalid(format!("resonant states: {e}")))?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..*count)
                .map(|_| {
                    let phase: f64 = rng.gen_range(0.0..1.0);
                    let transverse = [(); 4].map(|_| rng.gen_range(-1.0..1.0));
                    cycle.state(phase, transverse).to_vec()
                })
                .collect()
        }
    };
    raw.iter()
        .map(|y0| prepare_state(spec, y0, gauge_fix).map(|(state, _, _, _)| state))
        .collect()
}

fn csv_field(text: &str) -> String {
    if text.contains(',') || text.contains('"') || text.contains('\n') {
        format!("\"{}\"", text.replace('"', "\"\""))
    } else {
        text.to_string()
    }
}

pub fn run(args: &SweepArgs) -> Result<(), Failure> {
    let (cfg, bytes) = config::load::<SweepConfig>(&args.config)?;
    let spec = config::build_spec(&cfg.system, &cfg.parameters)?;
    let states = build_states(&spec, &cfg.states, cfg.gauge_fix, args.seed)?;
    if states.is_empty() {
        return Err(Failure::invalid("sweep needs at least one initial state"));
    }

    let sweep_config = calib_core::SweepConfig {
        integrator: cfg.integrator.to_config(),
        closure_tol: cfg.closure_tol,
        min_period: cfg.min_period,
    };
    let rows = calib_core::sweep(&spec, &states, &sweep_config, args.parallelism);

    let dim = spec.vars().num_coords();
    let quantity_names: Vec<&str> = spec.conserved_quantities().iter().map(|q| q.name).collect();
    let mut csv = String::from("index");
    for j in 1..=dim {
        csv.push_str(&format!(",x{j}"));
    }
    for name in &quantity_names {
        csv.push_str(&format!(",{name}"));
    }
    csv.push_str(",max_drift,period,closure,error\n");
    for row in &rows {
        csv.push_str(&row.index.to_string());
        for v in &row.initial {
            csv.push(',');
            csv.push_str(&v.to_string());
        }
        for (_, value) in &row.constants {
            csv.push(',');
            csv.push_str(&value.to_string());
        }
        for opt in [row.max_drift, row.period, row.closure] {
            csv.push(',');
            if let Some(v) = opt {
                csv.push_str(&v.to_string());
            }
        }
        csv.push(',');
        if let Some(e) = &row.error {
            csv.push_str(&csv_field(e));
        }
        csv.push('\n');
    }

    fs::create_dir_all(&args.out).map_err(Failure::io)?;
    let mut manifest = ManifestBuilder::new("sweep", Some(&args.config), &bytes, args.seed);
    let csv_path = args.out.join("sweep.csv");
    fs::write(&csv_path, csv).map_err(Failure::io)?;
    manifest.record(&csv_path);
    manifest.write(&args.out).map_err(Failure::io)?;

    let failures = rows.iter().filter(|r| r.error.is_some()).count();
    println!(
        "sweep: {} rows, {} failed, written to {}",
        rows.len(),
        failures,
        csv_path.display()
    );
    Ok(())
}
