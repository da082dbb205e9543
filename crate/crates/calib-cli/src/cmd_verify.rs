//! `calib verify`: sample tangent frames over a configured family, run the
//! matching calibration check, and write a certification report. Exit
//! status separates input errors from genuine numerical failures.

use std::fs;
use std::path::PathBuf;
use std::sync::Arc;

use calib_core::forms::{g2_form, spin7_form};
use calib_core::verify::{
    asymptotic_rate, assoc_cone_family, assoc_r_u1sq_family, cayley_cone_family,
    cayley_su2_family, check_calibrated, check_coassociative, coassoc_cone_family, ruled_family,
};
use calib_core::{
    finite_difference_frames, tangent_frames, Parametrization, RateFit, RateOutcome, RuledParams,
};
use clap::Args;

use crate::cmd_integrate::{check_constraints, prepare_state};
use crate::config::{self, Family, FrameChoice, VerifyConfig};
use crate::manifest::ManifestBuilder;
use crate::Failure;

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Verification configuration (JSON)
    #[arg(long, value_name = "FILE")]
    pub config: PathBuf,
    /// Output directory
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
    /// Seed for the frame-sample draw
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Largest allowed deviation of the calibration ratio from 1
    #[arg(long, default_value_t = 1e-5)]
    pub tol: f64,
    /// Worker threads (defaults to all cores); results do not depend on it
    #[arg(long, value_name = "N")]
    pub parallelism: Option<usize>,
}

pub enum Check {
    /// Calibration ratio against the three-form on 7-space.
    G2,
    /// Two-sided check: three-form restriction vanishes, dual calibrates.
    Coassociative,
    /// Calibration ratio against the four-form on 8-space.
    Spin7,
}

/// Fixed probe points on the link torus where cone deviations are
/// maximized during the decay fit.
fn rate_window() -> Vec<(f64, f64)> {
    vec![(0.4, 0.3), (1.9, 1.1), (3.5, 2.4), (5.2, 3.0)]
}

/// Integrates the configured system and wraps the trajectory in its
/// symmetry family, tagged with the check that certifies it.
pub fn integrated_family(
    system: &str,
    parameters: &config::Params,
    initial_state: &[f64],
    integrator: &config::Integrator,
) -> Result<(Parametrization, Check), Failure> {
    let wrong = |e: calib_core::VerifyError| Failure::invalid(e.to_string());
    let spec = config::build_spec(system, parameters)?;
    let (y0, _, _, _) = prepare_state(&spec, initial_state, false)?;
    check_constraints(&spec, &y0)?;
    let trajectory = calib_core::integrate(&spec, &y0, &integrator.to_config())
        .map_err(|e| Failure::numerical(format!("integration failed: {e}")))?;
    let trajectory = Arc::new(trajectory);
    match spec.name() {
        "assoc-u1-cone" => Ok((assoc_cone_family(&spec, trajectory).map_err(wrong)?, Check::G2)),
        "assoc-r-u1sq" => Ok((
            assoc_r_u1sq_family(&spec, trajectory).map_err(wrong)?,
            Check::G2,
        )),
        "coassoc-u1sq-cone" => Ok((
            coassoc_cone_family(trajectory).map_err(wrong)?,
            Check::Coassociative,
        )),
        "cayley-su2" => Ok((cayley_su2_family(trajectory).map_err(wrong)?, Check::Spin7)),
        "cayley-u1sq-cone" => Ok((
            cayley_cone_family(&spec, trajectory).map_err(wrong)?,
            Check::Spin7,
        )),
        other => Err(Failure::invalid(format!("unknown system '{other}'"))),
    }
}

fn build_family(cfg: &VerifyConfig) -> Result<(Parametrization, Check, Option<RuledParams>), Failure> {
    match &cfg.family {
        Family::Integrated {
            system,
            parameters,
            initial_state,
            integrator,
        } => {
            let (family, check) = integrated_family(system, parameters, initial_state, integrator)?;
            Ok((family, check, None))
        }
        Family::Ruled { phases, pair } => {
            let curve = config::ruled_curve(*phases);
            let family = ruled_family(curve, pair.to_pair());
            let ruled = RuledParams {
                curve,
                pair: pair.to_pair(),
                window: rate_window(),
            };
            Ok((family, Check::G2, Some(ruled)))
        }
    }
}

struct Outcome {
    report: serde_json::Value,
    lines: Vec<String>,
    pass: bool,
}

fn run_checks(
    cfg: &VerifyConfig,
    args: &VerifyArgs,
    family: &Parametrization,
    check: &Check,
    ruled: Option<&RuledParams>,
) -> Result<Outcome, Failure> {
    let invalid = |e: calib_core::VerifyError| Failure::invalid(e.to_string());
    let frames = match cfg.frames {
        FrameChoice::Analytic => {
            tangent_frames(family, cfg.samples, args.seed, cfg.fd_step).map_err(invalid)?
        }
        FrameChoice::FiniteDifference => {
            finite_difference_frames(family, cfg.samples, args.seed, cfg.fd_step).map_err(invalid)?
        }
    };

    let mut lines = Vec::new();
    let (mut report, mut pass) = match check {
        Check::G2 | Check::Spin7 => {
            let form = if matches!(check, Check::G2) {
                g2_form()
            } else {
                spin7_form()
            };
            let report = check_calibrated(&form, &frames, args.tol).map_err(invalid)?;
            lines.push(format!(
                "verify {}: {} (max |ratio - 1| = {:.3e} over {} samples, tol {:.1e})",
                report.family,
                if report.pass { "PASS" } else { "FAIL" },
                report.max_deviation,
                report.samples,
                report.tol,
            ));
            let pass = report.pass;
            (serde_json::to_value(&report).map_err(Failure::io_json)?, pass)
        }
        Check::Coassociative => {
            let report = check_coassociative(&frames, args.tol).map_err(invalid)?;
            lines.push(format!(
                "verify {}: {} (max restriction = {:.3e}, max |ratio - 1| = {:.3e} over {} samples, tol {:.1e})",
                report.family,
                if report.pass { "PASS" } else { "FAIL" },
                report.max_restriction,
                report.max_star_deviation,
                report.samples,
                report.tol,
            ));
            let pass = report.pass;
            (serde_json::to_value(&report).map_err(Failure::io_json)?, pass)
        }
    };

    if let Some(request) = &cfg.rate {
        let ruled = ruled.ok_or_else(|| {
            Failure::invalid("the decay-rate fit applies to the ruled family only")
        })?;
        let fit: RateFit = asymptotic_rate(ruled, &request.radii()).map_err(invalid)?;
        match fit.outcome {
            RateOutcome::ExactCone => lines.push("rate: exact cone (deviations at round-off)".into()),
            RateOutcome::Fit {
                exponent, residual, ..
            } => lines.push(format!(
                "rate: deviation ~ r^{exponent:.4} (log-log residual {residual:.3e})"
            )),
            RateOutcome::Unbounded => {
                lines.push("rate: FAIL (deviations do not decay)".into());
                pass = false;
            }
        }
        report["rate"] = serde_json::to_value(&fit).map_err(Failure::io_json)?;
    }

    Ok(Outcome {
        report,
        lines,
        pass,
    })
}

pub fn run(args: &VerifyArgs) -> Result<(), Failure> {
    if !(args.tol.is_finite() && args.tol > 0.0) {
        return Err(Failure::invalid("--tol must be positive"));
    }
    let (cfg, bytes) = config::load::<VerifyConfig>(&args.config)?;
    let (family, check, ruled) = build_family(&cfg)?;

    let compute = || run_checks(&cfg, args, &family, &check, ruled.as_ref());
    let mut outcome = match args.parallelism {
        Some(workers) => rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| Failure::invalid(format!("thread pool: {e}")))?
            .install(compute)?,
        None => compute()?,
    };

    outcome.report["frames"] = serde_json::Value::String(
        match cfg.frames {
            FrameChoice::Analytic => "analytic",
            FrameChoice::FiniteDifference => "finite-difference",
        }
        .to_string(),
    );

    fs::create_dir_all(&args.out).map_err(Failure::io)?;
    let mut manifest = ManifestBuilder::new("verify", Some(&args.config), &bytes, args.seed);
    let report_path = args.out.join("report.json");
    let mut body = serde_json::to_string_pretty(&outcome.report).map_err(Failure::io_json)?;
    body.push('\n');
    fs::write(&report_path, body).map_err(Failure::io)?;
    manifest.record(&report_path);
    manifest.write(&args.out).map_err(Failure::io)?;

    for line in &outcome.lines {
        println!("{line}");
    }
    if outcome.pass {
        Ok(())
    } else {
        Err(Failure::numerical("verification failed"))
    }
}
