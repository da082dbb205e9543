//! End-to-end certification runs: integrate each reduced system at tight
//! tolerance, wrap the trajectory in its symmetry family, sample tangent
//! frames, and check them against the calibration forms. Deviations here
//! measure the whole pipeline, so the bounds are set a couple of orders
//! above the values observed on a clean build.

use std::sync::Arc;

use calib_core::forms::{g2_form, spin7_form};
use calib_core::systems::{torus_cone_curve, HarmonicPair};
use calib_core::verify::{
    assoc_cone_family, assoc_r_u1sq_family, cayley_cone_family, cayley_su2_family,
    coassoc_cone_family, ruled_family, torus_cone_family,
};
use calib_core::{
    check_calibrated, check_coassociative, finite_difference_frames, integrate, tangent_frames,
    FrameSource, IntegratorConfig, Parametrization, SystemSpec, Trajectory,
};
use num::complex::Complex64;

const SAMPLES: usize = 48;
const FD_STEP: f64 = 1e-5;
const TOL: f64 = 1e-5;

fn unit(v: &[f64]) -> Vec<f64> {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter().map(|x| x / n).collect()
}

fn tight(t_end: f64) -> IntegratorConfig {
    IntegratorConfig::adaptive(1e-10, 1e-12, t_end)
}

fn trajectory(spec: &SystemSpec, y0: &[f64], config: &IntegratorConfig) -> Arc<Trajectory> {
    Arc::new(integrate(spec, y0, config).expect("integration failed"))
}

#[test]
fn associative_cone_family_is_calibrated() {
    let spec = SystemSpec::assoc_u1_cone([1, 2, -3]).unwrap();
    let y0 = unit(&[0.2, 0.5, -0.1, 0.3, 0.4, -0.2, 0.6]);
    let traj = trajectory(&spec, &y0, &tight(3.0));
    let family = assoc_cone_family(&spec, traj).unwrap();

    let frames = tangent_frames(&family, SAMPLES, 7, FD_STEP).unwrap();
    assert!(frames.skipped.is_empty(), "degenerate samples: {:?}", frames.skipped);
    assert!(frames.samples.iter().all(|s| s.source == FrameSource::Analytic));
    let report = check_calibrated(&g2_form(), &frames, TOL).unwrap();
    assert!(report.pass, "max deviation {:.3e}", report.max_deviation);
    assert!(!report.orientation_flipped);
    assert!(report.max_deviation < 1e-9, "got {:.3e}", report.max_deviation);

    let fd = finite_difference_frames(&family, SAMPLES, 7, FD_STEP).unwrap();
    assert!(fd.samples.iter().all(|s| s.source == FrameSource::FiniteDifference));
    let fd_report = check_calibrated(&g2_form(), &fd, TOL).unwrap();
    assert!(fd_report.pass, "fd max deviation {:.3e}", fd_report.max_deviation);
    assert!(fd_report.max_deviation < 1e-9, "got {:.3e}", fd_report.max_deviation);
}

#[test]
fn calibration_deviation_tracks_the_integration_error_budget() {
    let spec = SystemSpec::assoc_u1_cone([1, 2, -3]).unwrap();
    let y0 = unit(&[0.2, 0.5, -0.1, 0.3, 0.4, -0.2, 0.6]);
    let deviation = |config: &IntegratorConfig| -> f64 {
        let traj = trajectory(&spec, &y0, config);
        let family = assoc_cone_family(&spec, traj).unwrap();
        let frames = tangent_frames(&family, SAMPLES, 7, FD_STEP).unwrap();
        check_calibrated(&g2_form(), &frames, TOL).unwrap().max_deviation
    };
    let fine = deviation(&tight(3.0));
    let coarse = deviation(&IntegratorConfig::adaptive(1e-6, 1e-8, 3.0));
    assert!(fine < 1e-10, "tight run {:.3e}", fine);
    assert!(coarse < 1e-6, "coarse run {:.3e}", coarse);
    assert!(
        coarse > 50.0 * fine,
        "coarse {:.3e} should dominate tight {:.3e}",
        coarse,
        fine
    );
}

#[test]
fn coassociative_family_annihilates_triples_and_calibrates_the_dual() {
    let spec = SystemSpec::coassoc_u1sq_cone().unwrap();
    let y0 = [0.2, 0.0, 0.5, 0.6, 0.0, 0.35_f64.sqrt(), 0.0];
    let traj = trajectory(&spec, &y0, &tight(2.0));
    let family = coassoc_cone_family(traj).unwrap();

    let frames = tangent_frames(&family, SAMPLES, 11, FD_STEP).unwrap();
    let report = check_coassociative(&frames, TOL).unwrap();
    assert!(
        report.restriction_pass,
        "restriction {:.3e}",
        report.max_restriction
    );
    assert!(report.star_pass, "dual ratio {:.3e}", report.max_star_deviation);
    assert!(report.pass);
    assert!(!report.orientation_flipped);
    assert!(report.max_restriction < 1e-6, "got {:.3e}", report.max_restriction);
    assert!(
        report.max_star_deviation < 1e-12,
        "got {:.3e}",
        report.max_star_deviation
    );
}

#[test]
fn coassociative_restriction_error_is_frame_source_independent() {
    let spec = SystemSpec::coassoc_u1sq_cone().unwrap();
    let y0 = [0.2, 0.0, 0.5, 0.6, 0.0, 0.35_f64.sqrt(), 0.0];
    let traj = trajectory(&spec, &y0, &tight(2.0));
    let family = coassoc_cone_family(traj).unwrap();

    let analytic = tangent_frames(&family, SAMPLES, 11, FD_STEP).unwrap();
    let fd = finite_difference_frames(&family, SAMPLES, 11, FD_STEP).unwrap();
    let a = check_coassociative(&analytic, TOL).unwrap();
    let b = check_coassociative(&fd, TOL).unwrap();
    assert!(b.pass);
    // The residual comes from the trajectory, not the frame construction,
    // so the two sources must agree far below the residual itself.
    let gap = (a.max_restriction - b.max_restriction).abs();
    assert!(
        gap < 1e-2 * a.max_restriction.max(1e-300),
        "analytic {:.3e} vs fd {:.3e}",
        a.max_restriction,
        b.max_restriction
    );
}

#[test]
fn mixed_translation_rotation_family_is_calibrated() {
    let spec = SystemSpec::assoc_r_u1sq(0.6, 0.4, -0.3).unwrap();
    let y0 = [0.3, 0.4, 0.1, -0.2, 0.5, 0.2, -0.3];
    let traj = trajectory(&spec, &y0, &tight(1.5));
    let family = assoc_r_u1sq_family(&spec, traj).unwrap();

    let frames = tangent_frames(&family, SAMPLES, 13, FD_STEP).unwrap();
    let report = check_calibrated(&g2_form(), &frames, TOL).unwrap();
    assert!(report.pass, "max deviation {:.3e}", report.max_deviation);
    assert!(!report.orientation_flipped);
    assert!(report.max_deviation < 1e-12, "got {:.3e}", report.max_deviation);
}

#[test]
fn pure_translation_limit_is_calibrated() {
    let spec = SystemSpec::assoc_r_u1sq(0.0, 0.8, -0.6).unwrap();
    let y0 = [0.3, 0.4, 0.1, -0.2, 0.5, 0.2, -0.3];
    let traj = trajectory(&spec, &y0, &tight(2.0));
    let family = assoc_r_u1sq_family(&spec, traj).unwrap();

    let frames = tangent_frames(&family, SAMPLES, 13, FD_STEP).unwrap();
    let report = check_calibrated(&g2_form(), &frames, TOL).unwrap();
    assert!(report.pass, "max deviation {:.3e}", report.max_deviation);
    assert!(report.max_deviation < 1e-12, "got {:.3e}", report.max_deviation);
}

#[test]
fn su2_orbit_family_is_calibrated() {
    let spec = SystemSpec::cayley_su2().unwrap();
    // Unit initial data blows up before t = 1; scaling by 0.6 stretches the
    // lifespan past the window.
    let y0: Vec<f64> = unit(&[0.5, 0.1, -0.3, 0.4, 0.2, -0.1, 0.3, 0.6])
        .iter()
        .map(|x| 0.6 * x)
        .collect();
    let traj = trajectory(&spec, &y0, &tight(1.0));
    let family = cayley_su2_family(traj).unwrap();

    let frames = tangent_frames(&family, SAMPLES, 17, FD_STEP).unwrap();
    let report = check_calibrated(&spin7_form(), &frames, TOL).unwrap();
    assert!(report.pass, "max deviation {:.3e}", report.max_deviation);
    assert!(!report.orientation_flipped);
    assert!(report.max_deviation < 1e-11, "got {:.3e}", report.max_deviation);

    let fd = finite_difference_frames(&family, SAMPLES, 17, FD_STEP).unwrap();
    let fd_report = check_calibrated(&spin7_form(), &fd, TOL).unwrap();
    assert!(fd_report.pass, "fd max deviation {:.3e}", fd_report.max_deviation);
    assert!(fd_report.max_deviation < 1e-11);
}

#[test]
fn eight_dimensional_torus_cone_calibrates_after_orientation_flip() {
    let spec = SystemSpec::cayley_u1sq_cone([-3, -1, 1, 3]).unwrap();
    let y0 = unit(&[0.4, 0.1, -0.2, 0.3, 0.5, -0.1, 0.2, 0.6]);
    let traj = trajectory(&spec, &y0, &tight(2.0));
    let family = cayley_cone_family(&spec, traj).unwrap();

    let frames = tangent_frames(&family, SAMPLES, 19, FD_STEP).unwrap();
    let report = check_calibrated(&spin7_form(), &frames, TOL).unwrap();
    // The (ray, torus, torus, flow) ordering is negatively oriented for
    // this system; the check must recover by flipping globally.
    assert!(report.orientation_flipped);
    assert!(report.pass, "max deviation {:.3e}", report.max_deviation);
    assert!(report.max_deviation < 1e-12, "got {:.3e}", report.max_deviation);
}

#[test]
fn ruled_families_over_a_closed_cone_link_are_calibrated() {
    let curve = torus_cone_curve([0.4, -0.7]);
    let cases: Vec<(&str, HarmonicPair)> = vec![
        ("zero", HarmonicPair::Zero),
        ("constant", HarmonicPair::constant(0.3, -0.2)),
        (
            "holomorphic",
            HarmonicPair::holomorphic(vec![
                Complex64::new(0.1, 0.05),
                Complex64::new(0.04, -0.06),
            ]),
        ),
    ];
    for (label, pair) in cases {
        let family = ruled_family(curve, pair);
        let frames = tangent_frames(&family, SAMPLES, 23, FD_STEP).unwrap();
        let report = check_calibrated(&g2_form(), &frames, TOL).unwrap();
        assert!(report.pass, "{label}: max deviation {:.3e}", report.max_deviation);
        assert!(!report.orientation_flipped, "{label}");
        assert!(report.max_deviation < 1e-12, "{label}: {:.3e}", report.max_deviation);
    }
}

#[test]
fn the_cauchy_riemann_coupling_is_necessary_for_ruled_calibration() {
    // Same coefficients evaluated at s - it instead of s + it. The rulings
    // still sweep a smooth 3-fold, but it is not calibrated.
    let curve = torus_cone_curve([0.4, -0.7]);
    let pair = HarmonicPair::Custom(Arc::new(|s, t| {
        let w = Complex64::new(s, -t);
        let f = Complex64::new(0.1, 0.05) + Complex64::new(0.04, -0.06) * w;
        (f.re, f.im)
    }));
    let family = ruled_family(curve, pair);
    let frames = tangent_frames(&family, SAMPLES, 23, FD_STEP).unwrap();
    let report = check_calibrated(&g2_form(), &frames, TOL).unwrap();
    assert!(!report.pass, "max deviation {:.3e}", report.max_deviation);
    assert!(report.max_deviation > 1e-3, "got {:.3e}", report.max_deviation);
    assert!(!report.failures.is_empty());
}

#[test]
fn closed_form_cone_reference_family_is_calibrated_to_roundoff() {
    let family = torus_cone_family(torus_cone_curve([0.4, -0.7]));
    let frames = tangent_frames(&family, SAMPLES, 29, FD_STEP).unwrap();
    let report = check_calibrated(&g2_form(), &frames, TOL).unwrap();
    assert!(report.pass, "max deviation {:.3e}", report.max_deviation);
    assert!(report.max_deviation < 1e-12, "got {:.3e}", report.max_deviation);
}

/// Graph-style family with nonvanishing third derivatives, so the central
/// difference error in the tangent frames is genuinely quadratic in the
/// step rather than hidden below roundoff.
fn curved_graph_family() -> Parametrization {
    Parametrization::new(
        "curved-graph",
        vec![(-1.0, 1.0); 3],
        7,
        |q: &[f64]| {
            vec![
                q[0],
                q[1],
                q[2],
                q[0].sin() * q[1],
                q[1].cos() + q[2].powi(3),
                (q[0] + q[2]).sin(),
                q[0] * q[0] * q[1],
            ]
        },
    )
    .with_analytic_frames(|q: &[f64]| {
        vec![
            vec![
                1.0,
                0.0,
                0.0,
                q[0].cos() * q[1],
                0.0,
                (q[0] + q[2]).cos(),
                2.0 * q[0] * q[1],
            ],
            vec![0.0, 1.0, 0.0, q[0].sin(), -q[1].sin(), 0.0, q[0] * q[0]],
            vec![0.0, 0.0, 1.0, 0.0, 3.0 * q[2] * q[2], (q[0] + q[2]).cos(), 0.0],
        ]
    })
}

fn mean_ratio_discrepancy(family: &Parametrization, step: f64) -> f64 {
    let phi = g2_form();
    let analytic = tangent_frames(family, 32, 31, step).unwrap();
    let fd = finite_difference_frames(family, 32, 31, step).unwrap();
    assert_eq!(analytic.samples.len(), fd.samples.len());
    let mut total = 0.0;
    for (a, b) in analytic.samples.iter().zip(&fd.samples) {
        assert_eq!(a.params, b.params, "sources must sample the same points");
        let ra = phi.calibration_ratio(&a.frame).unwrap();
        let rb = phi.calibration_ratio(&b.frame).unwrap();
        total += (ra - rb).abs();
    }
    total / analytic.samples.len() as f64
}

#[test]
fn quartering_the_difference_step_cuts_the_ratio_discrepancy_sixteenfold() {
    let family = curved_graph_family();
    let coarse = mean_ratio_discrepancy(&family, 1e-3);
    let fine = mean_ratio_discrepancy(&family, 2.5e-4);
    assert!(coarse < 1e-5, "coarse discrepancy {:.3e}", coarse);
    assert!(fine > 0.0);
    let ratio = coarse / fine;
    assert!(
        (12.0..20.0).contains(&ratio),
        "expected roughly sixteenfold reduction, got {ratio:.2} ({coarse:.3e} -> {fine:.3e})"
    );
}
