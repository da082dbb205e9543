//! The evolution equations of every cataloged system are re-derived by
//! contracting the calibration form against the symmetry generators and
//! compared, term by term over the rationals, against the hand-transcribed
//! right-hand sides. A match is exact or it is a bug; there is no tolerance.

use calib_core::symbolic::{compare_fields, derive_rhs, Polynomial, PolyVectorField};
use calib_core::SystemSpec;

fn specimens() -> Vec<SystemSpec> {
    vec![
        SystemSpec::assoc_u1_cone([2, -1, -1]).unwrap(),
        SystemSpec::assoc_u1_cone([1, 2, -3]).unwrap(),
        SystemSpec::assoc_r_u1sq(0.7, 0.4, -0.3).unwrap(),
        SystemSpec::coassoc_u1sq_cone().unwrap(),
        SystemSpec::cayley_su2().unwrap(),
        SystemSpec::cayley_u1sq_cone([-3, -1, 1, 3]).unwrap(),
        SystemSpec::cayley_u1sq_cone([-2, -1, 1, 2]).unwrap(),
    ]
}

#[test]
fn derived_fields_match_transcriptions_exactly() {
    for spec in specimens() {
        let report = spec
            .kind()
            .derivation_report()
            .unwrap_or_else(|e| panic!("{}: derivation failed: {e}", spec.name()));
        assert!(
            report.is_match(),
            "{}: mismatched components {:?}\n{}",
            spec.name(),
            report.mismatched_components(),
            report.describe(&spec.vars())
        );
    }
}

#[test]
fn derivation_is_deterministic() {
    let spec = SystemSpec::assoc_u1_cone([1, 2, -3]).unwrap();
    let a = derive_rhs(&spec.action()).unwrap();
    let b = derive_rhs(&spec.action()).unwrap();
    let report = compare_fields(&a, &b).unwrap();
    assert!(report.is_match());
}

#[test]
fn a_tampered_component_is_reported_with_its_index() {
    let spec = SystemSpec::coassoc_u1sq_cone().unwrap();
    let derived = derive_rhs(&spec.action()).unwrap();
    let mut components = derived.components().to_vec();
    let bump = &components[3] + &Polynomial::from_int(1);
    components[3] = bump;
    let tampered = PolyVectorField::new(components);
    let report = compare_fields(&derived, &tampered).unwrap();
    assert!(!report.is_match());
    assert_eq!(report.mismatched_components(), vec![3]);
    let text = report.describe(&spec.vars());
    assert!(!text.is_empty());
}

#[test]
fn mismatch_description_names_the_offending_variable() {
    let spec = SystemSpec::assoc_u1_cone([2, -1, -1]).unwrap();
    let vars = spec.vars();
    let derived = derive_rhs(&spec.action()).unwrap();
    let mut components = derived.components().to_vec();
    let extra = Polynomial::var(vars.coord(1));
    components[0] = &components[0] + &extra;
    let report = compare_fields(&PolyVectorField::new(components), &derived).unwrap();
    assert_eq!(report.mismatched_components(), vec![0]);
    let text = report.describe(&vars);
    assert!(
        text.contains(vars.name(vars.coord(1))),
        "description should name the leaked variable: {text}"
    );
}
