//! Oracle tests for the exterior algebra layer.
//!
//! The Hodge star is cross-checked against the identity that defines it:
//! `b ^ *a = <a, b> vol` for all forms of equal degree, with the inner
//! product computed independently from the coefficient maps. Individual
//! star values frozen from hand computation pin the orientation convention.

use calib_core::forms::{
    from_json, g2_form, g2_star_form, spin7_form, to_canonical_json, AlternatingForm, MultiIndex,
};
use num::rational::BigRational;
use num::traits::Zero;
use num::BigInt;
use proptest::prelude::*;

fn ratio(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

fn basis_vector(n: usize, i: usize) -> Vec<f64> {
    let mut v = vec![0.0; n];
    v[i - 1] = 1.0;
    v
}

/// Coefficient-wise inner product in the monomial basis, computed without
/// touching the exterior algebra.
fn inner(a: &AlternatingForm, b: &AlternatingForm) -> BigRational {
    let mut total: BigRational = Zero::zero();
    for (idx, ca) in a.terms() {
        total += ca * b.coeff(idx);
    }
    total
}

fn volume_form(n: u8) -> AlternatingForm {
    let indices: Vec<u8> = (1..=n).collect();
    let mut vol = AlternatingForm::zero(n, n).unwrap();
    vol.add_term(&indices, &ratio(1, 1)).unwrap();
    vol
}

fn single_term(n: u8, indices: &[u8], coeff: BigRational) -> AlternatingForm {
    let mut f = AlternatingForm::zero(n, indices.len() as u8).unwrap();
    f.add_term(indices, &coeff).unwrap();
    f
}

#[test]
fn hodge_star_frozen_values_in_dim_seven() {
    let cases: [(&[u8], &[u8], i64); 7] = [
        (&[1, 2, 3], &[4, 5, 6, 7], 1),
        (&[1, 4, 5], &[2, 3, 6, 7], 1),
        (&[1, 6, 7], &[2, 3, 4, 5], 1),
        (&[2, 4, 6], &[1, 3, 5, 7], 1),
        (&[2, 5, 7], &[1, 3, 4, 6], 1),
        (&[3, 4, 7], &[1, 2, 5, 6], 1),
        (&[3, 5, 6], &[1, 2, 4, 7], 1),
    ];
    for (input, expected, sign) in cases {
        let star = single_term(7, input, ratio(1, 1)).hodge_star();
        assert_eq!(
            star,
            single_term(7, expected, ratio(sign, 1)),
            "star of dx{input:?}"
        );
    }
}

#[test]
fn hodge_star_frozen_values_in_dim_eight() {
    let star = single_term(8, &[1, 2, 3, 4], ratio(1, 1)).hodge_star();
    assert_eq!(star, single_term(8, &[5, 6, 7, 8], ratio(1, 1)));
    let star = single_term(8, &[1, 3, 5, 7], ratio(1, 1)).hodge_star();
    assert_eq!(star, single_term(8, &[2, 4, 6, 8], ratio(1, 1)));
    let star = single_term(8, &[1, 3, 6, 8], ratio(1, 1)).hodge_star();
    assert_eq!(star, single_term(8, &[2, 4, 5, 7], ratio(1, 1)));
}

#[test]
fn g2_star_form_is_hodge_dual_of_g2_form() {
    assert_eq!(g2_form().hodge_star(), g2_star_form());
    assert_eq!(g2_star_form().hodge_star(), g2_form());
}

#[test]
fn spin7_form_is_self_dual() {
    assert_eq!(spin7_form().hodge_star(), spin7_form());
}

#[test]
fn calibration_values_on_coordinate_planes() {
    let phi = g2_form();
    let e = |i| basis_vector(7, i);
    assert_eq!(phi.evaluate(&[e(1), e(2), e(3)]).unwrap(), 1.0);
    assert_eq!(phi.evaluate(&[e(2), e(5), e(7)]).unwrap(), -1.0);
    assert_eq!(phi.evaluate(&[e(1), e(2), e(4)]).unwrap(), 0.0);

    let psi = g2_star_form();
    assert_eq!(psi.evaluate(&[e(4), e(5), e(6), e(7)]).unwrap(), 1.0);
    assert_eq!(psi.evaluate(&[e(1), e(3), e(4), e(6)]).unwrap(), -1.0);

    let cay = spin7_form();
    let f = |i| basis_vector(8, i);
    assert_eq!(cay.evaluate(&[f(1), f(2), f(3), f(4)]).unwrap(), 1.0);
    assert_eq!(cay.evaluate(&[f(1), f(3), f(6), f(8)]).unwrap(), -1.0);
    assert_eq!(cay.evaluate(&[f(2), f(3), f(5), f(8)]).unwrap(), -1.0);
}

#[test]
fn calibration_ratio_is_invariant_under_in_plane_shear() {
    let phi = g2_form();
    let e = |i| basis_vector(7, i);
    let mut frame = vec![e(1), e(2), e(3)];
    let base = phi.calibration_ratio(&frame).unwrap();
    for i in 0..7 {
        frame[0][i] += 0.75 * frame[1][i] - 0.25 * frame[2][i];
        frame[2][i] += 1.5 * frame[1][i];
    }
    let sheared = phi.calibration_ratio(&frame).unwrap();
    assert!((base - sheared).abs() < 1e-12, "{base} vs {sheared}");
}

#[test]
fn canonical_json_examples() {
    let text = to_canonical_json(&g2_form());
    let expected = r#"{"n":7,"k":3,"terms":[{"indices":[1,2,3],"coeff":"1"},{"indices":[1,4,5],"coeff":"1"},{"indices":[1,6,7],"coeff":"1"},{"indices":[2,4,6],"coeff":"1"},{"indices":[2,5,7],"coeff":"-1"},{"indices":[3,4,7],"coeff":"-1"},{"indices":[3,5,6],"coeff":"-1"}]}"#;
    assert_eq!(text, expected);
    assert_eq!(from_json(expected).unwrap(), g2_form());
}

fn arb_rational() -> impl Strategy<Value = BigRational> {
    (-40i64..=40, 1i64..=12).prop_map(|(p, q)| ratio(p, q))
}

fn arb_form(n: u8, k: u8) -> impl Strategy<Value = AlternatingForm> {
    let indices = prop::collection::vec(prop::sample::subsequence((1..=n).collect::<Vec<u8>>(), k as usize), 0..6);
    let coeffs = prop::collection::vec(arb_rational(), 6);
    (indices, coeffs).prop_map(move |(idx_sets, coeffs)| {
        let mut form = AlternatingForm::zero(n, k).unwrap();
        for (set, c) in idx_sets.iter().zip(coeffs) {
            form.add_term(set, &c).unwrap();
        }
        form
    })
}

fn arb_rational_vector(n: usize) -> impl Strategy<Value = Vec<BigRational>> {
    prop::collection::vec(arb_rational(), n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// The defining identity of the Hodge star for the Euclidean metric and
    /// standard orientation, with the inner product computed independently.
    #[test]
    fn wedge_with_star_recovers_inner_product(
        (n, a, b) in (4u8..=8).prop_flat_map(|n| {
            (1u8..n).prop_flat_map(move |k| (Just(n), arb_form(n, k), arb_form(n, k)))
        })
    ) {
        let lhs = b.wedge(&a.hodge_star()).unwrap();
        let mut rhs = AlternatingForm::zero(n, n).unwrap();
        let indices: Vec<u8> = (1..=n).collect();
        rhs.add_term(&indices, &inner(&a, &b)).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn double_hodge_star_is_signed_identity(
        (n, k, a) in (4u8..=8).prop_flat_map(|n| {
            (1u8..n).prop_flat_map(move |k| (Just(n), Just(k), arb_form(n, k)))
        })
    ) {
        let twice = a.hodge_star().hodge_star();
        let expected = if (k as u32 * (n - k) as u32) % 2 == 0 { a } else { a.neg() };
        prop_assert_eq!(twice, expected);
    }

    #[test]
    fn wedge_is_graded_anticommutative(
        (a, b) in (1u8..=3).prop_flat_map(|k1| {
            (1u8..=3).prop_flat_map(move |k2| (arb_form(7, k1), arb_form(7, k2)))
        })
    ) {
        let ab = a.wedge(&b).unwrap();
        let ba = b.wedge(&a).unwrap();
        let sign_flip = (a.degree() as u32 * b.degree() as u32) % 2 == 1;
        prop_assert_eq!(ab, if sign_flip { ba.neg() } else { ba });
    }

    #[test]
    fn evaluate_is_multilinear_and_exact(
        a in arb_form(7, 3),
        u in arb_rational_vector(7),
        v in arb_rational_vector(7),
        w in arb_rational_vector(7),
        s in arb_rational(),
    ) {
        let scaled: Vec<BigRational> = u.iter().map(|x| x * &s).collect();
        let shifted: Vec<BigRational> = u.iter().zip(&v).map(|(x, y)| x + y).collect();

        let base = a.evaluate(&[u.clone(), v.clone(), w.clone()]).unwrap();
        let scaled_val = a.evaluate(&[scaled, v.clone(), w.clone()]).unwrap();
        prop_assert_eq!(scaled_val, &base * &s);

        let vvw = a.evaluate(&[v.clone(), v.clone(), w.clone()]).unwrap();
        prop_assert!(vvw.is_zero());

        let sum_val = a.evaluate(&[shifted, v.clone(), w.clone()]).unwrap();
        prop_assert_eq!(sum_val, base + vvw);
    }

    #[test]
    fn json_round_trip_arbitrary_forms(
        a in (1u8..=4).prop_flat_map(|k| arb_form(8, k))
    ) {
        let text = to_canonical_json(&a);
        let back = from_json(&text).unwrap();
        prop_assert_eq!(&back, &a);
        prop_assert_eq!(to_canonical_json(&back), text);
    }
}

#[test]
fn g2_forms_relative_normalization() {
    // phi ^ *phi = 7 vol, the coefficient being the number of unit terms.
    let prod = g2_form().wedge(&g2_star_form()).unwrap();
    let idx = MultiIndex::new(&[1, 2, 3, 4, 5, 6, 7]).unwrap();
    assert_eq!(prod.coeff(&idx), ratio(7, 1));
    assert_eq!(prod.num_terms(), 1);
    let vol = volume_form(7);
    assert_eq!(inner(&vol, &prod), ratio(7, 1));
}
