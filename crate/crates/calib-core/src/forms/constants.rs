//! The standard calibration forms on R^7 and R^8.
//!
//! Coordinates follow the complex identifications used throughout the crate:
//! on R^7, `(x1, z1, z2, z3)` with `z_j = x_{2j} + i x_{2j+1}`; on R^8,
//! `z_j = x_{2j-1} + i x_{2j}`.

use super::AlternatingForm;

/// The three-form on R^7 whose calibrated planes are the associative ones:
///
/// ```text
/// dx123 + dx145 + dx167 + dx246 - dx257 - dx347 - dx356
/// ```
pub fn g2_form() -> AlternatingForm {
    AlternatingForm::from_int_terms(
        7,
        3,
        &[
            (&[1, 2, 3], 1),
            (&[1, 4, 5], 1),
            (&[1, 6, 7], 1),
            (&[2, 4, 6], 1),
            (&[2, 5, 7], -1),
            (&[3, 4, 7], -1),
            (&[3, 5, 6], -1),
        ],
    )
    .expect("constant form is well formed")
}

/// The four-form on R^7 whose calibrated planes are the coassociative ones,
/// the Hodge dual of [`g2_form`]:
///
/// ```text
/// dx4567 + dx2367 + dx2345 + dx1357 - dx1346 - dx1256 - dx1247
/// ```
pub fn g2_star_form() -> AlternatingForm {
    AlternatingForm::from_int_terms(
        7,
        4,
        &[
            (&[4, 5, 6, 7], 1),
            (&[2, 3, 6, 7], 1),
            (&[2, 3, 4, 5], 1),
            (&[1, 3, 5, 7], 1),
            (&[1, 3, 4, 6], -1),
            (&[1, 2, 5, 6], -1),
            (&[1, 2, 4, 7], -1),
        ],
    )
    .expect("constant form is well formed")
}

/// The self-dual four-form on R^8 whose calibrated planes are the Cayley
/// ones:
///
/// ```text
/// dx1234 + dx1256 + dx1278 + dx1357 - dx1368 - dx1458 - dx1467
/// + dx5678 + dx3478 + dx3456 + dx2468 - dx2457 - dx2367 - dx2358
/// ```
pub fn spin7_form() -> AlternatingForm {
    AlternatingForm::from_int_terms(
        8,
        4,
        &[
            (&[1, 2, 3, 4], 1),
            (&[1, 2, 5, 6], 1),
            (&[1, 2, 7, 8], 1),
            (&[1, 3, 5, 7], 1),
            (&[1, 3, 6, 8], -1),
            (&[1, 4, 5, 8], -1),
            (&[1, 4, 6, 7], -1),
            (&[5, 6, 7, 8], 1),
            (&[3, 4, 7, 8], 1),
            (&[3, 4, 5, 6], 1),
            (&[2, 4, 6, 8], 1),
            (&[2, 4, 5, 7], -1),
            (&[2, 3, 6, 7], -1),
            (&[2, 3, 5, 8], -1),
        ],
    )
    .expect("constant form is well formed")
}
