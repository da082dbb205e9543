//! JSON encoding of forms with exact rational coefficients.
//!
//! Coefficients travel as `"p"` or `"p/q"` strings in lowest terms, so a
//! serialize-deserialize round trip reproduces the form bit for bit. Terms
//! are emitted in increasing multi-index order, which makes the encoding
//! canonical: equal forms produce identical JSON text.

use super::{AlternatingForm, FormError};
use num::rational::BigRational;
use serde::de::Error as DeError;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FormJsonError {
    #[error("malformed form JSON: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Serialize, Deserialize)]
struct FormRepr {
    n: u8,
    k: u8,
    terms: Vec<TermRepr>,
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    indices: Vec<u8>,
    coeff: String,
}

impl Serialize for AlternatingForm {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let repr = FormRepr {
            n: self.ambient_dim(),
            k: self.degree(),
            terms: self
                .terms()
                .map(|(idx, coeff)| TermRepr {
                    indices: idx.indices().to_vec(),
                    coeff: coeff.to_string(),
                })
                .collect(),
        };
        repr.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for AlternatingForm {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = FormRepr::deserialize(deserializer)?;
        let mut form = AlternatingForm::zero(repr.n, repr.k).map_err(to_de_error::<D>)?;
        for term in &repr.terms {
            let coeff = BigRational::from_str(&term.coeff).map_err(|_| {
                D::Error::custom(format!(
                    "coefficient {:?} is not a rational p/q",
                    term.coeff
                ))
            })?;
            form.add_term(&term.indices, &coeff)
                .map_err(to_de_error::<D>)?;
        }
        Ok(form)
    }
}

fn to_de_error<'de, D: Deserializer<'de>>(err: FormError) -> D::Error {
    D::Error::custom(err.to_string())
}

/// Canonical JSON text for a form.
pub fn to_canonical_json(form: &AlternatingForm) -> String {
    serde_json::to_string(form).expect("form serialization is infallible")
}

/// Parses a form from JSON text.
pub fn from_json(text: &str) -> Result<AlternatingForm, FormJsonError> {
    Ok(serde_json::from_str(text)?)
}
