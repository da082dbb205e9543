//! Exact symbolic layer: sparse rational polynomials, complex pairs,
//! group-orbit contraction into ODE right-hand sides, and a canonical text
//! grammar for emitting and parsing derived systems.

use thiserror::Error;

mod action;
mod cpoly;
mod poly;
mod text;
mod vars;

pub use action::{compare_fields, derive_rhs, ActionSpec, ChiTerm, DiffReport, PolyVectorField};
pub use cpoly::CPoly;
pub use poly::{CompiledPoly, Monomial, Polynomial};
pub use text::{parse_polynomial, polynomial_to_text, vector_field_to_text};
pub use vars::VarTable;

/// Errors from the symbolic layer.
#[derive(Debug, Error)]
pub enum SymbolicError {
    #[error("unknown variable {0:?}")]
    UnknownVariable(String),
    #[error("parse error at byte {pos}: {message}")]
    Parse { pos: usize, message: String },
    #[error("chi term references generator {index} but only {count} are defined")]
    ChiGeneratorRange { index: usize, count: usize },
    #[error("chi term lists {got} generators, a degree {degree} form contracts {expected}")]
    ChiArity { got: usize, degree: u8, expected: usize },
    #[error("generator has {got} components, ambient dimension is {expected}")]
    GeneratorShape { got: usize, expected: usize },
    #[error("variable table supplies {got} coordinates, form needs {expected}")]
    CoordCount { got: usize, expected: usize },
    #[error("vector fields have {0} and {1} components")]
    ComponentCount(usize, usize),
}
