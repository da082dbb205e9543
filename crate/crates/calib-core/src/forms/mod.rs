//! Exact exterior algebra on Euclidean space.
//!
//! An [`AlternatingForm`] is a constant-coefficient alternating k-form on
//! R^n, stored sparsely as a map from strictly increasing multi-indices to
//! exact rational coefficients. All algebraic operations (wedge product,
//! Hodge star, frame evaluation) are exact; floating point enters only when
//! a form is evaluated on an `f64` frame.
//!
//! Indices are one-based throughout: `dx1 ^ dx2 ^ dx3` is written
//! `MultiIndex::new(&[1, 2, 3])`.

use num::rational::BigRational;
use num::traits::{One, Signed, ToPrimitive, Zero};
use num::BigInt;
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

mod comass;
mod constants;
mod json;

pub use comass::{comass_estimate, ComassOptions};
pub use constants::{g2_form, g2_star_form, spin7_form};
pub use json::{from_json, to_canonical_json, FormJsonError};

/// Gram determinants below this threshold are rejected as degenerate.
pub const GRAM_DET_THRESHOLD: f64 = 1e-12;

/// Errors produced by exterior algebra operations.
#[derive(Debug, Error)]
pub enum FormError {
    #[error("multi-index {0:?} is not strictly increasing")]
    NotIncreasing(Vec<u8>),
    #[error("index {index} out of range for R^{n}")]
    IndexOutOfRange { index: u8, n: u8 },
    #[error("degree {degree} exceeds ambient dimension {n}")]
    DegreeTooLarge { degree: u8, n: u8 },
    #[error("ambient dimensions differ: {0} vs {1}")]
    DimensionMismatch(u8, u8),
    #[error("expected {expected} frame vectors of length {n}, got {got}")]
    FrameShape { expected: u8, n: u8, got: String },
    #[error("frame is numerically degenerate: Gram determinant {det:.3e} < {threshold:.0e}")]
    DegenerateFrame { det: f64, threshold: f64 },
}

/// A strictly increasing sequence of one-based coordinate indices.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiIndex(Vec<u8>);

impl MultiIndex {
    /// Builds a multi-index, requiring strictly increasing entries.
    pub fn new(indices: &[u8]) -> Result<Self, FormError> {
        if indices.windows(2).any(|w| w[0] >= w[1]) || indices.first() == Some(&0) {
            return Err(FormError::NotIncreasing(indices.to_vec()));
        }
        Ok(MultiIndex(indices.to_vec()))
    }

    /// Sorts an arbitrary index sequence, returning the sorted multi-index
    /// and the sign of the sorting permutation. Returns `None` when an index
    /// repeats, in which case the corresponding form term vanishes.
    pub fn from_unsorted(indices: &[u8]) -> Option<(Self, i8)> {
        let mut v = indices.to_vec();
        let mut sign = 1i8;
        // Insertion sort with inversion counting; index lists are short.
        for i in 1..v.len() {
            let mut j = i;
            while j > 0 && v[j - 1] > v[j] {
                v.swap(j - 1, j);
                sign = -sign;
                j -= 1;
            }
        }
        if v.windows(2).any(|w| w[0] == w[1]) {
            return None;
        }
        Some((MultiIndex(v), sign))
    }

    pub fn indices(&self) -> &[u8] {
        &self.0
    }

    pub fn degree(&self) -> u8 {
        self.0.len() as u8
    }

    /// The complementary index set in `{1, ..., n}`, in increasing order.
    pub fn complement(&self, n: u8) -> MultiIndex {
        let set: Vec<u8> = (1..=n).filter(|i| !self.0.contains(i)).collect();
        MultiIndex(set)
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "dx[")?;
        for (i, idx) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{idx}")?;
        }
        write!(f, "]")
    }
}

/// Scalars on which a form can be evaluated.
///
/// Implemented for `f64` (approximate) and [`BigRational`] (exact).
pub trait EvalScalar: Clone {
    fn zero() -> Self;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn from_ratio(r: &BigRational) -> Self;
}

impl EvalScalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn from_ratio(r: &BigRational) -> Self {
        r.to_f64().expect("rational out of f64 range")
    }
}

impl EvalScalar for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn from_ratio(r: &BigRational) -> Self {
        r.clone()
    }
}

/// A constant-coefficient alternating k-form on R^n with exact rational
/// coefficients.
///
/// Zero coefficients are never stored, so two forms are equal as maps
/// exactly when they are equal as forms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlternatingForm {
    n: u8,
    k: u8,
    terms: BTreeMap<MultiIndex, BigRational>,
}

impl AlternatingForm {
    /// The zero k-form on R^n.
    pub fn zero(n: u8, k: u8) -> Result<Self, FormError> {
        if k > n {
            return Err(FormError::DegreeTooLarge { degree: k, n });
        }
        Ok(AlternatingForm {
            n,
            k,
            terms: BTreeMap::new(),
        })
    }

    /// Builds a form from `(indices, integer coefficient)` pairs.
    pub fn from_int_terms(n: u8, k: u8, terms: &[(&[u8], i64)]) -> Result<Self, FormError> {
        let mut form = AlternatingForm::zero(n, k)?;
        for (indices, coeff) in terms {
            let ratio = BigRational::from_integer(BigInt::from(*coeff));
            form.add_term(indices, &ratio)?;
        }
        Ok(form)
    }

    /// Adds `coeff * dx[indices]` to the form. The index sequence may be
    /// unsorted; the sorting sign is absorbed into the coefficient.
    pub fn add_term(&mut self, indices: &[u8], coeff: &BigRational) -> Result<(), FormError> {
        if indices.len() != self.k as usize {
            return Err(FormError::DegreeTooLarge {
                degree: indices.len() as u8,
                n: self.k,
            });
        }
        for &i in indices {
            if i == 0 || i > self.n {
                return Err(FormError::IndexOutOfRange { index: i, n: self.n });
            }
        }
        let Some((sorted, sign)) = MultiIndex::from_unsorted(indices) else {
            return Ok(());
        };
        let signed = if sign < 0 { -coeff } else { coeff.clone() };
        let vanished = {
            let entry = self.terms.entry(sorted.clone()).or_insert_with(Zero::zero);
            *entry += signed;
            entry.is_zero()
        };
        if vanished {
            self.terms.remove(&sorted);
        }
        Ok(())
    }

    pub fn ambient_dim(&self) -> u8 {
        self.n
    }

    pub fn degree(&self) -> u8 {
        self.k
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// The coefficient of `dx[indices]`, zero when the term is absent.
    pub fn coeff(&self, index: &MultiIndex) -> BigRational {
        self.terms.get(index).cloned().unwrap_or_else(Zero::zero)
    }

    /// Iterates over the stored terms in increasing multi-index order.
    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &BigRational)> {
        self.terms.iter()
    }

    /// Sum of squared coefficients, the squared Euclidean norm in the
    /// standard monomial basis.
    pub fn norm_sq(&self) -> BigRational {
        self.terms.values().map(|c| c * c).sum()
    }

    /// Exact negation.
    pub fn neg(&self) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(idx, c)| (idx.clone(), -c))
            .collect();
        AlternatingForm {
            n: self.n,
            k: self.k,
            terms,
        }
    }

    /// Exact sum of two forms of equal dimension and degree.
    pub fn sum(&self, other: &Self) -> Result<Self, FormError> {
        if self.n != other.n {
            return Err(FormError::DimensionMismatch(self.n, other.n));
        }
        if self.k != other.k {
            return Err(FormError::DegreeTooLarge {
                degree: other.k,
                n: self.k,
            });
        }
        let mut out = self.clone();
        for (idx, c) in &other.terms {
            let entry = out.terms.entry(idx.clone()).or_insert_with(Zero::zero);
            *entry += c;
        }
        out.terms.retain(|_, c| !c.is_zero());
        Ok(out)
    }

    /// Exact wedge product.
    pub fn wedge(&self, other: &Self) -> Result<Self, FormError> {
        if self.n != other.n {
            return Err(FormError::DimensionMismatch(self.n, other.n));
        }
        let degree = self.k + other.k;
        let mut out = AlternatingForm::zero(self.n, degree)?;
        for (ia, ca) in &self.terms {
            for (ib, cb) in &other.terms {
                let mut merged = Vec::with_capacity(degree as usize);
                merged.extend_from_slice(ia.indices());
                merged.extend_from_slice(ib.indices());
                let Some((sorted, sign)) = MultiIndex::from_unsorted(&merged) else {
                    continue;
                };
                let mut c = ca * cb;
                if sign < 0 {
                    c = -c;
                }
                let entry = out.terms.entry(sorted).or_insert_with(Zero::zero);
                *entry += c;
            }
        }
        out.terms.retain(|_, c| !c.is_zero());
        Ok(out)
    }

    /// Exact Hodge star for the Euclidean metric and the orientation
    /// `dx1 ^ ... ^ dxn`.
    ///
    /// On each term the star sends `dx[I]` to `sign * dx[I^c]` where the
    /// sign is the parity of the permutation `(I, I^c)` of `(1, ..., n)`.
    /// Applying the star twice multiplies a k-form by `(-1)^(k (n - k))`.
    pub fn hodge_star(&self) -> Self {
        let mut out = AlternatingForm {
            n: self.n,
            k: self.n - self.k,
            terms: BTreeMap::new(),
        };
        for (idx, c) in &self.terms {
            let comp = idx.complement(self.n);
            let mut concat = Vec::with_capacity(self.n as usize);
            concat.extend_from_slice(idx.indices());
            concat.extend_from_slice(comp.indices());
            let (_, sign) = MultiIndex::from_unsorted(&concat)
                .expect("index and complement are disjoint");
            let coeff = if sign < 0 { -c } else { c.clone() };
            out.terms.insert(comp, coeff);
        }
        out
    }

    /// Evaluates the form on `k` vectors of length `n`.
    ///
    /// Each term contributes its coefficient times the `k x k` minor of the
    /// frame matrix selected by the term's indices.
    pub fn evaluate<T: EvalScalar>(&self, frame: &[Vec<T>]) -> Result<T, FormError> {
        if frame.len() != self.k as usize || frame.iter().any(|v| v.len() != self.n as usize) {
            return Err(FormError::FrameShape {
                expected: self.k,
                n: self.n,
                got: format!(
                    "{} vectors of lengths {:?}",
                    frame.len(),
                    frame.iter().map(|v| v.len()).collect::<Vec<_>>()
                ),
            });
        }
        let k = self.k as usize;
        let mut total = T::zero();
        let mut minor = vec![T::zero(); k * k];
        for (idx, coeff) in &self.terms {
            for (r, &i) in idx.indices().iter().enumerate() {
                for (c, vector) in frame.iter().enumerate() {
                    minor[r * k + c] = vector[i as usize - 1].clone();
                }
            }
            let d = det_small(&minor, k);
            total = total.add(&d.mul(&T::from_ratio(coeff)));
        }
        Ok(total)
    }

    /// Ratio of the form's value on a frame to the frame's k-volume.
    ///
    /// The frame need not be orthonormal; the k-volume is the square root of
    /// the Gram determinant. Frames with Gram determinant below
    /// [`GRAM_DET_THRESHOLD`] are rejected.
    pub fn calibration_ratio(&self, frame: &[Vec<f64>]) -> Result<f64, FormError> {
        let value = self.evaluate(frame)?;
        let g = gram_det(frame);
        if !(g > GRAM_DET_THRESHOLD) {
            return Err(FormError::DegenerateFrame {
                det: g,
                threshold: GRAM_DET_THRESHOLD,
            });
        }
        Ok(value / g.sqrt())
    }
}

impl fmt::Display for AlternatingForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (idx, c)) in self.terms.iter().enumerate() {
            if i == 0 {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let a = c.abs();
            if !a.is_one() {
                write!(f, "{a}*")?;
            }
            write!(f, "{idx}")?;
        }
        Ok(())
    }
}

/// Determinant of a dense `k x k` matrix stored row-major, by Laplace
/// expansion along the first row. Frame degrees here are at most four, so
/// the exponential cost is irrelevant.
fn det_small<T: EvalScalar>(m: &[T], k: usize) -> T {
    match k {
        0 => panic!("empty determinant"),
        1 => m[0].clone(),
        2 => m[0].mul(&m[3]).sub(&m[1].mul(&m[2])),
        _ => {
            let mut total = T::zero();
            let mut sub = vec![T::zero(); (k - 1) * (k - 1)];
            for col in 0..k {
                let mut dst = 0;
                for r in 1..k {
                    for c in 0..k {
                        if c != col {
                            sub[dst] = m[r * k + c].clone();
                            dst += 1;
                        }
                    }
                }
                let cof = m[col].mul(&det_small(&sub, k - 1));
                total = if col % 2 == 0 {
                    total.add(&cof)
                } else {
                    total.sub(&cof)
                };
            }
            total
        }
    }
}

/// Gram determinant of a set of frame vectors.
pub fn gram_det(frame: &[Vec<f64>]) -> f64 {
    let k = frame.len();
    let mut gram = vec![0.0; k * k];
    for i in 0..k {
        for j in 0..k {
            gram[i * k + j] = frame[i].iter().zip(&frame[j]).map(|(a, b)| a * b).sum();
        }
    }
    det_small(&gram, k)
}
