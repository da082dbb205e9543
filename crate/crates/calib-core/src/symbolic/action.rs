//! Contraction of a calibration form against group-orbit multivectors.
//!
//! A symmetry-reduced evolution equation arises by feeding the infinitesimal
//! generators of a group orbit into the leading slots of a calibration form
//! and reading off the remaining covector, raised by the Euclidean metric.
//! For a k-form `T` and a multivector `chi = sum c * (g_a ^ g_b [^ g_c])`
//! the velocity component in coordinate `d` is
//!
//! ```text
//! y_d = sum over chi terms of  c * g_a^p g_b^q [g_c^r] T_{p q [r] d},
//! ```
//!
//! where `T_{...}` is the fully antisymmetric coefficient tensor of the
//! form. Generators enter in the listed order, the free index sits last,
//! and no combinatorial prefactor is applied; the convention is pinned by
//! the derivation equality tests in the systems catalog.

use super::{Polynomial, SymbolicError, VarTable};
use crate::forms::AlternatingForm;

/// A polynomial vector field on the ambient coordinates. Component `j`
/// is the time derivative of coordinate `x{j+1}`; the polynomials may also
/// involve parameter variables, which precede coordinates in the table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyVectorField {
    components: Vec<Polynomial>,
}

impl PolyVectorField {
    pub fn new(components: Vec<Polynomial>) -> Self {
        PolyVectorField { components }
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[Polynomial] {
        &self.components
    }

    pub fn component(&self, j: usize) -> &Polynomial {
        &self.components[j]
    }

    /// Evaluates all components at a full variable-value slice
    /// (parameters followed by coordinates).
    pub fn eval_f64(&self, values: &[f64], out: &mut [f64]) {
        for (o, c) in out.iter_mut().zip(&self.components) {
            *o = c.eval_f64(values);
        }
    }

    /// Derivative of a scalar polynomial along the field: the sum over
    /// coordinates of `component_j * dq/dx_j`. `vars` locates the
    /// coordinate block inside the variable table.
    pub fn derivative_along(&self, q: &Polynomial, vars: &VarTable) -> Polynomial {
        let mut out = Polynomial::zero();
        for j in 0..self.components.len() {
            let var = vars.coord(j as u8 + 1);
            let dq = q.partial(var);
            if dq.is_zero() {
                continue;
            }
            out = &out + &(&self.components[j] * &dq);
        }
        out
    }

    /// Applies a substitution to every component.
    pub fn substitute(&self, var: usize, replacement: &Polynomial) -> Self {
        PolyVectorField {
            components: self
                .components
                .iter()
                .map(|c| c.substitute(var, replacement))
                .collect(),
        }
    }
}

/// One term of an orbit multivector: a coefficient polynomial in the
/// parameters and an ordered tuple of generator indices.
#[derive(Debug, Clone)]
pub struct ChiTerm {
    pub coeff: Polynomial,
    pub generators: Vec<usize>,
}

impl ChiTerm {
    pub fn new(coeff: Polynomial, generators: Vec<usize>) -> Self {
        ChiTerm { coeff, generators }
    }
}

/// A symmetry setup ready for contraction: a calibration form, the
/// infinitesimal generators of the group action as polynomial vector
/// fields, and the orbit multivector expressed over those generators.
#[derive(Debug, Clone)]
pub struct ActionSpec {
    pub name: String,
    pub vars: VarTable,
    pub form: AlternatingForm,
    pub generators: Vec<Vec<Polynomial>>,
    pub chi: Vec<ChiTerm>,
}

impl ActionSpec {
    fn validate(&self) -> Result<(), SymbolicError> {
        let n = self.form.ambient_dim() as usize;
        if self.vars.num_coords() != n {
            return Err(SymbolicError::CoordCount {
                got: self.vars.num_coords(),
                expected: n,
            });
        }
        for g in &self.generators {
            if g.len() != n {
                return Err(SymbolicError::GeneratorShape {
                    got: g.len(),
                    expected: n,
                });
            }
        }
        let slots = self.form.degree() as usize - 1;
        for term in &self.chi {
            if term.generators.len() != slots {
                return Err(SymbolicError::ChiArity {
                    got: term.generators.len(),
                    degree: self.form.degree(),
                    expected: slots,
                });
            }
            for &g in &term.generators {
                if g >= self.generators.len() {
                    return Err(SymbolicError::ChiGeneratorRange {
                        index: g,
                        count: self.generators.len(),
                    });
                }
            }
        }
        Ok(())
    }
}

/// Contracts the orbit multivector into the calibration form, producing
/// the reduced evolution field exactly.
pub fn derive_rhs(spec: &ActionSpec) -> Result<PolyVectorField, SymbolicError> {
    spec.validate()?;
    let n = spec.form.ambient_dim() as usize;
    let k = spec.form.degree() as usize;
    let mut components = vec![Polynomial::zero(); n];

    for term in &spec.chi {
        for (idx, coeff) in spec.form.terms() {
            // Every ordering of the term's index set contributes one entry
            // of the antisymmetric coefficient tensor.
            for (perm, sign) in permutations_with_signs(idx.indices()) {
                let free = perm[k - 1] as usize - 1;
                let mut contribution = term.coeff.scale(coeff);
                if sign < 0 {
                    contribution = -&contribution;
                }
                for (slot, &gen_index) in term.generators.iter().enumerate() {
                    let coord = perm[slot] as usize - 1;
                    contribution = &contribution * &spec.generators[gen_index][coord];
                    if contribution.is_zero() {
                        break;
                    }
                }
                if !contribution.is_zero() {
                    components[free] = &components[free] + &contribution;
                }
            }
        }
    }
    Ok(PolyVectorField::new(components))
}

/// All permutations of a short index list together with their signs.
fn permutations_with_signs(indices: &[u8]) -> Vec<(Vec<u8>, i8)> {
    let mut out = Vec::new();
    let mut current = indices.to_vec();
    build_permutations(&mut current, 0, 1, &mut out);
    out
}

fn build_permutations(current: &mut Vec<u8>, start: usize, sign: i8, out: &mut Vec<(Vec<u8>, i8)>) {
    if start == current.len() {
        out.push((current.clone(), sign));
        return;
    }
    for i in start..current.len() {
        let flip = if i == start { 1 } else { -1 };
        current.swap(start, i);
        build_permutations(current, start + 1, sign * flip, out);
        current.swap(start, i);
    }
}

/// Componentwise difference between a derived field and a reference field.
#[derive(Debug, Clone)]
pub struct DiffReport {
    diffs: Vec<Polynomial>,
}

impl DiffReport {
    pub fn is_match(&self) -> bool {
        self.diffs.iter().all(Polynomial::is_zero)
    }

    /// Indices of coordinates whose components disagree.
    pub fn mismatched_components(&self) -> Vec<usize> {
        self.diffs
            .iter()
            .enumerate()
            .filter(|(_, d)| !d.is_zero())
            .map(|(j, _)| j)
            .collect()
    }

    pub fn diffs(&self) -> &[Polynomial] {
        &self.diffs
    }

    /// Human-readable summary naming each mismatched component.
    pub fn describe(&self, vars: &VarTable) -> String {
        if self.is_match() {
            return "all components match".to_string();
        }
        let mut lines = Vec::new();
        for (j, d) in self.diffs.iter().enumerate() {
            if !d.is_zero() {
                lines.push(format!(
                    "component dx{}/dt differs by {}",
                    j + 1,
                    super::polynomial_to_text(d, vars)
                ));
            }
        }
        lines.join("\n")
    }
}

/// Compares two vector fields exactly.
pub fn compare_fields(
    derived: &PolyVectorField,
    expected: &PolyVectorField,
) -> Result<DiffReport, SymbolicError> {
    if derived.dim() != expected.dim() {
        return Err(SymbolicError::ComponentCount(derived.dim(), expected.dim()));
    }
    let diffs = derived
        .components()
        .iter()
        .zip(expected.components())
        .map(|(a, b)| a - b)
        .collect();
    Ok(DiffReport { diffs })
}
