//! Ordered variable tables shared by polynomials, printers and parsers.

/// An ordered list of variable names: system parameters first, then the
/// ambient coordinates `x1, ..., xn`.
///
/// Polynomials refer to variables by index into this table, so a table
/// fixes the meaning of every polynomial built against it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarTable {
    names: Vec<String>,
    num_params: usize,
}

impl VarTable {
    /// Builds a table with the given parameter names followed by `coords`
    /// coordinates named `x1` through `x{coords}`.
    pub fn new(params: &[&str], coords: u8) -> Self {
        let mut names: Vec<String> = params.iter().map(|s| s.to_string()).collect();
        for j in 1..=coords {
            names.push(format!("x{j}"));
        }
        VarTable {
            names,
            num_params: params.len(),
        }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn num_params(&self) -> usize {
        self.num_params
    }

    pub fn num_coords(&self) -> usize {
        self.names.len() - self.num_params
    }

    pub fn name(&self, index: usize) -> &str {
        &self.names[index]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Variable index of the one-based coordinate `xj`.
    pub fn coord(&self, j: u8) -> usize {
        debug_assert!(j >= 1 && (j as usize) <= self.num_coords());
        self.num_params + j as usize - 1
    }
}
