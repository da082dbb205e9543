//! Sparse multivariate polynomials with exact rational coefficients.

use num::rational::BigRational;
use num::traits::{ToPrimitive, Zero};
use num::BigInt;
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

/// A monomial stored as a sorted list of `(variable index, exponent)` pairs
/// with all exponents positive. The empty list is the unit monomial.
///
/// Ordering is graded lexicographic: lower total degree first, ties broken
/// by comparing exponents variable by variable, earlier variables weighing
/// more. Iterating a term map in reverse therefore yields the conventional
/// leading-term-first order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial {
    factors: Vec<(u16, u16)>,
}

impl Monomial {
    pub fn unit() -> Self {
        Monomial {
            factors: Vec::new(),
        }
    }

    pub fn var(index: usize) -> Self {
        Monomial {
            factors: vec![(index as u16, 1)],
        }
    }

    pub fn total_degree(&self) -> u32 {
        self.factors.iter().map(|&(_, e)| e as u32).sum()
    }

    pub fn exponent_of(&self, var: usize) -> u32 {
        self.factors
            .iter()
            .find(|&&(v, _)| v as usize == var)
            .map_or(0, |&(_, e)| e as u32)
    }

    pub fn factors(&self) -> &[(u16, u16)] {
        &self.factors
    }

    pub fn product(&self, other: &Self) -> Self {
        let mut factors = Vec::with_capacity(self.factors.len() + other.factors.len());
        let (mut i, mut j) = (0, 0);
        while i < self.factors.len() && j < other.factors.len() {
            let (va, ea) = self.factors[i];
            let (vb, eb) = other.factors[j];
            match va.cmp(&vb) {
                Ordering::Less => {
                    factors.push((va, ea));
                    i += 1;
                }
                Ordering::Greater => {
                    factors.push((vb, eb));
                    j += 1;
                }
                Ordering::Equal => {
                    factors.push((va, ea + eb));
                    i += 1;
                    j += 1;
                }
            }
        }
        factors.extend_from_slice(&self.factors[i..]);
        factors.extend_from_slice(&other.factors[j..]);
        Monomial { factors }
    }

    /// The monomial with the given variable removed entirely.
    fn without_var(&self, var: usize) -> Self {
        Monomial {
            factors: self
                .factors
                .iter()
                .copied()
                .filter(|&(v, _)| v as usize != var)
                .collect(),
        }
    }

    /// The monomial with the given variable's exponent replaced.
    fn with_exponent(&self, var: usize, exp: u32) -> Self {
        let mut m = self.without_var(var);
        if exp > 0 {
            let pos = m
                .factors
                .iter()
                .position(|&(v, _)| v as usize > var)
                .unwrap_or(m.factors.len());
            m.factors.insert(pos, (var as u16, exp as u16));
        }
        m
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.total_degree().cmp(&other.total_degree()) {
            Ordering::Equal => {}
            ord => return ord,
        }
        // Equal degree: the monomial with the larger exponent on the
        // earliest differing variable is the larger one.
        let (mut i, mut j) = (0, 0);
        loop {
            match (self.factors.get(i), other.factors.get(j)) {
                (None, None) => return Ordering::Equal,
                (Some(_), None) => return Ordering::Greater,
                (None, Some(_)) => return Ordering::Less,
                (Some(&(va, ea)), Some(&(vb, eb))) => match va.cmp(&vb) {
                    Ordering::Less => return Ordering::Greater,
                    Ordering::Greater => return Ordering::Less,
                    Ordering::Equal => match ea.cmp(&eb) {
                        Ordering::Equal => {
                            i += 1;
                            j += 1;
                        }
                        ord => return ord,
                    },
                },
            }
        }
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A sparse polynomial in the variables of some [`super::VarTable`], with
/// exact rational coefficients. Zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Polynomial {
    terms: BTreeMap<Monomial, BigRational>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Polynomial::default()
    }

    pub fn constant(c: BigRational) -> Self {
        let mut p = Polynomial::zero();
        p.accumulate(Monomial::unit(), c);
        p
    }

    pub fn from_int(c: i64) -> Self {
        Polynomial::constant(BigRational::from_integer(BigInt::from(c)))
    }

    pub fn var(index: usize) -> Self {
        let mut p = Polynomial::zero();
        p.accumulate(Monomial::var(index), BigRational::from_integer(BigInt::from(1)));
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(Monomial::total_degree)
            .max()
            .unwrap_or(0)
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> BigRational {
        self.terms.get(m).cloned().unwrap_or_else(Zero::zero)
    }

    /// Largest variable index appearing in the polynomial.
    pub fn max_var(&self) -> Option<usize> {
        self.terms
            .keys()
            .flat_map(|m| m.factors.iter().map(|&(v, _)| v as usize))
            .max()
    }

    fn accumulate(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let vanished = {
            let entry = self.terms.entry(m.clone()).or_insert_with(Zero::zero);
            *entry += c;
            entry.is_zero()
        };
        if vanished {
            self.terms.remove(&m);
        }
    }

    pub fn add_term(&mut self, m: Monomial, c: BigRational) {
        self.accumulate(m, c);
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Polynomial::zero();
        }
        let terms = self
            .terms
            .iter()
            .map(|(m, a)| (m.clone(), a * c))
            .collect();
        Polynomial { terms }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut out = Polynomial::from_int(1);
        for _ in 0..e {
            out = &out * self;
        }
        out
    }

    /// Partial derivative with respect to a variable.
    pub fn partial(&self, var: usize) -> Self {
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            let e = m.exponent_of(var);
            if e == 0 {
                continue;
            }
            let lowered = m.with_exponent(var, e - 1);
            out.accumulate(lowered, c * BigRational::from_integer(BigInt::from(e)));
        }
        out
    }

    /// Substitutes a polynomial for a variable.
    pub fn substitute(&self, var: usize, replacement: &Polynomial) -> Self {
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            let e = m.exponent_of(var);
            if e == 0 {
                out.accumulate(m.clone(), c.clone());
                continue;
            }
            let rest = m.without_var(var);
            let mut rest_poly = Polynomial::zero();
            rest_poly.accumulate(rest, c.clone());
            out = &out + &(&rest_poly * &replacement.pow(e));
        }
        out
    }

    /// Reduces even powers of a variable: each `x^(2m + r)` with `r` zero or
    /// one becomes `square^m * x^r`. Used to normalize modulo a relation
    /// `x^2 = square` that holds on a constraint surface.
    pub fn reduce_even_powers(&self, var: usize, square: &Polynomial) -> Self {
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            let e = m.exponent_of(var);
            if e < 2 {
                out.accumulate(m.clone(), c.clone());
                continue;
            }
            let rest = m.with_exponent(var, e % 2);
            let mut rest_poly = Polynomial::zero();
            rest_poly.accumulate(rest, c.clone());
            out = &out + &(&rest_poly * &square.pow(e / 2));
        }
        out
    }

    /// Evaluates at a point given as a full variable-value slice.
    pub fn eval_f64(&self, values: &[f64]) -> f64 {
        let mut total = 0.0;
        for (m, c) in &self.terms {
            let mut prod = c.to_f64().expect("coefficient out of f64 range");
            for &(v, e) in &m.factors {
                prod *= values[v as usize].powi(e as i32);
            }
            total += prod;
        }
        total
    }

    /// Flattens the polynomial into a float-coefficient evaluator for use
    /// in integration loops.
    pub fn compile(&self) -> CompiledPoly {
        CompiledPoly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| {
                    (
                        c.to_f64().expect("coefficient out of f64 range"),
                        m.factors.clone(),
                    )
                })
                .collect(),
        }
    }
}

/// A polynomial flattened to float coefficients.
#[derive(Debug, Clone)]
pub struct CompiledPoly {
    terms: Vec<(f64, Vec<(u16, u16)>)>,
}

impl CompiledPoly {
    pub fn eval(&self, values: &[f64]) -> f64 {
        let mut total = 0.0;
        for (c, factors) in &self.terms {
            let mut prod = *c;
            for &(v, e) in factors {
                prod *= values[v as usize].powi(e as i32);
            }
            total += prod;
        }
        total
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.accumulate(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.accumulate(m.clone(), -c);
        }
        out
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        let terms = self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect();
        Polynomial { terms }
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.accumulate(ma.product(mb), ca * cb);
            }
        }
        out
    }
}
