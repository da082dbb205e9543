//! Catalog of symmetry-reduced evolution systems.
//!
//! Each system couples a calibration form with a symmetry group whose
//! orbits sweep the calibrated submanifold. The catalog carries, per
//! system: the symbolic contraction setup, an independently transcribed
//! right-hand side, exact conserved quantities, and fast float evaluators
//! for integration. Constructing a [`SystemSpec`] verifies once per
//! process that the mechanical contraction reproduces the transcribed
//! right-hand side exactly.

use crate::symbolic::Polynomial;
use thiserror::Error;

mod catalog;
mod levelset;
mod resonant;
mod ruled;
mod special;

pub use catalog::{conservation_reports, ConservationReport, PhaseGauge};
pub use levelset::{
    orbit_invariants, su2_from_exponential, su2_orbit_point, torus_level_point,
    translation_family_point, CayleyOrbitInvariants,
};
pub use resonant::{level_bound, planar_cycle, resonant_level, transverse_rotation, PlanarCycle};
pub use ruled::{cone_point, ruled_point, torus_cone_curve, HarmonicPair, TorusCurve};
pub use special::{
    link_invariant_extremum, link_invariant_maximum_numeric, special_torus_period,
    special_torus_solution, special_torus_velocity, ExtremumEstimate, ExtremumOptions,
};

/// Errors from system construction and evaluation.
#[derive(Debug, Error)]
pub enum SystemError {
    #[error("winding numbers must not all be zero")]
    ZeroWinding,
    #[error("winding numbers {0:?} must sum to zero")]
    WindingSum(Vec<i64>),
    #[error("winding numbers {0:?} must be coprime")]
    WindingNotCoprime(Vec<i64>),
    #[error("winding numbers {0:?} must be in nondecreasing order")]
    WindingOrder(Vec<i64>),
    #[error("mixing coefficients must not all be zero")]
    ZeroMixing,
    #[error("mixing coefficients must be finite")]
    NonFiniteMixing,
    #[error("unknown system name {0:?}")]
    UnknownName(String),
    #[error("state has {got} coordinates, system expects {expected}")]
    StateDim { got: usize, expected: usize },
    #[error(
        "mechanical derivation disagrees with the transcribed right-hand side \
         for {system}: {detail}"
    )]
    DerivationMismatch { system: &'static str, detail: String },
    #[error("{0} does not split into an axis pair and a transverse pair")]
    NeedsEqualPair(&'static str),
    #[error("planar level {0} is outside the admissible open range")]
    BadLevel(f64),
    #[error("no admissible level has return ratio {p}/{q}")]
    NoResonance { p: u32, q: u32 },
}

/// The five cataloged systems.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SystemKind {
    /// Associative cones swept by dilations and a circle with integer
    /// winding numbers on the three complex coordinates of R^7.
    AssocU1Cone,
    /// Associative 3-folds swept by a two-dimensional subgroup of the
    /// translation-and-two-torus group on R^7.
    AssocRU1Sq,
    /// Coassociative cones swept by dilations and the two-torus on R^7.
    CoassocU1SqCone,
    /// Cayley 4-folds swept by the diagonal special unitary action on
    /// two pairs of complex coordinates of R^8.
    CayleySu2,
    /// Cayley cones swept by dilations and a two-torus with integer
    /// winding numbers on the four complex coordinates of R^8.
    CayleyU1SqCone,
}

impl SystemKind {
    pub fn all() -> [SystemKind; 5] {
        [
            SystemKind::AssocU1Cone,
            SystemKind::AssocRU1Sq,
            SystemKind::CoassocU1SqCone,
            SystemKind::CayleySu2,
            SystemKind::CayleyU1SqCone,
        ]
    }

    pub fn name(&self) -> &'static str {
        match self {
            SystemKind::AssocU1Cone => "assoc-u1-cone",
            SystemKind::AssocRU1Sq => "assoc-r-u1sq",
            SystemKind::CoassocU1SqCone => "coassoc-u1sq-cone",
            SystemKind::CayleySu2 => "cayley-su2",
            SystemKind::CayleyU1SqCone => "cayley-u1sq-cone",
        }
    }

    pub fn from_name(name: &str) -> Result<Self, SystemError> {
        SystemKind::all()
            .into_iter()
            .find(|k| k.name() == name)
            .ok_or_else(|| SystemError::UnknownName(name.to_string()))
    }

    /// Ambient coordinate count: seven or eight.
    pub fn ambient_dim(&self) -> usize {
        match self {
            SystemKind::AssocU1Cone | SystemKind::AssocRU1Sq | SystemKind::CoassocU1SqCone => 7,
            SystemKind::CayleySu2 | SystemKind::CayleyU1SqCone => 8,
        }
    }
}

/// A validated system instance: a kind plus concrete parameter values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SystemSpec {
    AssocU1Cone { alpha: [i64; 3] },
    AssocRU1Sq { lambda: f64, mu: f64, nu: f64 },
    CoassocU1SqCone,
    CayleySu2,
    CayleyU1SqCone { a: [i64; 4] },
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn validate_windings(w: &[i64], require_sorted: bool) -> Result<(), SystemError> {
    if w.iter().all(|&x| x == 0) {
        return Err(SystemError::ZeroWinding);
    }
    if w.iter().sum::<i64>() != 0 {
        return Err(SystemError::WindingSum(w.to_vec()));
    }
    if w.iter().copied().fold(0, gcd) != 1 {
        return Err(SystemError::WindingNotCoprime(w.to_vec()));
    }
    if require_sorted && w.windows(2).any(|p| p[0] > p[1]) {
        return Err(SystemError::WindingOrder(w.to_vec()));
    }
    Ok(())
}

impl SystemSpec {
    /// Associative cone system with circle winding numbers `alpha`:
    /// coprime integers summing to zero.
    pub fn assoc_u1_cone(alpha: [i64; 3]) -> Result<Self, SystemError> {
        validate_windings(&alpha, false)?;
        let spec = SystemSpec::AssocU1Cone { alpha };
        spec.confirm_derivation()?;
        Ok(spec)
    }

    /// Associative system for the subgroup `lambda c + mu phi1 + nu phi2 = 0`
    /// of translations and torus rotations; coefficients must be finite and
    /// not all zero.
    pub fn assoc_r_u1sq(lambda: f64, mu: f64, nu: f64) -> Result<Self, SystemError> {
        if !(lambda.is_finite() && mu.is_finite() && nu.is_finite()) {
            return Err(SystemError::NonFiniteMixing);
        }
        if lambda == 0.0 && mu == 0.0 && nu == 0.0 {
            return Err(SystemError::ZeroMixing);
        }
        let spec = SystemSpec::AssocRU1Sq { lambda, mu, nu };
        spec.confirm_derivation()?;
        Ok(spec)
    }

    pub fn coassoc_u1sq_cone() -> Result<Self, SystemError> {
        let spec = SystemSpec::CoassocU1SqCone;
        spec.confirm_derivation()?;
        Ok(spec)
    }

    pub fn cayley_su2() -> Result<Self, SystemError> {
        let spec = SystemSpec::CayleySu2;
        spec.confirm_derivation()?;
        Ok(spec)
    }

    /// Cayley cone system with torus winding numbers `a`: coprime integers
    /// in nondecreasing order summing to zero.
    pub fn cayley_u1sq_cone(a: [i64; 4]) -> Result<Self, SystemError> {
        validate_windings(&a, true)?;
        let spec = SystemSpec::CayleyU1SqCone { a };
        spec.confirm_derivation()?;
        Ok(spec)
    }

    pub fn kind(&self) -> SystemKind {
        match self {
            SystemSpec::AssocU1Cone { .. } => SystemKind::AssocU1Cone,
            SystemSpec::AssocRU1Sq { .. } => SystemKind::AssocRU1Sq,
            SystemSpec::CoassocU1SqCone => SystemKind::CoassocU1SqCone,
            SystemSpec::CayleySu2 => SystemKind::CayleySu2,
            SystemSpec::CayleyU1SqCone { .. } => SystemKind::CayleyU1SqCone,
        }
    }

    pub fn name(&self) -> &'static str {
        self.kind().name()
    }

    pub fn ambient_dim(&self) -> usize {
        self.kind().ambient_dim()
    }

    /// Concrete parameter values in variable-table order.
    pub fn param_values(&self) -> Vec<f64> {
        match self {
            SystemSpec::AssocU1Cone { alpha } => alpha.iter().map(|&a| a as f64).collect(),
            SystemSpec::AssocRU1Sq { lambda, mu, nu } => vec![*lambda, *mu, *nu],
            SystemSpec::CoassocU1SqCone | SystemSpec::CayleySu2 => Vec::new(),
            SystemSpec::CayleyU1SqCone { a } => a.iter().map(|&a| a as f64).collect(),
        }
    }
}

/// How a monitored quantity behaves along the flow.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QuantityKind {
    /// Exactly constant along every solution.
    Conserved,
    /// Constant along solutions confined to the unit sphere; its derivative
    /// is a polynomial multiple of the sphere relation.
    ConservedOnUnitSphere,
    /// Scales by the stated factor: `dq/dt = factor * q`.
    Multiplier { factor: Polynomial },
}

/// A named quantity with a proven behavior along the flow.
///
/// `param_substitutions` lists the parameter eliminations (index, value
/// polynomial) under which the behavior is an exact polynomial identity;
/// concrete parameter values always satisfy them by construction.
#[derive(Debug, Clone)]
pub struct ConservedQuantity {
    pub name: &'static str,
    pub poly: Polynomial,
    pub kind: QuantityKind,
    pub param_substitutions: Vec<(usize, Polynomial)>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn winding_validation() {
        assert!(matches!(
            SystemSpec::assoc_u1_cone([0, 0, 0]),
            Err(SystemError::ZeroWinding)
        ));
        assert!(matches!(
            SystemSpec::assoc_u1_cone([1, 1, 1]),
            Err(SystemError::WindingSum(_))
        ));
        assert!(matches!(
            SystemSpec::assoc_u1_cone([2, -4, 2]),
            Err(SystemError::WindingNotCoprime(_))
        ));
        assert!(SystemSpec::assoc_u1_cone([2, -1, -1]).is_ok());
        assert!(SystemSpec::assoc_u1_cone([0, 1, -1]).is_ok());
    }

    #[test]
    fn quad_winding_validation() {
        assert!(matches!(
            SystemSpec::cayley_u1sq_cone([1, 1, 1, -3]),
            Err(SystemError::WindingOrder(_))
        ));
        assert!(SystemSpec::cayley_u1sq_cone([-3, 1, 1, 1]).is_ok());
        assert!(SystemSpec::cayley_u1sq_cone([-2, -1, 1, 2]).is_ok());
    }

    #[test]
    fn mixing_validation() {
        assert!(matches!(
            SystemSpec::assoc_r_u1sq(0.0, 0.0, 0.0),
            Err(SystemError::ZeroMixing)
        ));
        assert!(matches!(
            SystemSpec::assoc_r_u1sq(f64::NAN, 0.0, 1.0),
            Err(SystemError::NonFiniteMixing)
        ));
        assert!(SystemSpec::assoc_r_u1sq(1.0, 0.5, -0.25).is_ok());
    }

    #[test]
    fn names_round_trip() {
        for kind in SystemKind::all() {
            assert_eq!(SystemKind::from_name(kind.name()).unwrap(), kind);
        }
        assert!(SystemKind::from_name("nope").is_err());
    }
}
