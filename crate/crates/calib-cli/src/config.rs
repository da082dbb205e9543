//! Run configuration: one JSON file per run, deserialized strictly so that
//! typos fail loudly, plus the conversions into library types.

use std::fs;
use std::path::Path;
use std::sync::Arc;

use calib_core::systems::{torus_cone_curve, HarmonicPair, TorusCurve};
use calib_core::{IntegratorConfig, SystemSpec};
use num::complex::Complex64;
use serde::Deserialize;

use crate::Failure;

/// Parameter block; which fields are required depends on the system.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    pub windings: Option<Vec<i64>>,
    pub lambda: Option<f64>,
    pub mu: Option<f64>,
    pub nu: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "method", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Integrator {
    Rk4 { step: f64, t_end: f64 },
    Adaptive { rel_tol: f64, abs_tol: f64, t_end: f64 },
}

impl Integrator {
    pub fn to_config(&self) -> IntegratorConfig {
        match *self {
            Integrator::Rk4 { step, t_end } => IntegratorConfig::rk4(step, t_end),
            Integrator::Adaptive { rel_tol, abs_tol, t_end } => {
                IntegratorConfig::adaptive(rel_tol, abs_tol, t_end)
            }
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PeriodRequest {
    pub closure_tol: f64,
    pub min_period: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegrateConfig {
    pub system: String,
    #[serde(default)]
    pub parameters: Params,
    pub initial_state: Vec<f64>,
    pub integrator: Integrator,
    #[serde(default)]
    pub gauge_fix: bool,
    pub period: Option<PeriodRequest>,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum States {
    /// Use the listed states as-is (after the usual projections).
    Explicit { values: Vec<Vec<f64>> },
    /// Draw uniformly random points on the unit sphere from the run seed.
    Random { count: usize },
    /// Gauge-fixed random states on the level closing after `q` loops
    /// while the transverse pair turns through `p` turns.
    Resonant { p: u32, q: u32, count: usize },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub system: String,
    #[serde(default)]
    pub parameters: Params,
    pub integrator: Integrator,
    pub closure_tol: f64,
    pub min_period: f64,
    #[serde(default)]
    pub gauge_fix: bool,
    pub states: States,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Pair {
    /// u = v = 0: the ruled surface is the cone itself.
    Zero,
    Constant { u: f64, v: f64 },
    /// u + iv = sum of coeffs[k] (s + it)^k.
    Holomorphic { coeffs: Vec<[f64; 2]> },
    /// u + iv = (scale.re + i scale.im) exp(rate (s + it)).
    Exponential { scale: [f64; 2], rate: f64 },
}

impl Pair {
    pub fn to_pair(&self) -> HarmonicPair {
        match self {
            Pair::Zero => HarmonicPair::Zero,
            Pair::Constant { u, v } => HarmonicPair::constant(*u, *v),
            Pair::Holomorphic { coeffs } => HarmonicPair::holomorphic(
                coeffs.iter().map(|c| Complex64::new(c[0], c[1])).collect(),
            ),
            Pair::Exponential { scale, rate } => {
                let scale = Complex64::new(scale[0], scale[1]);
                let rate = *rate;
                HarmonicPair::Custom(Arc::new(move |s, t| {
                    let f = scale * (rate * Complex64::new(s, t)).exp();
                    (f.re, f.im)
                }))
            }
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Family {
    /// Integrate a cataloged system and wrap the trajectory in its
    /// symmetry family.
    Integrated {
        system: String,
        #[serde(default)]
        parameters: Params,
        initial_state: Vec<f64>,
        integrator: Integrator,
    },
    /// Closed-form ruled family over the torus cone link.
    Ruled { phases: [f64; 2], pair: Pair },
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FrameChoice {
    #[default]
    Analytic,
    FiniteDifference,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RateRequest {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl RateRequest {
    pub fn radii(&self) -> Vec<f64> {
        let n = self.count.max(2);
        (0..n)
            .map(|k| self.min * (self.max / self.min).powf(k as f64 / (n - 1) as f64))
            .collect()
    }
}

fn default_samples() -> usize {
    64
}

fn default_fd_step() -> f64 {
    1e-5
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    pub family: Family,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_fd_step")]
    pub fd_step: f64,
    #[serde(default)]
    pub frames: FrameChoice,
    pub rate: Option<RateRequest>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub s: usize,
    pub t: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExportConfig {
    pub system: String,
    #[serde(default)]
    pub parameters: Params,
    pub initial_state: Vec<f64>,
    pub integrator: Integrator,
    /// Values for the leading family parameters (for cone families, the
    /// radius). Defaults to 1.0 when exactly one is needed.
    #[serde(default)]
    pub slice: Vec<f64>,
    pub grid: Grid,
}

/// Reads and parses one JSON config file, returning the raw bytes for
/// manifest hashing alongside the parsed value.
pub fn load<T: serde::de::DeserializeOwned>(path: &Path) -> Result<(T, Vec<u8>), Failure> {
    let bytes = fs::read(path)
        .map_err(|e| Failure::invalid(format!("cannot read {}: {e}", path.display())))?;
    let parsed = serde_json::from_slice(&bytes)
        .map_err(|e| Failure::invalid(format!("{}: {e}", path.display())))?;
    Ok((parsed, bytes))
}

fn require<T: Copy>(value: Option<T>, system: &str, field: &str) -> Result<T, Failure> {
    value.ok_or_else(|| Failure::invalid(format!("{system} requires parameters.{field}")))
}

/// Builds the system from its configured name and parameter block.
pub fn build_spec(system: &str, params: &Params) -> Result<SystemSpec, Failure> {
    let invalid = |e: calib_core::SystemError| Failure::invalid(format!("{system}: {e}"));
    match system {
        "assoc-u1-cone" | "cayley-u1sq-cone" => {
            let w = params
                .windings
                .as_deref()
                .ok_or_else(|| Failure::invalid(format!("{system} requires parameters.windings")))?;
            if system == "assoc-u1-cone" {
                let w: [i64; 3] = w
                    .try_into()
                    .map_err(|_| Failure::invalid(format!("{system} takes 3 windings")))?;
                SystemSpec::assoc_u1_cone(w).map_err(invalid)
            } else {
                let w: [i64; 4] = w
                    .try_into()
                    .map_err(|_| Failure::invalid(format!("{system} takes 4 windings")))?;
                SystemSpec::cayley_u1sq_cone(w).map_err(invalid)
            }
        }
        "assoc-r-u1sq" => {
            let lambda = require(params.lambda, system, "lambda")?;
            let mu = require(params.mu, system, "mu")?;
            let nu = require(params.nu, system, "nu")?;
            SystemSpec::assoc_r_u1sq(lambda, mu, nu).map_err(invalid)
        }
        "coassoc-u1sq-cone" => SystemSpec::coassoc_u1sq_cone().map_err(invalid),
        "cayley-su2" => SystemSpec::cayley_su2().map_err(invalid),
        other => Err(Failure::invalid(format!("unknown system '{other}'"))),
    }
}

/// The closed torus link curve shared by the ruled commands.
pub fn ruled_curve(phases: [f64; 2]) -> TorusCurve {
    torus_cone_curve(phases)
}
