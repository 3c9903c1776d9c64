//! Volume and gauge-sphere quadrature for cylindrically symmetric integrands,
//! plus the integral identity checks built on it.
//!
//! Integrands are functions of `(r, t)` with `r = |x|`. Volumes use gauge-polar
//! coordinates `r = ϱ√(sin φ)`, `t = ϱ² cos φ / k`, in which a ball (or a
//! stretched ball with `k = √(1+ε)`) becomes the rectangle `ϱ ≤ R`,
//! `0 ≤ φ ≤ π`, with volume element `ω ϱ^{2n+1} sin^{n−1}φ / k`.

mod checks;
mod engine;
pub mod gauss;
mod surface;
mod volume;

pub use checks::{
    average_identity_check, calibrate_beta, mean_value_check, pohozaev_check, AverageRecord,
    MeanValueCalibration, MeanValueRecord, PohozaevRecord, SubIdentity, USource,
};
pub use engine::Estimate;
pub use surface::{surface_integral, surface_integral_gauge_sphere, Measure};
pub use volume::{sphere_measure, volume_integral, volume_integral_sym, Domain};

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    /// Fixed tensor rule per panel; the node count doubles until two levels agree.
    TensorGaussLegendre,
    /// Recursive bisection of each panel until parent and children agree.
    AdaptiveSubdivision,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Rule::TensorGaussLegendre => "tensor",
            Rule::AdaptiveSubdivision => "adaptive",
        })
    }
}

impl FromStr for Rule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tensor" | "tensor_gauss_legendre" => Ok(Rule::TensorGaussLegendre),
            "adaptive" | "adaptive_subdivision" => Ok(Rule::AdaptiveSubdivision),
            _ => Err(Error::invalid(format!("unknown quadrature rule {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub rule: Rule,
    /// Gauss nodes per panel and dimension (the starting level for the tensor rule).
    pub nodes: usize,
    pub target_rel_tol: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec { rule: Rule::TensorGaussLegendre, nodes: 16, target_rel_tol: 1e-12 }
    }
}

impl QuadratureSpec {
    pub fn new(rule: Rule, nodes: usize, target_rel_tol: f64) -> Result<Self> {
        let spec = QuadratureSpec { rule, nodes, target_rel_tol };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.target_rel_tol > 1e-14 && self.target_rel_tol < 1e-2) {
            return Err(Error::invalid(format!(
                "target_rel_tol {} must lie in (1e-14, 1e-2)",
                self.target_rel_tol
            )));
        }
        if !(1..=engine::MAX_NODES / 2).contains(&self.nodes) {
            return Err(Error::invalid(format!(
                "nodes {} must lie in 1..={}",
                self.nodes,
                engine::MAX_NODES / 2
            )));
        }
        Ok(())
    }
}

/// `ω = 2πⁿ/(n−1)!`, the area of the unit sphere in `R^{2n}`.
pub fn sphere_area(n: usize) -> f64 {
    let fact: f64 = (1..n).map(|k| k as f64).product();
    2.0 * std::f64::consts::PI.powi(n as i32) / fact
}

/// Maps `u ∈ [0, 2]` onto `[0, π]` with quadratic clustering at both ends,
/// returning the angle and `dangle/du`. Square-root endpoint behaviour in the
/// angle becomes smooth in `u`.
pub(crate) fn clustered_angle(u: f64) -> (f64, f64) {
    use std::f64::consts::{FRAC_PI_2, PI};
    if u <= 1.0 {
        (FRAC_PI_2 * u * u, PI * u)
    } else {
        let v = 2.0 - u;
        (PI - FRAC_PI_2 * v * v, PI * v)
    }
}
