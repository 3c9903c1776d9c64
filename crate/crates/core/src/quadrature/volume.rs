use super::engine::{integrate, Cell, Estimate};
use super::{clustered_angle, sphere_area, QuadratureSpec};
use crate::error::{Error, Result};
use crate::numfmt::{lenient, sig17};
use serde::{Deserialize, Serialize};

/// Geometric grading of the gauge radius towards the origin.
const GRADED_LEVELS: i32 = 40;

/// `{r⁴ + (1+ε)t² < R⁴}`; the ball is `ε = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    #[serde(serialize_with = "sig17", deserialize_with = "lenient")]
    pub radius: f64,
    #[serde(serialize_with = "sig17", deserialize_with = "lenient")]
    pub epsilon: f64,
}

impl Domain {
    pub fn ball(radius: f64) -> Domain {
        Domain { radius, epsilon: 0.0 }
    }

    pub fn perturbed(radius: f64, epsilon: f64) -> Domain {
        Domain { radius, epsilon }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return Err(Error::invalid(format!("radius {} must be positive", self.radius)));
        }
        if !(self.epsilon > -1.0 && self.epsilon.is_finite()) {
            return Err(Error::invalid(format!("epsilon {} must exceed -1", self.epsilon)));
        }
        Ok(())
    }

    /// `k = √(1+ε)`.
    pub fn stretch(&self) -> f64 {
        (1.0 + self.epsilon).sqrt()
    }
}

/// `ϱ` panels `[R/2^{k+1}, R/2^k]` plus the innermost `[0, R/2^40]`.
pub(crate) fn graded_edges(outer: f64) -> Vec<(f64, f64)> {
    let mut edges = vec![(0.0, outer * 0.5f64.powi(GRADED_LEVELS))];
    for k in (0..GRADED_LEVELS).rev() {
        edges.push((outer * 0.5f64.powi(k + 1), outer * 0.5f64.powi(k)));
    }
    edges
}

pub fn volume_integral<F>(f: F, n: usize, domain: &Domain, spec: &QuadratureSpec) -> Result<Estimate>
where
    F: Fn(f64, f64) -> f64 + Sync,
{
    if n == 0 {
        return Err(Error::invalid("n must be at least 1"));
    }
    domain.validate()?;
    let k = domain.stretch();
    let omega = sphere_area(n);
    let cells: Vec<Cell<2>> = graded_edges(domain.radius)
        .into_iter()
        .flat_map(|(a, b)| [(0.0, 1.0), (1.0, 2.0)].map(|(c, d)| Cell { lo: [a, c], hi: [b, d] }))
        .collect();
    let g = |[rho, u]: [f64; 2]| {
        let (phi, dphi) = clustered_angle(u);
        let s = phi.sin();
        let r = rho * s.max(0.0).sqrt();
        let t = rho * rho * phi.cos() / k;
        let jac = omega * rho.powi(2 * n as i32 + 1) * s.powi(n as i32 - 1) / k * dphi;
        if jac == 0.0 {
            0.0
        } else {
            f(r, t) * jac
        }
    };
    integrate(&cells, &g, spec)
}

/// `∫_Ω f(|x|, t) dξ`.
pub fn volume_integral_sym<F>(f: F, n: usize, domain: &Domain, spec: &QuadratureSpec) -> Result<f64>
where
    F: Fn(f64, f64) -> f64 + Sync,
{
    volume_integral(f, n, domain, spec).map(|e| e.value)
}

/// Lebesgue measure of the gauge ball of radius `R`, via the same quadrature.
pub fn sphere_measure(n: usize, radius: f64, spec: &QuadratureSpec) -> Result<f64> {
    volume_integral_sym(|_, _| 1.0, n, &Domain::ball(radius), spec)
}
