use crate::error::{Error, Result};
use crate::quadrature::Domain;
use crate::numfmt::{lenient, sig17};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DomainKind {
    GaugeBall,
    Perturbed,
}

/// `{σ ≥ 0, σ² + (1+ε)t² < R⁴}` in the reduced `(σ, t)` half-plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReducedDomain {
    pub kind: DomainKind,
    #[serde(serialize_with = "sig17", deserialize_with = "lenient")]
    pub radius: f64,
    #[serde(serialize_with = "sig17", deserialize_with = "lenient")]
    pub epsilon: f64,
}

impl ReducedDomain {
    pub fn gauge_ball(radius: f64) -> Result<ReducedDomain> {
        ReducedDomain { kind: DomainKind::GaugeBall, radius, epsilon: 0.0 }.validated()
    }

    /// The `ε = 0` member of this family runs the same code as the ball.
    pub fn perturbed(radius: f64, epsilon: f64) -> Result<ReducedDomain> {
        ReducedDomain { kind: DomainKind::Perturbed, radius, epsilon }.validated()
    }

    fn validated(self) -> Result<ReducedDomain> {
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        self.as_domain().validate()?;
        if self.kind == DomainKind::GaugeBall && self.epsilon != 0.0 {
            return Err(Error::invalid("a gauge ball has epsilon = 0"));
        }
        Ok(())
    }

    pub fn as_domain(&self) -> Domain {
        Domain { radius: self.radius, epsilon: self.epsilon }
    }

    /// `1 + ε`.
    pub fn k2(&self) -> f64 {
        1.0 + self.epsilon
    }

    pub fn r4(&self) -> f64 {
        self.radius.powi(4)
    }

    /// Largest `|t|` on the boundary.
    pub fn t_extent(&self) -> f64 {
        self.radius * self.radius / self.k2().sqrt()
    }

    pub fn sigma_extent(&self) -> f64 {
        self.radius * self.radius
    }

    /// Boundary `σ` at height `t` (0 past the top).
    pub fn sigma_at(&self, t: f64) -> f64 {
        (self.r4() - self.k2() * t * t).max(0.0).sqrt()
    }

    /// Boundary `|t|` at `σ`.
    pub fn t_at(&self, sigma: f64) -> f64 {
        ((self.r4() - sigma * sigma) / self.k2()).max(0.0).sqrt()
    }

    /// Negative inside.
    pub fn level(&self, sigma: f64, t: f64) -> f64 {
        sigma * sigma + self.k2() * t * t - self.r4()
    }

    /// Boundary point at angle `θ ∈ [0, π]`, measured from the top.
    pub fn boundary_point(&self, theta: f64) -> (f64, f64) {
        let r2 = self.radius * self.radius;
        (r2 * theta.sin(), r2 * theta.cos() / self.k2().sqrt())
    }

    pub fn inward_normal(&self, sigma: f64, t: f64) -> (f64, f64) {
        let (a, b) = (sigma, self.k2() * t);
        let norm = a.hypot(b);
        (-a / norm, -b / norm)
    }
}
