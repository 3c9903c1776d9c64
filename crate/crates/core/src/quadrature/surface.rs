use super::engine::{integrate, Cell, Estimate};
use super::{clustered_angle, sphere_area, QuadratureSpec};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    /// `dσ`.
    Euclidean,
    /// `dσ_H = (|D_H ρ|/|Dρ|) dσ`.
    Horizontal,
    /// `(|D_H ρ|²/|Dρ|) dσ`.
    Weighted,
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Measure::Euclidean => "euclidean",
            Measure::Horizontal => "horizontal",
            Measure::Weighted => "weighted",
        })
    }
}

impl FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "euclidean" => Ok(Measure::Euclidean),
            "horizontal" => Ok(Measure::Horizontal),
            "weighted" => Ok(Measure::Weighted),
            _ => Err(Error::invalid(format!("unknown measure {s:?}"))),
        }
    }
}

/// `∫_{∂B_R} g(|x|, t) dμ` on the gauge sphere.
///
/// The profile `r = (R⁴ − t²)^{1/4}` is parametrized by `t = R² cos θ`, so
/// `r = R√(sin θ)` and `dσ = ω R^{2n−1} sin^{n−1}θ √(R²cos²θ/4 + R⁴sin³θ) dθ`.
/// On the sphere `|D_H ρ| = r/R` and `|Dρ| = √(r⁶ + t²/4)/R³`.
pub fn surface_integral<G>(
    g: G,
    n: usize,
    radius: f64,
    measure: Measure,
    spec: &QuadratureSpec,
) -> Result<Estimate>
where
    G: Fn(f64, f64) -> f64 + Sync,
{
    if n == 0 {
        return Err(Error::invalid("n must be at least 1"));
    }
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::invalid(format!("radius {radius} must be positive")));
    }
    let big_r = radius;
    let omega = sphere_area(n);
    let cells = [Cell { lo: [0.0], hi: [1.0] }, Cell { lo: [1.0], hi: [2.0] }];
    let integrand = |[u]: [f64; 1]| {
        let (theta, dtheta) = clustered_angle(u);
        let (s, c) = (theta.sin().max(0.0), theta.cos());
        let r = big_r * s.sqrt();
        let t = big_r * big_r * c;
        let arc = (big_r * big_r * c * c / 4.0 + big_r.powi(4) * s * s * s).sqrt();
        let d_sigma = omega * big_r.powi(2 * n as i32 - 1) * s.powi(n as i32 - 1) * arc * dtheta;
        let grad = (r.powi(6) + t * t / 4.0).sqrt() / big_r.powi(3);
        let horizontal = r / big_r;
        let weight = match measure {
            Measure::Euclidean => 1.0,
            Measure::Horizontal => horizontal / grad,
            Measure::Weighted => horizontal * horizontal / grad,
        };
        let jac = d_sigma * weight;
        if jac == 0.0 {
            0.0
        } else {
            g(r, t) * jac
        }
    };
    integrate(&cells, &integrand, spec)
}

pub fn surface_integral_gauge_sphere<G>(
    g: G,
    n: usize,
    radius: f64,
    measure: Measure,
    spec: &QuadratureSpec,
) -> Result<f64>
where
    G: Fn(f64, f64) -> f64 + Sync,
{
    surface_integral(g, n, radius, measure, spec).map(|e| e.value)
}
