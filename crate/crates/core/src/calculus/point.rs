use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// A point `(x, t)` of the Heisenberg group `H^n`, `x ∈ R^{2n}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupPoint {
    x: Vec<f64>,
    t: f64,
}

impl GroupPoint {
    pub fn new(x: Vec<f64>, t: f64) -> Result<GroupPoint> {
        if x.is_empty() || x.len() % 2 != 0 {
            return Err(Error::invalid(format!(
                "horizontal part must have a positive even length, got {}",
                x.len()
            )));
        }
        Ok(GroupPoint { x, t })
    }

    pub fn origin(n: usize) -> GroupPoint {
        assert!(n >= 1);
        GroupPoint { x: vec![0.0; 2 * n], t: 0.0 }
    }

    pub fn n(&self) -> usize {
        self.x.len() / 2
    }

    /// Homogeneous dimension `2n + 2`.
    pub fn q(&self) -> usize {
        2 * self.n() + 2
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn x_norm_sq(&self) -> f64 {
        self.x.iter().map(|v| v * v).sum()
    }

    /// `Jx` by index swap: `(Jx)_j = -x_{n+j}`, `(Jx)_{n+j} = x_j`.
    pub fn jx(&self) -> Vec<f64> {
        symplectic(&self.x)
    }

    /// Coordinates `(x_1, …, x_{2n}, t)` as one slice-ready vector.
    pub fn coords(&self) -> Vec<f64> {
        let mut c = self.x.clone();
        c.push(self.t);
        c
    }

    pub fn is_origin(&self) -> bool {
        self.t == 0.0 && self.x.iter().all(|&v| v == 0.0)
    }
}

pub(crate) fn symplectic<T: Clone + std::ops::Neg<Output = T>>(x: &[T]) -> Vec<T> {
    let n = x.len() / 2;
    (0..2 * n)
        .map(|j| if j < n { -x[n + j].clone() } else { x[j - n].clone() })
        .collect()
}

fn same_dim(a: &GroupPoint, b: &GroupPoint) -> Result<()> {
    if a.n() != b.n() {
        return Err(Error::invalid(format!("dimension mismatch: H^{} vs H^{}", a.n(), b.n())));
    }
    Ok(())
}

/// `(x, t) ∘ (x', t') = (x + x', t + t' + 2⟨Jx, x'⟩)`.
pub fn group_mul(a: &GroupPoint, b: &GroupPoint) -> Result<GroupPoint> {
    same_dim(a, b)?;
    let jx = a.jx();
    let pairing: f64 = jx.iter().zip(&b.x).map(|(u, v)| u * v).sum();
    let x = a.x.iter().zip(&b.x).map(|(u, v)| u + v).collect();
    Ok(GroupPoint { x, t: a.t + b.t + 2.0 * pairing })
}

pub fn group_inv(a: &GroupPoint) -> GroupPoint {
    GroupPoint { x: a.x.iter().map(|v| -v).collect(), t: -a.t }
}

/// `δ_λ(x, t) = (λx, λ²t)`.
pub fn dilate(lambda: f64, a: &GroupPoint) -> Result<GroupPoint> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::invalid(format!("dilation factor must be positive, got {lambda}")));
    }
    Ok(GroupPoint { x: a.x.iter().map(|v| lambda * v).collect(), t: lambda * lambda * a.t })
}

/// Korányi gauge `ρ = (|x|⁴ + t²)^{1/4}`.
pub fn gauge(a: &GroupPoint) -> f64 {
    let r2 = a.x_norm_sq();
    (r2 * r2 + a.t * a.t).sqrt().sqrt()
}
