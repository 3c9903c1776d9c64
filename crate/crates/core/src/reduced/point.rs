use crate::calculus::Jet;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Toric coordinates `(s_1, …, s_n, t)` with `s_j = x_j² + x_{n+j}²`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReducedPoint {
    s: Vec<f64>,
    t: f64,
    sigma: f64,
}

impl ReducedPoint {
    pub fn new(s: Vec<f64>, t: f64) -> Result<ReducedPoint> {
        if s.is_empty() {
            return Err(Error::invalid("reduced point needs at least one s coordinate"));
        }
        if let Some(bad) = s.iter().find(|v| !(**v >= 0.0 && v.is_finite())) {
            return Err(Error::invalid(format!("s coordinates must be nonnegative, got {bad}")));
        }
        if !t.is_finite() {
            return Err(Error::invalid("t must be finite"));
        }
        let sigma = s.iter().sum();
        Ok(ReducedPoint { s, t, sigma })
    }

    pub fn n(&self) -> usize {
        self.s.len()
    }

    pub fn s(&self) -> &[f64] {
        &self.s
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// `P = σ² + t² = ρ⁴`.
    pub fn gauge4(&self) -> f64 {
        self.sigma * self.sigma + self.t * self.t
    }

    /// `(s_1, …, s_n, t)`.
    pub fn coords(&self) -> Vec<f64> {
        let mut c = self.s.clone();
        c.push(self.t);
        c
    }

    pub(crate) fn require_off_axis(&self) -> Result<()> {
        if self.sigma > 0.0 {
            Ok(())
        } else {
            Err(Error::AxisSingularity)
        }
    }
}

/// A function `U(s, t)` of the toric coordinates, evaluated on seed jets.
pub trait ReducedField: Send + Sync {
    fn name(&self) -> String;

    fn eval(&self, s: &[Jet], t: &Jet) -> Result<Jet>;
}

/// Jet of `U` at `p` in the variables `(s_1, …, s_n, t)`.
pub fn reduced_jet(u: &dyn ReducedField, p: &ReducedPoint, order: usize) -> Result<Jet> {
    let seeds = Jet::seeds(&p.coords(), order);
    let (t, s) = seeds.split_last().expect("n >= 1");
    u.eval(s, t)
}

pub fn sigma_jet(s: &[Jet]) -> Jet {
    s.iter().cloned().reduce(|a, b| a + b).expect("n >= 1")
}

/// `U_α = ((σ² + t²)^{α/4} − R^α)/α`, the reduced form of `u_α`.
pub struct ReducedCandidate {
    pub alpha: f64,
    pub radius: f64,
}

impl ReducedCandidate {
    pub fn new(alpha: f64, radius: f64) -> Result<ReducedCandidate> {
        if !(alpha > 0.0 && alpha <= 4.0) {
            return Err(Error::invalid(format!("alpha must lie in (0, 4], got {alpha}")));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::invalid(format!("radius must be positive, got {radius}")));
        }
        Ok(ReducedCandidate { alpha, radius })
    }
}

impl ReducedField for ReducedCandidate {
    fn name(&self) -> String {
        format!("U_{} (R = {})", self.alpha, self.radius)
    }

    fn eval(&self, s: &[Jet], t: &Jet) -> Result<Jet> {
        let sigma = sigma_jet(s);
        let p = &sigma * &sigma + t * t;
        let pa = if self.alpha == 4.0 { p } else { p.powf(self.alpha / 4.0)? };
        Ok((pa - self.radius.powf(self.alpha)).scale(1.0 / self.alpha))
    }
}

/// A polynomial in `(s_1, …, s_n, t)`; exponents list `n` entries for `s`
/// followed by one for `t`.
#[derive(Debug, Clone)]
pub struct ReducedPolynomial {
    name: String,
    n: usize,
    terms: Vec<(f64, Vec<u8>)>,
}

impl ReducedPolynomial {
    pub fn new(name: impl Into<String>, n: usize, terms: Vec<(f64, Vec<u8>)>) -> Result<Self> {
        if let Some((_, e)) = terms.iter().find(|(_, e)| e.len() != n + 1) {
            return Err(Error::invalid(format!("exponent vector {e:?} has the wrong length")));
        }
        Ok(ReducedPolynomial { name: name.into(), n, terms })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.terms.iter().map(|(_, e)| e.iter().map(|&d| d as usize).sum()).max().unwrap_or(0)
    }
}

impl ReducedField for ReducedPolynomial {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn eval(&self, s: &[Jet], t: &Jet) -> Result<Jet> {
        if s.len() != self.n {
            return Err(Error::invalid(format!(
                "polynomial in {} s-variables evaluated with {}",
                self.n,
                s.len()
            )));
        }
        let mut out = Jet::constant(0.0, t.num_vars(), t.order());
        for (c, e) in &self.terms {
            let mut m = Jet::constant(*c, t.num_vars(), t.order());
            for (v, &d) in s.iter().chain(std::iter::once(t)).zip(e) {
                if d > 0 {
                    m = m * v.powi(u32::from(d));
                }
            }
            out = out + m;
        }
        Ok(out)
    }
}

/// `Σ c_k U_k`.
pub struct Combination {
    pub parts: Vec<(f64, Arc<dyn ReducedField>)>,
}

impl ReducedField for Combination {
    fn name(&self) -> String {
        self.parts
            .iter()
            .map(|(c, u)| format!("{c}*[{}]", u.name()))
            .collect::<Vec<_>>()
            .join(" + ")
    }

    fn eval(&self, s: &[Jet], t: &Jet) -> Result<Jet> {
        let mut out = Jet::constant(0.0, t.num_vars(), t.order());
        for (c, u) in &self.parts {
            out = out + u.eval(s, t)?.scale(*c);
        }
        Ok(out)
    }
}

type CylFn = dyn Fn(&Jet, &Jet) -> Result<Jet> + Send + Sync;

/// A cylindrical field `W(σ, t)` seen as a toric field.
pub struct Cylindrical {
    name: String,
    w: Box<CylFn>,
}

impl Cylindrical {
    pub fn new(
        name: impl Into<String>,
        w: impl Fn(&Jet, &Jet) -> Result<Jet> + Send + Sync + 'static,
    ) -> Cylindrical {
        Cylindrical { name: name.into(), w: Box::new(w) }
    }
}

impl ReducedField for Cylindrical {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn eval(&self, s: &[Jet], t: &Jet) -> Result<Jet> {
        (self.w)(&sigma_jet(s), t)
    }
}
