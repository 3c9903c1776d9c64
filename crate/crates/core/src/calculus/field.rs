use super::jet::Jet;
use super::point::{symplectic, GroupPoint};
use crate::error::{Error, Result};
use std::sync::Arc;

/// A scalar function on `H^n`, evaluated on seed jets of the coordinates
/// `(x_1, …, x_{2n}, t)`.
pub trait ScalarField: Send + Sync {
    fn name(&self) -> String;

    fn eval(&self, coords: &[Jet]) -> Result<Jet>;
}

/// Jet of `f` at `a` up to `order`, in the variables `(x_1, …, x_{2n}, t)`.
pub fn field_jet(f: &dyn ScalarField, a: &GroupPoint, order: usize) -> Result<Jet> {
    f.eval(&Jet::seeds(&a.coords(), order))
}

pub fn field_value(f: &dyn ScalarField, a: &GroupPoint) -> Result<f64> {
    Ok(field_jet(f, a, 0)?.value())
}

fn split(coords: &[Jet]) -> Result<(&[Jet], &Jet)> {
    match coords.split_last() {
        Some((t, x)) if !x.is_empty() && x.len() % 2 == 0 => Ok((x, t)),
        _ => Err(Error::invalid(format!("expected 2n+1 coordinates, got {}", coords.len()))),
    }
}

pub fn x_norm_sq_jet(x: &[Jet]) -> Jet {
    x.iter().map(|v| v * v).reduce(|a, b| a + b).expect("non-empty")
}

/// `|x|⁴ + t²` as a jet.
pub fn gauge4_jet(coords: &[Jet]) -> Result<Jet> {
    let (x, t) = split(coords)?;
    let r2 = x_norm_sq_jet(x);
    Ok(&r2 * &r2 + t * t)
}

/// `ρ` as a jet. Fails at the origin.
pub fn gauge_jet(coords: &[Jet]) -> Result<Jet> {
    let g4 = gauge4_jet(coords)?;
    if g4.value() == 0.0 {
        return Err(Error::SingularPoint("gauge at the group origin".into()));
    }
    g4.powf(0.25)
}

/// The coordinate function `x_k` (`k < 2n`) or `t` (`k = 2n`).
pub struct Coordinate(pub usize);

impl ScalarField for Coordinate {
    fn name(&self) -> String {
        format!("coord[{}]", self.0)
    }

    fn eval(&self, coords: &[Jet]) -> Result<Jet> {
        coords
            .get(self.0)
            .cloned()
            .ok_or_else(|| Error::invalid(format!("coordinate {} out of range", self.0)))
    }
}

pub struct Gauge;

impl ScalarField for Gauge {
    fn name(&self) -> String {
        "rho".into()
    }

    fn eval(&self, coords: &[Jet]) -> Result<Jet> {
        gauge_jet(coords)
    }
}

/// `ρ^p`.
pub struct GaugePower(pub f64);

impl ScalarField for GaugePower {
    fn name(&self) -> String {
        format!("rho^{}", self.0)
    }

    fn eval(&self, coords: &[Jet]) -> Result<Jet> {
        let g4 = gauge4_jet(coords)?;
        if g4.value() == 0.0 {
            return Err(Error::SingularPoint("gauge power at the group origin".into()));
        }
        g4.powf(self.0 / 4.0)
    }
}

/// `ρ(center⁻¹ ∘ ξ)^p`, a left translate of a gauge power.
pub struct TranslatedGaugePower {
    pub center: GroupPoint,
    pub exponent: f64,
}

impl ScalarField for TranslatedGaugePower {
    fn name(&self) -> String {
        format!("rho(c^-1 o xi)^{} with c = ({:?}, {})", self.exponent, self.center.x(), self.center.t())
    }

    fn eval(&self, coords: &[Jet]) -> Result<Jet> {
        let (x, t) = split(coords)?;
        if x.len() != self.center.x().len() {
            return Err(Error::invalid("translation center has the wrong dimension"));
        }
        // c⁻¹ ∘ ξ = (x − x0, t − t0 − 2⟨Jx0, x⟩)
        let jx0 = self.center.jx();
        let mut y: Vec<Jet> = x.iter().zip(self.center.x()).map(|(xi, x0)| xi - *x0).collect();
        let mut s = t - self.center.t();
        for (xi, c) in x.iter().zip(&jx0) {
            s = s - &(xi * (2.0 * c));
        }
        y.push(s);
        GaugePower(self.exponent).eval(&y)
    }
}

/// The weight `F_α = |x|² ρ^{α−4}`; for `α = 4` this is `|x|²` everywhere.
pub struct WeightF {
    pub alpha: f64,
}

impl ScalarField for WeightF {
    fn name(&self) -> String {
        format!("F_{}", self.alpha)
    }

    fn eval(&self, coords: &[Jet]) -> Result<Jet> {
        let (x, _) = split(coords)?;
        let r2 = x_norm_sq_jet(x);
        if self.alpha == 4.0 {
            return Ok(r2);
        }
        let g4 = gauge4_jet(coords)?;
        if g4.value() == 0.0 {
            return Err(Error::SingularPoint("F_alpha at the group origin".into()));
        }
        Ok(r2 * g4.powf((self.alpha - 4.0) / 4.0)?)
    }
}

/// `u_α = (ρ^α − R^α)/α`, the solution on the gauge ball of radius `R`.
pub struct CandidateU {
    alpha: f64,
    radius: f64,
}

impl CandidateU {
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Neumann constant `c = R^{α/2}`.
    pub fn neumann_constant(&self) -> f64 {
        self.radius.powf(self.alpha / 2.0)
    }
}

pub fn candidate_u(alpha: f64, radius: f64) -> Result<CandidateU> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::invalid(format!("alpha must be positive, got {alpha}")));
    }
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::invalid(format!("radius must be positive, got {radius}")));
    }
    Ok(CandidateU { alpha, radius })
}

impl ScalarField for CandidateU {
    fn name(&self) -> String {
        format!("u_{} (R = {})", self.alpha, self.radius)
    }

    fn eval(&self, coords: &[Jet]) -> Result<Jet> {
        let g4 = gauge4_jet(coords)?;
        let ra = self.radius.powf(self.alpha);
        let rho_a = if self.alpha == 4.0 {
            g4
        } else {
            if g4.value() == 0.0 && g4.order() > 0 {
                return Err(Error::SingularPoint("u_alpha is not smooth at the origin".into()));
            }
            g4.powf(self.alpha / 4.0)?
        };
        Ok((rho_a - ra).scale(1.0 / self.alpha))
    }
}

/// `f ∘ δ_λ`.
pub struct Dilated {
    pub inner: Arc<dyn ScalarField>,
    pub lambda: f64,
}

impl ScalarField for Dilated {
    fn name(&self) -> String {
        format!("{} o dilation({})", self.inner.name(), self.lambda)
    }

    fn eval(&self, coords: &[Jet]) -> Result<Jet> {
        let (x, t) = split(coords)?;
        let mut y: Vec<Jet> = x.iter().map(|v| v * self.lambda).collect();
        y.push(t * (self.lambda * self.lambda));
        self.inner.eval(&y)
    }
}

type FieldFn = dyn Fn(&[Jet]) -> Result<Jet> + Send + Sync;

/// A field given by a closure over the coordinate jets.
pub struct FnField {
    name: String,
    f: Box<FieldFn>,
}

impl FnField {
    pub fn new(
        name: impl Into<String>,
        f: impl Fn(&[Jet]) -> Result<Jet> + Send + Sync + 'static,
    ) -> FnField {
        FnField { name: name.into(), f: Box::new(f) }
    }
}

impl ScalarField for FnField {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn eval(&self, coords: &[Jet]) -> Result<Jet> {
        (self.f)(coords)
    }
}

/// `Jx` on jets.
pub fn symplectic_jets(x: &[Jet]) -> Vec<Jet> {
    symplectic(x)
}
