use super::field::{field_jet, ScalarField};
use super::jet::Jet;
use super::point::{gauge, GroupPoint};
use crate::error::{Error, Result};
use serde::Serialize;

/// `|A − B| / max(|A|, |B|, 1e−300)`.
pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

/// `(X_1 f, …, X_{2n} f)` with `X_j = ∂_{x_j} + 2(Jx)_j ∂_t`.
pub fn horizontal_gradient(f: &dyn ScalarField, a: &GroupPoint) -> Result<Vec<f64>> {
    let jet = field_jet(f, a, 1)?;
    let tv = 2 * a.n();
    let ft = jet.d1(tv);
    Ok(a.jx().iter().enumerate().map(|(j, jx)| jet.d1(j) + 2.0 * jx * ft).collect())
}

/// `T f = ∂_t f`.
pub fn t_derivative(f: &dyn ScalarField, a: &GroupPoint) -> Result<f64> {
    Ok(field_jet(f, a, 1)?.d1(2 * a.n()))
}

/// `Δ_H f = Δ_x f + 4|x|² f_tt + 4⟨Jx, ∇_x f_t⟩`, from the order-2 jet.
pub fn sublaplacian(f: &dyn ScalarField, a: &GroupPoint) -> Result<f64> {
    let jet = field_jet(f, a, 2)?;
    Ok(sublaplacian_terms(&jet, a).iter().sum())
}

/// The three groups of terms of the coefficient formula, for callers that
/// need a cancellation-aware scale.
pub fn sublaplacian_terms(jet: &Jet, a: &GroupPoint) -> [f64; 3] {
    let tv = 2 * a.n();
    let lap_x: f64 = (0..tv).map(|j| jet.d2(j, j)).sum();
    let tt = 4.0 * a.x_norm_sq() * jet.d2(tv, tv);
    let mixed: f64 = a.jx().iter().enumerate().map(|(j, jx)| jx * jet.d2(j, tv)).sum();
    [lap_x, tt, 4.0 * mixed]
}

/// `Σ_j X_j(X_j f)`, applying each vector field to a jet in turn.
pub fn sublaplacian_composed(f: &dyn ScalarField, a: &GroupPoint) -> Result<f64> {
    let seeds = Jet::seeds(&a.coords(), 2);
    let jet = f.eval(&seeds)?;
    let tv = 2 * a.n();
    let n = a.n();
    let mut total = 0.0;
    for j in 0..tv {
        // (Jx)_j as a jet
        let jx = if j < n { -&seeds[n + j] } else { seeds[j - n].clone() };
        let apply = |g: &Jet| g.partial(j) + (&jx * 2.0) * g.partial(tv);
        total += apply(&apply(&jet)).value();
    }
    Ok(total)
}

/// `Z f = Σ x_j X_j f + 2t T f`, the generator of the dilations.
pub fn z_field(f: &dyn ScalarField, a: &GroupPoint) -> Result<f64> {
    let grad = horizontal_gradient(f, a)?;
    let tf = t_derivative(f, a)?;
    Ok(a.x().iter().zip(&grad).map(|(x, g)| x * g).sum::<f64>() + 2.0 * a.t() * tf)
}

/// `F_α(a) = |x|² ρ^{α−4}`; exactly `|x|²` when `α = 4`.
pub fn weight_f(alpha: f64, a: &GroupPoint) -> Result<f64> {
    check_alpha(alpha)?;
    let r2 = a.x_norm_sq();
    if alpha == 4.0 {
        return Ok(r2);
    }
    if a.is_origin() {
        return Err(Error::SingularPoint("F_alpha at the group origin".into()));
    }
    Ok(r2 * gauge(a).powf(alpha - 4.0))
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha <= 4.0) {
        return Err(Error::invalid(format!("alpha must lie in (0, 4], got {alpha}")));
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct WeightDerivatives {
    pub grad_h: Vec<f64>,
    pub grad_h_norm_sq: f64,
    pub t_f: f64,
    pub lap_f: f64,
}

/// Closed forms for `D_H F_α`, `|D_H F_α|²`, `T F_α` and `Δ_H F_α`.
pub fn weight_f_closed_derivatives(alpha: f64, a: &GroupPoint) -> Result<WeightDerivatives> {
    check_alpha(alpha)?;
    if a.is_origin() {
        return Err(Error::SingularPoint("derivatives of F_alpha at the origin".into()));
    }
    let q = a.q() as f64;
    let rho = gauge(a);
    let r2 = a.x_norm_sq();
    let t = a.t();
    let p4 = rho.powf(alpha - 4.0);
    let p8 = rho.powf(alpha - 8.0);
    let grad_h = a
        .x()
        .iter()
        .zip(a.jx())
        .map(|(x, jx)| 2.0 * x * p4 + (alpha - 4.0) * r2 * p8 * (x * r2 + jx * t))
        .collect();
    let grad_h_norm_sq = 4.0 * r2 * rho.powf(2.0 * alpha - 8.0)
        + alpha * (alpha - 4.0) * r2 * r2 * r2 * rho.powf(2.0 * alpha - 12.0);
    let t_f = 0.5 * (alpha - 4.0) * r2 * p8 * t;
    let lap_f = 2.0 * (q - 2.0) * p4 + (alpha - 4.0) * (q + alpha - 2.0) * r2 * r2 * p8;
    Ok(WeightDerivatives { grad_h, grad_h_norm_sq, t_f, lap_f })
}
