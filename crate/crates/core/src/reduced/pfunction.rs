use super::matrices::{check_jet, Derivs};
use super::point::{sigma_jet, ReducedPoint};
use crate::calculus::Jet;
use crate::error::Result;

/// `F_α = σ P^{(α−4)/4}` in reduced coordinates.
pub fn weight_reduced(p: &ReducedPoint, alpha: f64) -> f64 {
    if alpha == 4.0 {
        p.sigma()
    } else {
        p.sigma() * p.gauge4().powf((alpha - 4.0) / 4.0)
    }
}

/// `v = |D_H u|²/F_α − αu = 4P^{(4−α)/4}(U_t² + Σ(s_j/σ)U_j²) − αU`.
pub fn pfunction(u: &Jet, p: &ReducedPoint, alpha: f64) -> Result<f64> {
    Ok(4.0 * auxiliary_g(u, p, alpha)? - alpha * u.value())
}

/// `g = (v + αU)/4 = P^{(4−α)/4}(U_t² + Σ(s_j/σ)U_j²)`.
pub fn auxiliary_g(u: &Jet, p: &ReducedPoint, alpha: f64) -> Result<f64> {
    check_jet(u, p, 1)?;
    p.require_off_axis()?;
    let (uj, ut) = Derivs::first(u, p.n());
    let inner = ut * ut
        + p.s().iter().zip(&uj).map(|(s, d)| s / p.sigma() * d * d).sum::<f64>();
    Ok(p.gauge4().powf((4.0 - alpha) / 4.0) * inner)
}

/// Jet of `v`, one order below the jet of `U`.
pub fn pfunction_jet(u: &Jet, p: &ReducedPoint, alpha: f64) -> Result<Jet> {
    check_jet(u, p, 1)?;
    p.require_off_axis()?;
    let n = p.n();
    let order = u.order() - 1;
    let seeds = Jet::seeds(&p.coords(), order);
    let (t, s) = seeds.split_last().expect("n >= 1");
    let sigma = sigma_jet(s);
    let inv_sigma = sigma.recip()?;
    let big_p = &sigma * &sigma + t * t;
    let ut = u.partial(n);
    let mut inner = &ut * &ut;
    for (j, sj) in s.iter().enumerate() {
        let uj = u.partial(j);
        inner = inner + sj * &inv_sigma * &uj * &uj;
    }
    let weight = big_p.powf((4.0 - alpha) / 4.0)?;
    Ok((weight * inner).scale(4.0) - u.truncate(order).scale(alpha))
}

/// `(F_α/16)Δ_H v`, computed as `(F_α/4)𝓛v` from the jet of `v` obtained by
/// jet arithmetic on the order-3 jet of `U`.
pub fn lhs_via_jets(u: &Jet, p: &ReducedPoint, alpha: f64) -> Result<f64> {
    check_jet(u, p, 3)?;
    let v = pfunction_jet(&u.truncate(3), p, alpha)?;
    let lv = super::lift::reduced_operator(&v, p)?;
    Ok(weight_reduced(p, alpha) / 4.0 * lv)
}
