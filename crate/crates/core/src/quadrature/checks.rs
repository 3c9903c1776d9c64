use super::surface::{surface_integral_gauge_sphere, Measure};
use super::volume::{volume_integral_sym, Domain};
use super::QuadratureSpec;
use crate::calculus::{field_jet, field_value, sublaplacian_terms, GroupPoint, ScalarField};
use crate::error::{Error, Result};
use crate::lab::sampling::point_rng;
use crate::numfmt::{lenient, sig17};
use crate::solver::{integrate_grid, neumann_trace, pfunction_value, GridSolution};
use rand::Rng;
use serde::{Deserialize, Serialize};

const HARMONIC_POINTS: u64 = 100;
const HARMONIC_SEED: u64 = 0x5eed;
const HARMONIC_TOL: f64 = 1e-9;
const SYMMETRY_TOL: f64 = 1e-9;

/// Where `u` comes from in the Pohozaev and average checks.
#[derive(Debug, Clone, Copy)]
pub enum USource<'a> {
    /// `u_α = (ρ^α − R^α)/α` on the gauge ball, with `c = R^{α/2}`.
    Analytic,
    /// A reconstructed grid solution, with `c` the mean Neumann ratio.
    Grid(&'a GridSolution),
}

impl USource<'_> {
    fn mode(&self) -> &'static str {
        match self {
            USource::Analytic => "analytic",
            USource::Grid(_) => "grid",
        }
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha <= 4.0) {
        return Err(Error::invalid(format!("alpha must lie in (0, 4], got {alpha}")));
    }
    Ok(())
}

fn check_radius(radius: f64) -> Result<()> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::invalid(format!("radius must be positive, got {radius}")));
    }
    Ok(())
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::invalid("n must be at least 1"));
    }
    Ok(())
}

fn rel(lhs: f64, rhs: f64, scale: f64) -> f64 {
    (lhs - rhs).abs() / lhs.abs().max(rhs.abs()).max(scale).max(f64::MIN_POSITIVE)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanValueCalibration {
    pub n: usize,
    #[serde(serialize_with = "sig17", deserialize_with = "lenient")]
    pub radius: f64,
    #[serde(serialize_with = "sig17", deserialize_with = "lenient")]
    pub beta_hat: f64,
    /// Relative change of the estimate when recomputed at radius `2R`.
    #[serde(serialize_with = "sig17", deserialize_with = "lenient")]
    pub residual: f64,
}

fn beta_at(n: usize, radius: f64, spec: &QuadratureSpec) -> Result<f64> {
    let q = 2.0 * n as f64 + 2.0;
    // |D_H ρ|² = r²/ρ²
    let mass = volume_integral_sym(
        |r, t| r * r / (r.powi(4) + t * t).sqrt(),
        n,
        &Domain::ball(radius),
        spec,
    )?;
    Ok(radius.powf(q) / (q * (q - 2.0) * mass))
}

/// `β = R^Q / (Q(Q−2) ∫_{B_R} |D_H ρ|²)`, the constant that makes the solid
/// mean-value formula exact for `h ≡ 1`.
pub fn calibrate_beta(n: usize, radius: f64, spec: &QuadratureSpec) -> Result<MeanValueCalibration> {
    check_n(n)?;
    check_radius(radius)?;
    let beta_hat = beta_at(n, radius, spec)?;
    let doubled = beta_at(n, 2.0 * radius, spec)?;
    Ok(MeanValueCalibration { n, radius, beta_hat, residual: (doubled - beta_hat).abs() / beta_hat })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanValueRecord {
    pub field: String,
    pub n: usize,
    #[serde(serialize_with = "sig17", deserialize_with = "lenient")]
    pub radius: f64,
    #[serde(serialize_with = "sig17", deserialize_with = "lenient")]
    pub beta_hat: f64,
    #[serde(serialize_with = "sig17", deserialize_with = "lenient")]
    pub pointwise: f64,
    #[serde(serialize_with = "sig17", deserialize_with = "lenient")]
    pub solid_avg: f64,
    #[serde(serialize_with = "sig17", deserialize_with = "lenient")]
    pub surface_avg: f64,
}

/// `h(0)` against its solid and surface averages over `B_R`.
///
/// `h` must be Δ_H-harmonic on the ball and cylindrically symmetric; both are
/// checked at 100 seeded interior points. The integrals use the profile
/// `h̄(r, t) = h(r e₁, t)`.
pub fn mean_value_check(
    h: &dyn ScalarField,
    n: usize,
    radius: f64,
    spec: &QuadratureSpec,
) -> Result<MeanValueRecord> {
    check_n(n)?;
    check_radius(radius)?;
    check_harmonic(h, n, radius)?;
    let q = 2.0 * n as f64 + 2.0;
    let beta_hat = beta_at(n, radius, spec)?;
    let profile = |r: f64, t: f64| {
        let mut x = vec![0.0; 2 * n];
        x[0] = r;
        GroupPoint::new(x, t).and_then(|p| field_value(h, &p)).unwrap_or(f64::NAN)
    };
    let pointwise = field_value(h, &GroupPoint::origin(n))?;
    let solid = volume_integral_sym(
        |r, t| profile(r, t) * r * r / (r.powi(4) + t * t).sqrt(),
        n,
        &Domain::ball(radius),
        spec,
    )?;
    let surface = surface_integral_gauge_sphere(profile, n, radius, Measure::Weighted, spec)?;
    Ok(MeanValueRecord {
        field: h.name(),
        n,
        radius,
        beta_hat,
        pointwise,
        solid_avg: q * (q - 2.0) * beta_hat / radius.powf(q) * solid,
        surface_avg: (q - 2.0) * beta_hat / radius.powf(q - 1.0) * surface,
    })
}

fn check_harmonic(h: &dyn ScalarField, n: usize, radius: f64) -> Result<()> {
    for index in 0..HARMONIC_POINTS {
        let mut rng = point_rng(HARMONIC_SEED, index);
        let rho = radius * rng.gen_range(0.05..0.95);
        let phi = std::f64::consts::PI * rng.gen_range(0.01..0.99);
        let dir: Vec<f64> = (0..2 * n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let norm = dir.iter().map(|d| d * d).sum::<f64>().sqrt().max(1e-12);
        let r = rho * phi.sin().sqrt();
        let t = rho * rho * phi.cos();
        let p = GroupPoint::new(dir.iter().map(|d| r * d / norm).collect(), t)?;
        let jet = field_jet(h, &p, 2)?;
        let terms = sublaplacian_terms(&jet, &p);
        let scale: f64 = terms.iter().map(|v| v.abs()).sum();
        let lap: f64 = terms.iter().sum();
        if lap.abs() > HARMONIC_TOL * scale {
            return Err(Error::invalid(format!(
                "{} is not sub-harmonic-free at {:?}: Δ_H h = {lap:e}",
                h.name(),
                p.coords()
            )));
        }
        let mut axis = vec![0.0; 2 * n];
        axis[0] = r;
        let on_axis = field_value(h, &GroupPoint::new(axis, t)?)?;
        let value = jet.value();
        let diff = (value - on_axis).abs();
        if diff > SYMMETRY_TOL * value.abs().max(on_axis.abs()) && diff > 1e-14 {
            return Err(Error::invalid(format!(
                "{} is not cylindrically symmetric at {:?}",
                h.name(),
                p.coords()
            )));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubIdentity {
    pub name: String,
    #[serde(serialize_with = "sig17", deserialize_with = "lenient")]
    pub lhs: f64,
    #[serde(serialize_with = "sig17", deserialize_with = "lenient")]
    pub rhs: f64,
    #[serde(serialize_with = "sig17", deserialize_with = "lenient")]
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PohozaevRecord {
    pub mode: String,
    pub n: usize,
    #[serde(serialize_with = "sig17", deserialize_with = "lenient")]
    pub alpha: f64,
    #[serde(serialize_with = "sig17", deserialize_with = "lenient")]
    pub radius: f64,
    /// `(Q+2α−2) ∫ u F_α`.
    #[serde(serialize_with = "sig17", deserialize_with = "lenient")]
    pub lhs: f64,
    /// `−c² ∫ F_α`.
    #[serde(serialize_with = "sig17", deserialize_with = "lenient")]
    pub rhs: f64,
    #[serde(serialize_with = "sig17", deserialize_with = "lenient")]
    pub residual: f64,
    pub sub_identities: Vec<SubIdentity>,
}

/// Volume integrals `∫uF`, `∫F`, `∫Z(u)F` and the constant `c²`.
struct Moments {
    u_f: f64,
    f: f64,
    zu_f: f64,
    c2: f64,
}

fn moments(alpha: f64, n: usize, radius: f64, source: USource, spec: &QuadratureSpec) -> Result<Moments> {
    match source {
        USource::Analytic => {
            let ball = Domain::ball(radius);
            let ra = radius.powf(alpha);
            let weight = |r: f64, t: f64| r * r * (r.powi(4) + t * t).powf((alpha - 4.0) / 4.0);
            let rho_a = |r: f64, t: f64| (r.powi(4) + t * t).powf(alpha / 4.0);
            let u_f = volume_integral_sym(|r, t| (rho_a(r, t) - ra) / alpha * weight(r, t), n, &ball, spec)?;
            let f = volume_integral_sym(weight, n, &ball, spec)?;
            // Z(u_α) = ρ^α
            let zu_f = volume_integral_sym(|r, t| rho_a(r, t) * weight(r, t), n, &ball, spec)?;
            Ok(Moments { u_f, f, zu_f, c2: ra })
        }
        USource::Grid(sol) => {
            check_grid(sol, alpha, n, radius)?;
            let weight = |s: f64, t: f64| s * (s * s + t * t).powf((alpha - 4.0) / 4.0);
            let u_f = integrate_grid(sol, |p| p.w * weight(p.sigma, p.t));
            let f = integrate_grid(sol, |p| weight(p.sigma, p.t));
            // Z(W(|x|², t)) = 2σW_σ + 2tW_t
            let zu_f = integrate_grid(sol, |p| {
                (2.0 * p.sigma * p.w_sigma + 2.0 * p.t * p.w_t) * weight(p.sigma, p.t)
            });
            let c = neumann_trace(sol).mean;
            Ok(Moments { u_f, f, zu_f, c2: c * c })
        }
    }
}

fn check_grid(sol: &GridSolution, alpha: f64, n: usize, radius: f64) -> Result<()> {
    let dom = sol.grid().domain();
    if sol.alpha() != alpha || sol.n() != n || (dom.radius - radius).abs() > 1e-12 * radius {
        return Err(Error::invalid(format!(
            "grid solution has (alpha, n, R) = ({}, {}, {}), expected ({alpha}, {n}, {radius})",
            sol.alpha(),
            sol.n(),
            dom.radius
        )));
    }
    Ok(())
}

/// `(Q+2α−2) ∫ u F_α = −c² ∫ F_α` together with the three integral identities
/// it is assembled from. In grid mode only the homogeneity identity is
/// available, since the other two need boundary fluxes of `u`.
pub fn pohozaev_check(
    alpha: f64,
    n: usize,
    radius: f64,
    source: USource,
    spec: &QuadratureSpec,
) -> Result<PohozaevRecord> {
    check_alpha(alpha)?;
    check_n(n)?;
    check_radius(radius)?;
    let q = 2.0 * n as f64 + 2.0;
    let m = moments(alpha, n, radius, source, spec)?;
    let lhs = (q + 2.0 * alpha - 2.0) * m.u_f;
    let rhs = -m.c2 * m.f;
    let mut subs = Vec::new();
    let mut push = |name: &str, l: f64, r: f64, scale: f64| {
        subs.push(SubIdentity { name: name.to_string(), lhs: l, rhs: r, residual: rel(l, r, scale) });
    };
    if let USource::Analytic = source {
        let ra = radius.powf(alpha);
        // ∫_{∂B} Z(u)|D_H u| dσ_H with Z(u) = R^α and |D_H u| = R^{α−2} r
        let flux = surface_integral_gauge_sphere(
            |r, _| ra * radius.powf(alpha - 2.0) * r,
            n,
            radius,
            Measure::Horizontal,
            spec,
        )?;
        let a = alpha * (q + alpha - 2.0) * m.u_f;
        let b = (q + alpha - 2.0) * m.zu_f;
        push("dilation_flux", a - b, -flux, a.abs() + b.abs());
        push("boundary_flux", flux, m.c2 * (q + alpha - 2.0) * m.f, 0.0);
    }
    let homog = (alpha - 2.0) * m.u_f;
    let (a, b) = (q * m.u_f, m.zu_f);
    push("homogeneity", homog, -a - b, a.abs() + b.abs());
    Ok(PohozaevRecord {
        mode: source.mode().to_string(),
        n,
        alpha,
        radius,
        lhs,
        rhs,
        residual: rel(lhs, rhs, 0.0),
        sub_identities: subs,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AverageRecord {
    pub mode: String,
    pub n: usize,
    #[serde(serialize_with = "sig17", deserialize_with = "lenient")]
    pub alpha: f64,
    #[serde(serialize_with = "sig17", deserialize_with = "lenient")]
    pub radius: f64,
    /// `∫ v F_α`.
    #[serde(serialize_with = "sig17", deserialize_with = "lenient")]
    pub lhs: f64,
    /// `c² ∫ F_α`.
    #[serde(serialize_with = "sig17", deserialize_with = "lenient")]
    pub rhs: f64,
    #[serde(serialize_with = "sig17", deserialize_with = "lenient")]
    pub residual: f64,
    #[serde(serialize_with = "sig17", deserialize_with = "lenient")]
    pub boundary_constant: f64,
}

/// `∫ v F_α = c² ∫ F_α` with `v = 4P^{(4−α)/4}(W_σ² + W_t²) − αW`.
pub fn average_identity_check(
    alpha: f64,
    n: usize,
    radius: f64,
    source: USource,
    spec: &QuadratureSpec,
) -> Result<AverageRecord> {
    check_alpha(alpha)?;
    check_n(n)?;
    check_radius(radius)?;
    let (lhs, f, c2) = match source {
        USource::Analytic => {
            let ball = Domain::ball(radius);
            let ra = radius.powf(alpha);
            let weight = |r: f64, t: f64| r * r * (r.powi(4) + t * t).powf((alpha - 4.0) / 4.0);
            let v = |r: f64, t: f64| {
                let sigma = r * r;
                let p = sigma * sigma + t * t;
                let g = p.powf(alpha / 4.0 - 1.0) / 2.0;
                let w = (p.powf(alpha / 4.0) - ra) / alpha;
                pfunction_value(alpha, sigma, t, w, g * sigma, g * t)
            };
            let lhs = volume_integral_sym(|r, t| v(r, t) * weight(r, t), n, &ball, spec)?;
            let f = volume_integral_sym(weight, n, &ball, spec)?;
            (lhs, f, ra)
        }
        USource::Grid(sol) => {
            check_grid(sol, alpha, n, radius)?;
            let weight = |s: f64, t: f64| s * (s * s + t * t).powf((alpha - 4.0) / 4.0);
            let lhs = integrate_grid(sol, |p| {
                pfunction_value(alpha, p.sigma, p.t, p.w, p.w_sigma, p.w_t) * weight(p.sigma, p.t)
            });
            let f = integrate_grid(sol, |p| weight(p.sigma, p.t));
            let c = neumann_trace(sol).mean;
            (lhs, f, c * c)
        }
    };
    let rhs = c2 * f;
    Ok(AverageRecord {
        mode: source.mode().to_string(),
        n,
        alpha,
        radius,
        lhs,
        rhs,
        residual: rel(lhs, rhs, 0.0),
        boundary_constant: c2,
    })
}
