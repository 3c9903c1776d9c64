use heis_overdet::calculus::{Coordinate, FnField, GroupPoint, Jet, TranslatedGaugePower};
use heis_overdet::quadrature::gauss::gauss_legendre;
use heis_overdet::quadrature::{
    average_identity_check, calibrate_beta, mean_value_check, pohozaev_check, sphere_area,
    sphere_measure, surface_integral, volume_integral, Domain, Measure, QuadratureSpec, Rule,
    USource,
};
use heis_overdet::Error;
use proptest::prelude::*;
use std::f64::consts::PI;

fn spec() -> QuadratureSpec {
    QuadratureSpec::default()
}

// |B_R| = ω R^Q/Q ∫_0^π sin^{n−1}φ dφ: π²/2 for n = 1 and 2π²/3 for n = 2.
#[test]
fn gauge_ball_volumes() {
    let v1 = sphere_measure(1, 1.0, &spec()).unwrap();
    assert!((v1 - PI * PI / 2.0).abs() < 1e-13);
    let v2 = sphere_measure(2, 1.0, &spec()).unwrap();
    assert!((v2 - 2.0 * PI * PI / 3.0).abs() < 1e-13);
    let v2r = sphere_measure(2, 1.5, &spec()).unwrap();
    assert!((v2r / v2 - 1.5f64.powi(6)).abs() < 1e-12);
    assert!((sphere_area(1) - 2.0 * PI).abs() < 1e-15);
    assert!((sphere_area(3) - PI.powi(3)).abs() < 1e-13);
}

#[test]
fn perturbed_domain_volume_scales_by_the_stretch() {
    let ball = sphere_measure(1, 1.0, &spec()).unwrap();
    for eps in [-0.2, 0.05, 0.3] {
        let d = Domain::perturbed(1.0, eps);
        let v = volume_integral(|_, _| 1.0, 1, &d, &spec()).unwrap().value;
        assert!((v * (1.0 + eps).sqrt() - ball).abs() < 1e-12);
    }
    assert!(Domain::perturbed(1.0, -1.0).validate().is_err());
}

#[test]
fn adaptive_and_tensor_rules_agree() {
    let f = |r: f64, t: f64| (r * r + 0.3 * t).exp() * r * r / (r.powi(4) + t * t).sqrt();
    let tensor = volume_integral(f, 2, &Domain::ball(1.0), &spec()).unwrap();
    let adaptive_spec = QuadratureSpec::new(Rule::AdaptiveSubdivision, 8, 1e-11).unwrap();
    let adaptive = volume_integral(f, 2, &Domain::ball(1.0), &adaptive_spec).unwrap();
    assert!((tensor.value - adaptive.value).abs() < 1e-10 * tensor.magnitude);
    assert!(tensor.error <= 1e-12 * tensor.magnitude);
}

#[test]
fn gauss_rules_are_exact_on_moments() {
    for m in [1, 5, 16, 64] {
        let rule = gauss_legendre(m);
        for k in 0..2 * m {
            let approx: f64 = rule.nodes.iter().zip(&rule.weights).map(|(x, w)| w * x.powi(k as i32)).sum();
            let exact = if k % 2 == 1 { 0.0 } else { 2.0 / (k as f64 + 1.0) };
            assert!((approx - exact).abs() < 1e-13, "m = {m}, k = {k}");
        }
    }
}

#[test]
fn spec_validation() {
    assert!(QuadratureSpec::new(Rule::TensorGaussLegendre, 16, 1e-15).is_err());
    assert!(QuadratureSpec::new(Rule::TensorGaussLegendre, 16, 0.1).is_err());
    assert!(QuadratureSpec::new(Rule::TensorGaussLegendre, 0, 1e-8).is_err());
    assert!(QuadratureSpec::new(Rule::TensorGaussLegendre, 257, 1e-8).is_err());
    assert_eq!("adaptive".parse::<Rule>().unwrap(), Rule::AdaptiveSubdivision);
    assert_eq!(Rule::TensorGaussLegendre.to_string().parse::<Rule>().unwrap(), Rule::TensorGaussLegendre);
    assert!("simpson".parse::<Rule>().is_err());
    for m in [Measure::Euclidean, Measure::Horizontal, Measure::Weighted] {
        assert_eq!(m.to_string().parse::<Measure>().unwrap(), m);
    }
}

#[test]
fn non_finite_integrands_are_reported() {
    let r = volume_integral(|_, _| f64::NAN, 1, &Domain::ball(1.0), &spec());
    assert!(matches!(r, Err(Error::InvalidInput(_))));
}

#[test]
fn unreachable_tolerance_is_an_accuracy_error() {
    // square-root kink in r inside every radial panel
    let tight = QuadratureSpec::new(Rule::TensorGaussLegendre, 2, 1e-13).unwrap();
    let r = volume_integral(|r, t| (r - 0.3).abs().sqrt() + t.abs(), 1, &Domain::ball(1.0), &tight);
    assert!(matches!(r, Err(Error::Accuracy { .. })), "{r:?}");
}

#[test]
fn euclidean_surface_area_of_the_n1_sphere() {
    // Pappus on a fine polyline of the profile r = (1 − t²)^{1/4}, rotated
    // about the t-axis.
    let m = 400_000;
    let point = |i: usize| {
        let th = PI * i as f64 / m as f64;
        (th.sin().max(0.0).sqrt(), th.cos())
    };
    let mut reference = 0.0;
    let mut prev = point(0);
    for i in 1..=m {
        let next = point(i);
        let len = ((next.0 - prev.0).powi(2) + (next.1 - prev.1).powi(2)).sqrt();
        reference += 2.0 * PI * 0.5 * (prev.0 + next.0) * len;
        prev = next;
    }
    let area = surface_integral(|_, _| 1.0, 1, 1.0, Measure::Euclidean, &spec()).unwrap().value;
    assert!((area - reference).abs() < 1e-7 * reference, "{area} vs {reference}");
}

#[test]
fn horizontal_flux_of_the_gauge_gradient() {
    // Divergence theorem: ∫_B Δ_H ρ = ∫_{∂B} |D_H ρ|²/|Dρ| dσ, with
    // Δ_H ρ = (Q − 1)|x|²/ρ³.
    for n in 1..=3 {
        let q = (2 * n + 2) as f64;
        for radius in [0.5, 1.0, 2.0] {
            let solid = volume_integral(
                |r, t| (q - 1.0) * r * r / (r.powi(4) + t * t).powf(0.75),
                n,
                &Domain::ball(radius),
                &spec(),
            )
            .unwrap()
            .value;
            let flux = surface_integral(|_, _| 1.0, n, radius, Measure::Weighted, &spec()).unwrap().value;
            assert!((solid - flux).abs() < 1e-11 * flux, "n = {n}, R = {radius}");
        }
    }
}

#[test]
fn beta_calibration() {
    for n in 1..=3 {
        let c = calibrate_beta(n, 1.0, &spec()).unwrap();
        assert!(c.residual <= 1e-8);
        let c2 = calibrate_beta(n, 0.3, &spec()).unwrap();
        assert!((c.beta_hat - c2.beta_hat).abs() <= 1e-12 * c.beta_hat);
    }
    assert!(calibrate_beta(0, 1.0, &spec()).is_err());
    assert!(calibrate_beta(1, -1.0, &spec()).is_err());
}

#[test]
fn mean_value_formulas() {
    let one = FnField::new("one", |c: &[Jet]| Ok(Jet::constant(1.0, c.len(), c[0].order())));
    for n in 1..=2 {
        let r = mean_value_check(&one, n, 1.0, &spec()).unwrap();
        assert!((r.solid_avg - 1.0).abs() < 1e-12 && (r.surface_avg - 1.0).abs() < 1e-6);

        let t = mean_value_check(&Coordinate(2 * n), n, 0.8, &spec()).unwrap();
        assert!(t.solid_avg.abs() < 1e-12 && t.surface_avg.abs() < 1e-12);

        let q = (2 * n + 2) as f64;
        let pole = TranslatedGaugePower {
            center: GroupPoint::new(vec![0.0; 2 * n], 2.0).unwrap(),
            exponent: 2.0 - q,
        };
        let r = mean_value_check(&pole, n, 1.0, &spec()).unwrap();
        assert!((r.solid_avg - r.pointwise).abs() <= 1e-5 * r.pointwise.abs());
        assert!((r.surface_avg - r.pointwise).abs() <= 1e-5 * r.pointwise.abs());
    }
}

#[test]
fn mean_value_rejects_non_harmonic_or_non_symmetric_fields() {
    let square = FnField::new("t^2", |c: &[Jet]| {
        let t = c.last().unwrap();
        Ok(t * t)
    });
    assert!(matches!(mean_value_check(&square, 1, 1.0, &spec()), Err(Error::InvalidInput(_))));
    // x_1 is harmonic but not cylindrically symmetric
    assert!(mean_value_check(&Coordinate(0), 1, 1.0, &spec()).is_err());
}

#[test]
fn analytic_pohozaev_and_average_identities() {
    for n in 1..=2 {
        for alpha in [0.5, 2.0, 3.0, 4.0] {
            for radius in [0.7, 1.0] {
                let p = pohozaev_check(alpha, n, radius, USource::Analytic, &spec()).unwrap();
                assert!(p.residual <= 1e-8, "{p:?}");
                assert_eq!(p.sub_identities.len(), 3);
                for s in &p.sub_identities {
                    assert!(s.residual <= 1e-8, "{}: {}", s.name, s.residual);
                }
                let a = average_identity_check(alpha, n, radius, USource::Analytic, &spec()).unwrap();
                assert!(a.residual <= 1e-10, "{a:?}");
                assert!((a.boundary_constant - radius.powf(alpha)).abs() < 1e-14);
            }
        }
    }
    assert!(pohozaev_check(0.0, 1, 1.0, USource::Analytic, &spec()).is_err());
    assert!(pohozaev_check(2.0, 0, 1.0, USource::Analytic, &spec()).is_err());
    assert!(average_identity_check(4.5, 1, 1.0, USource::Analytic, &spec()).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn odd_in_t_integrands_vanish(
        n in 1usize..=3,
        a in -2.0..2.0f64,
        b in -2.0..2.0f64,
        k in 1i32..4,
        radius in 0.3..2.0f64,
    ) {
        let f = move |r: f64, t: f64| t.powi(2 * k - 1) * (a * r * r + b * t * t).exp();
        let even = move |r: f64, t: f64| t.abs().powi(2 * k - 1) * (a * r * r + b * t * t).exp();
        let dom = Domain::ball(radius);
        let odd = volume_integral(f, n, &dom, &spec()).unwrap().value;
        let mass = volume_integral(even, n, &dom, &QuadratureSpec::new(Rule::TensorGaussLegendre, 16, 1e-10).unwrap()).unwrap().value;
        prop_assert!(odd.abs() <= 1e-12 * mass, "{odd} vs {mass}");
    }

    #[test]
    fn beta_is_radius_independent(n in 1usize..=3, radius in 0.1..5.0f64) {
        let c = calibrate_beta(n, radius, &spec()).unwrap();
        prop_assert!(c.residual <= 1e-8);
        let unit = calibrate_beta(n, 1.0, &spec()).unwrap();
        prop_assert!((c.beta_hat - unit.beta_hat).abs() <= 1e-10 * unit.beta_hat);
    }
}
