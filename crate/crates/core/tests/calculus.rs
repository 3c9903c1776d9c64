use heis_overdet::calculus::{
    candidate_u, dilate, field_value, gauge, group_inv, group_mul, horizontal_gradient, rel_err,
    sublaplacian, sublaplacian_composed, t_derivative, weight_f, z_field, Coordinate, Dilated,
    FnField, Gauge, GaugePower, GroupPoint, Jet, ScalarField, TranslatedGaugePower, WeightF,
};
use heis_overdet::Error;
use proptest::prelude::*;
use std::sync::Arc;

// Hand-derived values. With X_j = ∂_j + 2(Jx)_j ∂_t and (Jx) = (−x_{n+j}, x_j):
//   Δ_H |x|² = 4n,  Δ_H t = 0,  Δ_H t² = 8|x|²,  X t = 2Jx.

fn pt(x: &[f64], t: f64) -> GroupPoint {
    GroupPoint::new(x.to_vec(), t).unwrap()
}

struct XNormSq;

impl ScalarField for XNormSq {
    fn name(&self) -> String {
        "|x|^2".into()
    }

    fn eval(&self, c: &[Jet]) -> heis_overdet::Result<Jet> {
        let (_, x) = c.split_last().unwrap();
        Ok(x.iter().map(|v| v * v).reduce(|a, b| a + b).unwrap())
    }
}

struct TSquared;

impl ScalarField for TSquared {
    fn name(&self) -> String {
        "t^2".into()
    }

    fn eval(&self, c: &[Jet]) -> heis_overdet::Result<Jet> {
        let t = c.last().unwrap();
        Ok(t * t)
    }
}

#[test]
fn sublaplacian_of_quadratics() {
    for n in 1..=3 {
        let x: Vec<f64> = (0..2 * n).map(|k| 0.3 + 0.1 * k as f64).collect();
        let a = pt(&x, -0.7);
        let r2: f64 = x.iter().map(|v| v * v).sum();
        assert!((sublaplacian(&XNormSq, &a).unwrap() - 4.0 * n as f64).abs() < 1e-13);
        assert!((sublaplacian(&TSquared, &a).unwrap() - 8.0 * r2).abs() < 1e-13);
        assert_eq!(sublaplacian(&Coordinate(2 * n), &a).unwrap(), 0.0);
    }
}

#[test]
fn horizontal_gradient_of_t_is_twice_jx() {
    let a = pt(&[1.0, -2.0, 0.5, 3.0], 0.25);
    let g = horizontal_gradient(&Coordinate(4), &a).unwrap();
    assert_eq!(g, vec![-1.0, -6.0, 2.0, -4.0]);
    assert_eq!(t_derivative(&Coordinate(4), &a).unwrap(), 1.0);
}

#[test]
fn polynomial_torsion_function_at_alpha_four() {
    // u_4 = (|x|⁴ + t² − 1)/4, Δ_H u_4 = (Q + 2)|x|²
    for n in 1..=4 {
        let x: Vec<f64> = (0..2 * n).map(|k| (k as f64 - 1.3) * 0.4).collect();
        let a = pt(&x, 0.9);
        let u = candidate_u(4.0, 1.0).unwrap();
        let q = (2 * n + 2) as f64;
        let expected = (q + 2.0) * a.x_norm_sq();
        assert!(rel_err(sublaplacian(&u, &a).unwrap(), expected) < 1e-13);
        assert_eq!(weight_f(4.0, &a).unwrap(), a.x_norm_sq());
    }
}

#[test]
fn gauge_gradient_norm_matches_closed_form() {
    let a = pt(&[0.4, -1.1], 2.0);
    let g = horizontal_gradient(&Gauge, &a).unwrap();
    let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
    assert!(rel_err(norm, a.x_norm_sq().sqrt() / gauge(&a)) < 1e-14);
}

#[test]
fn fundamental_solution_is_harmonic_off_the_origin() {
    for n in 1..=3 {
        let q = (2 * n + 2) as f64;
        let x: Vec<f64> = (0..2 * n).map(|k| 0.2 * k as f64 - 0.35).collect();
        let a = pt(&x, 0.6);
        let lap = sublaplacian(&GaugePower(2.0 - q), &a).unwrap();
        assert!(lap.abs() < 1e-10 * gauge(&a).powf(-q), "n = {n}: {lap}");
    }
}

#[test]
fn composed_and_coefficient_sublaplacians_agree() {
    let f = FnField::new("mix", |c: &[Jet]| {
        let (t, x) = c.split_last().unwrap();
        Ok((&x[0] * t).exp() + &x[1] * &x[1] * t)
    });
    let a = pt(&[0.3, 0.8], -0.4);
    let l1 = sublaplacian(&f, &a).unwrap();
    let l2 = sublaplacian_composed(&f, &a).unwrap();
    assert!(rel_err(l1, l2) < 1e-13);
}

#[test]
fn weight_and_gauge_are_singular_at_the_origin() {
    let o = GroupPoint::origin(2);
    assert!(matches!(weight_f(2.0, &o), Err(Error::SingularPoint(_))));
    assert!(matches!(sublaplacian(&Gauge, &o), Err(Error::SingularPoint(_))));
    assert!(matches!(candidate_u(0.0, 1.0), Err(Error::InvalidInput(_))));
    assert!(matches!(weight_f(4.5, &pt(&[1.0, 0.0], 0.0)), Err(Error::InvalidInput(_))));
    assert!(GroupPoint::new(vec![1.0, 2.0, 3.0], 0.0).is_err());
}

#[test]
fn z_generates_dilations() {
    let a = pt(&[0.7, -0.2, 1.1, 0.3], -1.5);
    assert!(rel_err(z_field(&Gauge, &a).unwrap(), gauge(&a)) < 1e-14);
    for alpha in [0.5, 2.0, 3.9] {
        let zf = z_field(&WeightF { alpha }, &a).unwrap();
        assert!(rel_err(zf, (alpha - 2.0) * weight_f(alpha, &a).unwrap()) < 1e-12);
    }
}

fn coords(n: usize) -> impl Strategy<Value = GroupPoint> {
    (prop::collection::vec(-3.0..3.0f64, 2 * n), -3.0..3.0f64)
        .prop_map(|(x, t)| GroupPoint::new(x, t).unwrap())
}

fn close(a: &GroupPoint, b: &GroupPoint, tol: f64) -> bool {
    a.coords().iter().zip(b.coords()).all(|(u, v)| (u - v).abs() <= tol * (1.0 + u.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn group_law_is_associative(a in coords(2), b in coords(2), c in coords(2)) {
        let l = group_mul(&group_mul(&a, &b).unwrap(), &c).unwrap();
        let r = group_mul(&a, &group_mul(&b, &c).unwrap()).unwrap();
        prop_assert!(close(&l, &r, 1e-12));
    }

    #[test]
    fn inverse_cancels(a in coords(3)) {
        let e = group_mul(&a, &group_inv(&a)).unwrap();
        prop_assert!(e.coords().iter().all(|v| v.abs() < 1e-12));
        let e = group_mul(&group_inv(&a), &a).unwrap();
        prop_assert!(e.coords().iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn dilation_is_a_homomorphism(a in coords(2), b in coords(2), lambda in 0.1..4.0f64) {
        let l = dilate(lambda, &group_mul(&a, &b).unwrap()).unwrap();
        let r = group_mul(&dilate(lambda, &a).unwrap(), &dilate(lambda, &b).unwrap()).unwrap();
        prop_assert!(close(&l, &r, 1e-12));
    }

    #[test]
    fn gauge_is_homogeneous_and_symmetric(a in coords(2), lambda in 0.1..4.0f64) {
        let rho = gauge(&a);
        prop_assert!((gauge(&dilate(lambda, &a).unwrap()) - lambda * rho).abs() <= 1e-13 * (1.0 + lambda * rho));
        prop_assert!((gauge(&group_inv(&a)) - rho).abs() <= 1e-15 * (1.0 + rho));
    }

    #[test]
    fn sublaplacian_is_left_invariant(c in coords(1), a in coords(1), p in -1.5..2.5f64) {
        // f(ξ) = ρ(c⁻¹∘ξ)^p, so Δ_H f(ξ) = (Δ_H ρ^p)(c⁻¹∘ξ)
        let shifted = group_mul(&group_inv(&c), &a).unwrap();
        prop_assume!(gauge(&shifted) > 0.2);
        let f = TranslatedGaugePower { center: c.clone(), exponent: p };
        let lhs = sublaplacian(&f, &a).unwrap();
        let rhs = sublaplacian(&GaugePower(p), &shifted).unwrap();
        let scale = gauge(&shifted).powf(p - 2.0);
        prop_assert!((lhs - rhs).abs() <= 1e-9 * scale, "{lhs} vs {rhs}");
    }

    #[test]
    fn sublaplacian_scales_under_dilation(a in coords(2), lambda in 0.2..3.0f64, alpha in 0.5..4.0f64) {
        prop_assume!(a.x_norm_sq() > 1e-2);
        let u: Arc<dyn ScalarField> = Arc::new(candidate_u(alpha, 1.0).unwrap());
        let d = Dilated { inner: u.clone(), lambda };
        let da = dilate(lambda, &a).unwrap();
        let lhs = sublaplacian(&d, &a).unwrap();
        let rhs = lambda * lambda * sublaplacian(u.as_ref(), &da).unwrap();
        prop_assert!(rel_err(lhs, rhs) < 1e-10);
        prop_assert!(rel_err(field_value(&d, &a).unwrap(), field_value(u.as_ref(), &da).unwrap()) < 1e-14);
    }
}
