//! Truncated multivariate Taylor arithmetic.
//!
//! A [`Jet`] stores the normalized Taylor coefficients `∂^k f / k!` for every
//! multi-index `k` with `|k| ≤ order`, in graded-lexicographic order. Since the
//! layout is graded, the coefficients of a lower-order truncation are a prefix
//! of the higher-order array, which makes truncation and differentiation cheap.

use crate::error::{Error, Result};
use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

pub const MAX_ORDER: usize = 3;
pub const MAX_VARS: usize = 9;

/// Shared index tables for one `(num_vars, order)` pair.
pub struct Layout {
    num_vars: usize,
    order: usize,
    multi: Vec<Vec<u8>>,
    lookup: HashMap<Vec<u8>, usize>,
    /// `(i, j, k)`: coefficient `i` times coefficient `j` lands in slot `k`.
    products: Vec<(u32, u32, u32)>,
    /// For variable `v` and every slot `k` of the order-1-lower layout:
    /// source slot `k + e_v` and the factor `k_v + 1`.
    derivs: Vec<Vec<(u32, f64)>>,
    factorials: Vec<f64>,
}

impl Layout {
    fn build(num_vars: usize, order: usize) -> Layout {
        let mut multi = Vec::new();
        for degree in 0..=order {
            let mut current = vec![0u8; num_vars];
            push_degree(&mut multi, &mut current, 0, degree);
        }
        let lookup: HashMap<Vec<u8>, usize> =
            multi.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect();

        let mut products = Vec::new();
        for (i, a) in multi.iter().enumerate() {
            for (j, b) in multi.iter().enumerate() {
                let deg: usize = a.iter().chain(b.iter()).map(|&d| d as usize).sum();
                if deg > order {
                    continue;
                }
                let sum: Vec<u8> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                products.push((i as u32, j as u32, lookup[&sum] as u32));
            }
        }

        let lower_len = if order == 0 { 0 } else { count(num_vars, order - 1) };
        let derivs = (0..num_vars)
            .map(|v| {
                (0..lower_len)
                    .map(|k| {
                        let mut m = multi[k].clone();
                        let factor = f64::from(m[v]) + 1.0;
                        m[v] += 1;
                        (lookup[&m] as u32, factor)
                    })
                    .collect()
            })
            .collect();

        let factorials = multi
            .iter()
            .map(|m| m.iter().map(|&d| factorial(d as usize)).product())
            .collect();

        Layout { num_vars, order, multi, lookup, products, derivs, factorials }
    }

    pub fn len(&self) -> usize {
        self.multi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.multi.is_empty()
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn multi_index(&self, slot: usize) -> &[u8] {
        &self.multi[slot]
    }

    pub fn slot(&self, multi: &[u8]) -> Option<usize> {
        self.lookup.get(multi).copied()
    }
}

fn push_degree(out: &mut Vec<Vec<u8>>, current: &mut [u8], var: usize, remaining: usize) {
    if var + 1 == current.len() {
        current[var] = remaining as u8;
        out.push(current.to_vec());
        current[var] = 0;
        return;
    }
    for d in (0..=remaining).rev() {
        current[var] = d as u8;
        push_degree(out, current, var + 1, remaining - d);
    }
    current[var] = 0;
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

fn count(num_vars: usize, order: usize) -> usize {
    // C(num_vars + order, order)
    let mut c = 1usize;
    for i in 0..order {
        c = c * (num_vars + order - i) / (i + 1);
    }
    c
}

/// Returns the cached layout for `(num_vars, order)`.
pub fn layout(num_vars: usize, order: usize) -> Arc<Layout> {
    thread_local! {
        static LOCAL: std::cell::RefCell<HashMap<(usize, usize), Arc<Layout>>> =
            std::cell::RefCell::new(HashMap::new());
    }
    LOCAL.with(|local| {
        local
            .borrow_mut()
            .entry((num_vars, order))
            .or_insert_with(|| shared_layout(num_vars, order))
            .clone()
    })
}

fn shared_layout(num_vars: usize, order: usize) -> Arc<Layout> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, usize), Arc<Layout>>>> = OnceLock::new();
    assert!(
        (1..=MAX_VARS).contains(&num_vars) && order <= MAX_ORDER,
        "jet layout ({num_vars} vars, order {order}) out of range"
    );
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
    guard
        .entry((num_vars, order))
        .or_insert_with(|| Arc::new(Layout::build(num_vars, order)))
        .clone()
}

#[derive(Clone)]
pub struct Jet {
    layout: Arc<Layout>,
    coeffs: Vec<f64>,
}

impl fmt::Debug for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Jet")
            .field("num_vars", &self.num_vars())
            .field("order", &self.order())
            .field("coeffs", &self.coeffs)
            .finish()
    }
}

impl PartialEq for Jet {
    fn eq(&self, other: &Self) -> bool {
        self.num_vars() == other.num_vars()
            && self.order() == other.order()
            && self.coeffs == other.coeffs
    }
}

impl Jet {
    pub fn constant(value: f64, num_vars: usize, order: usize) -> Jet {
        let layout = layout(num_vars, order);
        let mut coeffs = vec![0.0; layout.len()];
        coeffs[0] = value;
        Jet { layout, coeffs }
    }

    /// The seed jet of coordinate `var` evaluated at `value`.
    pub fn variable(value: f64, var: usize, num_vars: usize, order: usize) -> Jet {
        assert!(var < num_vars);
        let mut jet = Jet::constant(value, num_vars, order);
        if order >= 1 {
            jet.coeffs[1 + var] = 1.0;
        }
        jet
    }

    /// Seed jets for every coordinate of `point`.
    pub fn seeds(point: &[f64], order: usize) -> Vec<Jet> {
        let d = point.len();
        point
            .iter()
            .enumerate()
            .map(|(v, &x)| Jet::variable(x, v, d, order))
            .collect()
    }

    /// Builds a jet from normalized Taylor coefficients in layout order.
    pub fn from_taylor(num_vars: usize, order: usize, coeffs: Vec<f64>) -> Result<Jet> {
        let layout = layout(num_vars, order);
        if coeffs.len() != layout.len() {
            return Err(Error::invalid(format!(
                "expected {} coefficients, got {}",
                layout.len(),
                coeffs.len()
            )));
        }
        Ok(Jet { layout, coeffs })
    }

    pub fn num_vars(&self) -> usize {
        self.layout.num_vars
    }

    pub fn order(&self) -> usize {
        self.layout.order
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    pub fn taylor(&self) -> &[f64] {
        &self.coeffs
    }

    /// The partial derivative `∂^multi f` (not normalized).
    pub fn derivative(&self, multi: &[u8]) -> f64 {
        match self.layout.slot(multi) {
            Some(k) => self.coeffs[k] * self.layout.factorials[k],
            None => panic!("multi-index {multi:?} not stored in this jet"),
        }
    }

    pub fn d1(&self, v: usize) -> f64 {
        self.derivative(&self.unit(&[v]))
    }

    pub fn d2(&self, v: usize, w: usize) -> f64 {
        self.derivative(&self.unit(&[v, w]))
    }

    pub fn d3(&self, u: usize, v: usize, w: usize) -> f64 {
        self.derivative(&self.unit(&[u, v, w]))
    }

    fn unit(&self, vars: &[usize]) -> Vec<u8> {
        let mut m = vec![0u8; self.num_vars()];
        for &v in vars {
            m[v] += 1;
        }
        m
    }

    /// Drops every coefficient above `order`.
    pub fn truncate(&self, order: usize) -> Jet {
        if order >= self.order() {
            return self.clone();
        }
        let layout = layout(self.num_vars(), order);
        let coeffs = self.coeffs[..layout.len()].to_vec();
        Jet { layout, coeffs }
    }

    /// The jet of `∂f/∂x_v`, one order lower.
    pub fn partial(&self, v: usize) -> Jet {
        assert!(self.order() >= 1, "cannot differentiate an order-0 jet");
        let layout = layout(self.num_vars(), self.order() - 1);
        let coeffs = self.layout.derivs[v]
            .iter()
            .map(|&(src, factor)| factor * self.coeffs[src as usize])
            .collect();
        Jet { layout, coeffs }
    }

    pub fn scale(&self, k: f64) -> Jet {
        Jet { layout: self.layout.clone(), coeffs: self.coeffs.iter().map(|c| c * k).collect() }
    }

    pub fn add_scalar(&self, k: f64) -> Jet {
        let mut out = self.clone();
        out.coeffs[0] += k;
        out
    }

    fn aligned<'a>(a: &'a Jet, b: &'a Jet) -> (std::borrow::Cow<'a, Jet>, std::borrow::Cow<'a, Jet>) {
        use std::borrow::Cow;
        assert_eq!(a.num_vars(), b.num_vars(), "jets over different variable sets");
        match a.order().cmp(&b.order()) {
            std::cmp::Ordering::Equal => (Cow::Borrowed(a), Cow::Borrowed(b)),
            std::cmp::Ordering::Less => (Cow::Borrowed(a), Cow::Owned(b.truncate(a.order()))),
            std::cmp::Ordering::Greater => (Cow::Owned(a.truncate(b.order())), Cow::Borrowed(b)),
        }
    }

    fn zip_with(&self, other: &Jet, f: impl Fn(f64, f64) -> f64) -> Jet {
        let (a, b) = Jet::aligned(self, other);
        let coeffs = a.coeffs.iter().zip(&b.coeffs).map(|(&x, &y)| f(x, y)).collect();
        Jet { layout: a.layout.clone(), coeffs }
    }

    fn product(&self, other: &Jet) -> Jet {
        let (a, b) = Jet::aligned(self, other);
        let mut coeffs = vec![0.0; a.layout.len()];
        for &(i, j, k) in &a.layout.products {
            coeffs[k as usize] += a.coeffs[i as usize] * b.coeffs[j as usize];
        }
        Jet { layout: a.layout.clone(), coeffs }
    }

    /// `g(self)` for a univariate `g` given its derivatives
    /// `g(a), g'(a), …, g^(order)(a)` at `a = self.value()`.
    pub fn compose(&self, derivs: &[f64]) -> Jet {
        let order = self.order();
        assert!(derivs.len() > order);
        let mut h = self.clone();
        h.coeffs[0] = 0.0;
        let mut out = Jet::constant(derivs[0], self.num_vars(), order);
        let mut power = h.clone();
        let mut fact = 1.0;
        for (m, &dm) in derivs.iter().enumerate().take(order + 1).skip(1) {
            fact *= m as f64;
            if m > 1 {
                power = power.product(&h);
            }
            let c = dm / fact;
            for (o, p) in out.coeffs.iter_mut().zip(&power.coeffs) {
                *o += c * p;
            }
        }
        out
    }

    pub fn recip(&self) -> Result<Jet> {
        let a = self.value();
        if a == 0.0 || !a.is_finite() {
            return Err(Error::SingularPoint(format!("reciprocal of jet with value {a}")));
        }
        let mut d = [0.0; MAX_ORDER + 1];
        let mut term = 1.0 / a;
        for (m, dm) in d.iter_mut().enumerate() {
            *dm = term;
            term *= -((m + 1) as f64) / a;
        }
        Ok(self.compose(&d))
    }

    pub fn div(&self, other: &Jet) -> Result<Jet> {
        Ok(self * &other.recip()?)
    }

    pub fn exp(&self) -> Jet {
        let e = self.value().exp();
        self.compose(&[e; MAX_ORDER + 1])
    }

    pub fn ln(&self) -> Result<Jet> {
        let a = self.value();
        if !(a > 0.0) {
            return Err(Error::SingularPoint(format!("logarithm of jet with value {a}")));
        }
        let mut d = [a.ln(), 0.0, 0.0, 0.0];
        let mut term = 1.0 / a;
        for (m, dm) in d.iter_mut().enumerate().skip(1) {
            *dm = term;
            term *= -(m as f64) / a;
        }
        Ok(self.compose(&d))
    }

    /// Real power, computed as `exp(p·ln(self))`. The base must be positive,
    /// except that a value-only jet with zero base and `p > 0` gives zero.
    pub fn powf(&self, p: f64) -> Result<Jet> {
        let a = self.value();
        if a == 0.0 && self.order() == 0 && p > 0.0 {
            return Ok(Jet::constant(0.0, self.num_vars(), 0));
        }
        if !(a > 0.0) {
            return Err(Error::SingularPoint(format!("power {p} of jet with value {a}")));
        }
        Ok(self.ln()?.scale(p).exp())
    }

    pub fn sqrt(&self) -> Result<Jet> {
        self.powf(0.5)
    }

    /// Integer power by repeated multiplication; valid at any base.
    pub fn powi(&self, k: u32) -> Jet {
        let mut out = Jet::constant(1.0, self.num_vars(), self.order());
        for _ in 0..k {
            out = out.product(self);
        }
        out
    }

    /// Largest coefficient difference between two jets of the same shape.
    pub fn max_abs_diff(&self, other: &Jet) -> f64 {
        let (a, b) = Jet::aligned(self, other);
        a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.abs()).fold(0.0, f64::max)
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $body:expr) => {
        impl $tr<&Jet> for &Jet {
            type Output = Jet;
            fn $method(self, rhs: &Jet) -> Jet {
                let f: fn(&Jet, &Jet) -> Jet = $body;
                f(self, rhs)
            }
        }
        impl $tr<Jet> for Jet {
            type Output = Jet;
            fn $method(self, rhs: Jet) -> Jet {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&Jet> for Jet {
            type Output = Jet;
            fn $method(self, rhs: &Jet) -> Jet {
                (&self).$method(rhs)
            }
        }
        impl $tr<Jet> for &Jet {
            type Output = Jet;
            fn $method(self, rhs: Jet) -> Jet {
                self.$method(&rhs)
            }
        }
    };
}

binop!(Add, add, |a, b| a.zip_with(b, |x, y| x + y));
binop!(Sub, sub, |a, b| a.zip_with(b, |x, y| x - y));
binop!(Mul, mul, |a, b| a.product(b));

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Mul<f64> for &Jet {
    type Output = Jet;
    fn mul(self, k: f64) -> Jet {
        self.scale(k)
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, k: f64) -> Jet {
        self.scale(k)
    }
}

impl Add<f64> for &Jet {
    type Output = Jet;
    fn add(self, k: f64) -> Jet {
        self.add_scalar(k)
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(self, k: f64) -> Jet {
        self.add_scalar(k)
    }
}

impl Sub<f64> for &Jet {
    type Output = Jet;
    fn sub(self, k: f64) -> Jet {
        self.add_scalar(-k)
    }
}

impl Sub<f64> for Jet {
    type Output = Jet;
    fn sub(self, k: f64) -> Jet {
        self.add_scalar(-k)
    }
}

/// Sum of jets; `None` for an empty iterator.
pub fn sum<'a>(jets: impl IntoIterator<Item = &'a Jet>) -> Option<Jet> {
    let mut it = jets.into_iter();
    let first = it.next()?.clone();
    Some(it.fold(first, |acc, j| acc + j))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout_sizes_match_binomials() {
        for d in 1..=MAX_VARS {
            for o in 0..=MAX_ORDER {
                assert_eq!(layout(d, o).len(), count(d, o));
            }
        }
    }

    #[test]
    fn lower_layout_is_a_prefix() {
        let hi = layout(4, 3);
        let lo = layout(4, 2);
        for k in 0..lo.len() {
            assert_eq!(hi.multi_index(k), lo.multi_index(k));
        }
    }

    #[test]
    fn integer_polynomial_derivatives_are_exact() {
        // f = x²y + 3y³ − 2xz at (1.5, -2, 0.25)
        let s = Jet::seeds(&[1.5, -2.0, 0.25], 3);
        let (x, y, z) = (&s[0], &s[1], &s[2]);
        let f = x * x * y + y.powi(3) * 3.0 - x * z * 2.0;
        assert_eq!(f.value(), 1.5 * 1.5 * -2.0 + 3.0 * -8.0 - 2.0 * 1.5 * 0.25);
        assert_eq!(f.d1(0), 2.0 * 1.5 * -2.0 - 2.0 * 0.25);
        assert_eq!(f.d1(1), 1.5 * 1.5 + 9.0 * 4.0);
        assert_eq!(f.d2(0, 1), 3.0);
        assert_eq!(f.d2(1, 1), 18.0 * -2.0);
        assert_eq!(f.d2(0, 2), -2.0);
        assert_eq!(f.d3(0, 0, 1), 2.0);
        assert_eq!(f.d3(1, 1, 1), 18.0);
        assert_eq!(f.d3(0, 1, 2), 0.0);
    }

    #[test]
    fn partial_matches_derivative_values() {
        let s = Jet::seeds(&[0.7, 1.3], 3);
        let f = (&s[0] * &s[1]).exp() + s[1].powf(2.5).unwrap();
        let fx = f.partial(0);
        assert_eq!(fx.order(), 2);
        assert!((fx.value() - f.d1(0)).abs() < 1e-14);
        assert!((fx.d1(1) - f.d2(0, 1)).abs() < 1e-13);
        assert!((fx.d2(1, 1) - f.d3(0, 1, 1)).abs() < 1e-12);
    }

    #[test]
    fn powf_of_univariate() {
        let x = Jet::variable(2.0, 0, 1, 3);
        let p = x.powf(1.5).unwrap();
        let a: f64 = 2.0;
        assert!((p.value() - a.powf(1.5)).abs() < 1e-15);
        assert!((p.d1(0) - 1.5 * a.powf(0.5)).abs() < 1e-14);
        assert!((p.d2(0, 0) - 0.75 * a.powf(-0.5)).abs() < 1e-14);
        assert!((p.d3(0, 0, 0) + 0.375 * a.powf(-1.5)).abs() < 1e-14);
    }

    #[test]
    fn nonpositive_base_is_rejected() {
        let x = Jet::variable(0.0, 0, 1, 2);
        assert!(matches!(x.powf(0.25), Err(Error::SingularPoint(_))));
        assert!(Jet::variable(-1.0, 0, 1, 2).sqrt().is_err());
        assert_eq!(Jet::constant(0.0, 1, 0).powf(0.5).unwrap().value(), 0.0);
    }

    #[test]
    fn mixed_order_arithmetic_truncates() {
        let a = Jet::variable(1.0, 0, 2, 3);
        let b = Jet::variable(2.0, 1, 2, 1);
        assert_eq!((&a * &b).order(), 1);
    }
}
