use super::point::{ReducedField, ReducedPoint};
use crate::calculus::{Jet, ScalarField};
use crate::error::{Error, Result};

const SYMMETRY_TOL: f64 = 1e-10;

/// Block rotation angles of the second representative.
fn angle(j: usize) -> f64 {
    0.7 + 0.45 * j as f64
}

/// Jet of `U(s, t)` for a toric-symmetric full-space field `f`, obtained by
/// seeding `x_j = √s_j`, `x_{n+j} = 0` and re-checked against a second,
/// block-rotated representative.
pub fn lift_to_reduced(f: &dyn ScalarField, p: &ReducedPoint, order: usize) -> Result<Jet> {
    let n = p.n();
    if p.s().iter().any(|&s| s == 0.0) {
        return Err(Error::invalid("lifting needs every s_j > 0 (√s_j is not smooth at 0)"));
    }
    let seeds = Jet::seeds(&p.coords(), order);
    let roots = seeds[..n].iter().map(Jet::sqrt).collect::<Result<Vec<_>>>()?;
    let t = seeds[n].clone();
    let zero = Jet::constant(0.0, n + 1, order);

    let mut plain: Vec<Jet> = roots.clone();
    plain.extend(std::iter::repeat_n(zero, n));
    plain.push(t.clone());

    let mut rotated: Vec<Jet> = roots.iter().enumerate().map(|(j, r)| r * angle(j).cos()).collect();
    rotated.extend(roots.iter().enumerate().map(|(j, r)| r * angle(j).sin()));
    rotated.push(t);

    let a = f.eval(&plain)?;
    let b = f.eval(&rotated)?;
    let diff = a.max_abs_diff(&b);
    if diff > SYMMETRY_TOL * a.max_abs().max(1.0) {
        return Err(Error::SymmetryViolation { max_diff: diff });
    }
    Ok(a)
}

/// A full-space toric field viewed as a [`ReducedField`] through
/// [`lift_to_reduced`]'s representative.
pub struct Lifted<F: ScalarField>(pub F);

impl<F: ScalarField> ReducedField for Lifted<F> {
    fn name(&self) -> String {
        format!("lift({})", self.0.name())
    }

    fn eval(&self, s: &[Jet], t: &Jet) -> Result<Jet> {
        let n = s.len();
        let mut coords = s.iter().map(Jet::sqrt).collect::<Result<Vec<_>>>()?;
        coords.extend(std::iter::repeat_n(Jet::constant(0.0, t.num_vars(), t.order()), n));
        coords.push(t.clone());
        self.0.eval(&coords)
    }
}

/// `𝓛U = σU_tt + Σ_j (s_j U_jj + U_j)`, which equals `¼ Δ_H u`.
pub fn reduced_operator(u: &Jet, p: &ReducedPoint) -> Result<f64> {
    if u.order() < 2 {
        return Err(Error::invalid("reduced operator needs a jet of order >= 2"));
    }
    let n = p.n();
    let mut out = p.sigma() * u.d2(n, n);
    for (j, s) in p.s().iter().enumerate() {
        out += s * u.d2(j, j) + u.d1(j);
    }
    Ok(out)
}
