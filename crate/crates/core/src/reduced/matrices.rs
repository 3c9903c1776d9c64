use super::lift::reduced_operator;
use super::point::ReducedPoint;
use crate::calculus::Jet;
use crate::error::{Error, Result};
use nalgebra::DMatrix;

/// The symmetric `(n+1)×(n+1)` matrices built from the first and second
/// derivatives of `U`, with `M = D2 − D1`.
#[derive(Debug, Clone)]
pub struct MatrixBundle {
    pub n: usize,
    pub d2: DMatrix<f64>,
    pub e1: DMatrix<f64>,
    pub e2: DMatrix<f64>,
    pub d1: DMatrix<f64>,
    pub m: DMatrix<f64>,
    pub trace_m_direct: f64,
    pub trace_m_formula: f64,
}

/// First and second derivatives of `U` at a reduced point.
pub(crate) struct Derivs {
    pub uj: Vec<f64>,
    pub ut: f64,
    pub ujk: DMatrix<f64>,
    pub ujt: Vec<f64>,
    pub utt: f64,
}

impl Derivs {
    pub fn first(u: &Jet, n: usize) -> (Vec<f64>, f64) {
        ((0..n).map(|j| u.d1(j)).collect(), u.d1(n))
    }

    pub fn from_jet(u: &Jet, n: usize) -> Derivs {
        let (uj, ut) = Derivs::first(u, n);
        Derivs {
            uj,
            ut,
            ujk: DMatrix::from_fn(n, n, |i, j| u.d2(i, j)),
            ujt: (0..n).map(|j| u.d2(j, n)).collect(),
            utt: u.d2(n, n),
        }
    }
}

pub(crate) fn check_jet(u: &Jet, p: &ReducedPoint, min_order: usize) -> Result<()> {
    if u.num_vars() != p.n() + 1 {
        return Err(Error::invalid(format!(
            "jet has {} variables, reduced point needs {}",
            u.num_vars(),
            p.n() + 1
        )));
    }
    if u.order() < min_order {
        return Err(Error::invalid(format!("jet order {} < {min_order}", u.order())));
    }
    Ok(())
}

/// `(2σ/P)·(α−4)/4`, the weight of `E2` inside `D1`.
pub(crate) fn e2_weight(p: &ReducedPoint, alpha: f64) -> f64 {
    2.0 * p.sigma() / p.gauge4() * (alpha - 4.0) / 4.0
}

pub fn build_matrix_bundle(u: &Jet, p: &ReducedPoint, alpha: f64) -> Result<MatrixBundle> {
    check_jet(u, p, 2)?;
    p.require_off_axis()?;
    let n = p.n();
    let s = p.s();
    let sigma = p.sigma();
    let t = p.t();
    let d = Derivs::from_jet(u, n);

    let mut d2 = DMatrix::zeros(n + 1, n + 1);
    let mut e1 = DMatrix::zeros(n + 1, n + 1);
    let mut e2 = DMatrix::zeros(n + 1, n + 1);
    for i in 0..n {
        for j in 0..=i {
            let root = (s[i] * s[j]).sqrt();
            let avg = (d.uj[i] + d.uj[j]) / 2.0;
            let diag = if i == j { d.uj[i] / 2.0 } else { 0.0 };
            d2[(i, j)] = root * d.ujk[(i, j)];
            e1[(i, j)] = root / sigma * avg - diag;
            e2[(i, j)] = root * avg;
            d2[(j, i)] = d2[(i, j)];
            e1[(j, i)] = e1[(i, j)];
            e2[(j, i)] = e2[(i, j)];
        }
        d2[(i, n)] = (s[i] * sigma).sqrt() * d.ujt[i];
        e2[(i, n)] = (s[i] / sigma).sqrt() * (sigma * d.ut + t * d.uj[i]) / 2.0;
        d2[(n, i)] = d2[(i, n)];
        e2[(n, i)] = e2[(i, n)];
    }
    d2[(n, n)] = sigma * d.utt;
    e1[(n, n)] = s.iter().zip(&d.uj).map(|(sj, uj)| sj * uj).sum::<f64>() / (2.0 * sigma);
    e2[(n, n)] = t * d.ut;

    let k = e2_weight(p, alpha);
    let d1 = &e1 + &e2 * k;
    let m = &d2 - &d1;
    let trace_m_direct = m.trace();
    let trace_m_formula = trace_formula(u, p, alpha)?;
    Ok(MatrixBundle { n, d2, e1, e2, d1, m, trace_m_direct, trace_m_formula })
}

/// `tr M = 𝓛U + Σ_j U_j(−½ − (3/2)s_j/σ − (2σs_j/P)(α−4)/4) − (2σt/P)((α−4)/4)U_t`.
fn trace_formula(u: &Jet, p: &ReducedPoint, alpha: f64) -> Result<f64> {
    let n = p.n();
    let sigma = p.sigma();
    let big_p = p.gauge4();
    let a4 = (alpha - 4.0) / 4.0;
    let (uj, ut) = Derivs::first(u, n);
    let mut out = reduced_operator(u, p)?;
    for (sj, uj) in p.s().iter().zip(&uj) {
        out += uj * (-0.5 - 1.5 * sj / sigma - 2.0 * sigma * sj / big_p * a4);
    }
    out -= 2.0 * sigma * p.t() / big_p * a4 * ut;
    Ok(out)
}

/// `‖M‖² − (tr M)²/(n+1)` for a square matrix of size `n+1`.
pub fn frobenius_deficit(m: &DMatrix<f64>) -> f64 {
    let tr = m.trace();
    m.norm_squared() - tr * tr / m.nrows() as f64
}
