//! Tensor Gauss–Legendre and adaptive subdivision over boxes in one or two
//! dimensions. Boxes are processed in parallel and summed in index order, so
//! results do not depend on the thread count.

use super::gauss::{gauss_legendre, GaussRule};
use super::{QuadratureSpec, Rule};
use crate::error::{Error, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub const MAX_NODES: usize = 512;
const MAX_DEPTH: usize = 30;
/// Local differences below this fraction of `tol · ∫|f|` are accepted as noise.
const NEGLIGIBLE: f64 = 1e-6;

/// A quadrature result. `magnitude` is the integral of `|f|`, the scale the
/// relative tolerance is measured against.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub magnitude: f64,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Cell<const D: usize> {
    pub lo: [f64; D],
    pub hi: [f64; D],
}

#[derive(Debug, Clone, Copy, Default)]
struct Sum {
    value: f64,
    magnitude: f64,
}

impl std::ops::Add for Sum {
    type Output = Sum;
    fn add(self, o: Sum) -> Sum {
        Sum { value: self.value + o.value, magnitude: self.magnitude + o.magnitude }
    }
}

fn tensor<const D: usize, G: Fn([f64; D]) -> f64>(cell: &Cell<D>, rule: &GaussRule, g: &G) -> Sum {
    let m = rule.nodes.len();
    let mut sum = Sum::default();
    let mut idx = [0usize; D];
    loop {
        let mut x = [0.0; D];
        let mut w = 1.0;
        for d in 0..D {
            let mid = 0.5 * (cell.lo[d] + cell.hi[d]);
            let half = 0.5 * (cell.hi[d] - cell.lo[d]);
            x[d] = mid + half * rule.nodes[idx[d]];
            w *= half * rule.weights[idx[d]];
        }
        let v = w * g(x);
        sum.value += v;
        sum.magnitude += v.abs();
        let mut d = 0;
        while d < D {
            idx[d] += 1;
            if idx[d] < m {
                break;
            }
            idx[d] = 0;
            d += 1;
        }
        if d == D {
            return sum;
        }
    }
}

fn children<const D: usize>(cell: &Cell<D>) -> Vec<Cell<D>> {
    let mut out = Vec::with_capacity(1 << D);
    for mask in 0..(1usize << D) {
        let mut c = *cell;
        for d in 0..D {
            let mid = 0.5 * (cell.lo[d] + cell.hi[d]);
            if mask >> d & 1 == 0 {
                c.hi[d] = mid;
            } else {
                c.lo[d] = mid;
            }
        }
        out.push(c);
    }
    out
}

fn check_finite(s: Sum) -> Result<Sum> {
    if s.value.is_finite() && s.magnitude.is_finite() {
        Ok(s)
    } else {
        Err(Error::invalid("integrand is not finite at a quadrature node"))
    }
}

fn all_cells<const D: usize, G>(cells: &[Cell<D>], rule: &GaussRule, g: &G) -> Result<Sum>
where
    G: Fn([f64; D]) -> f64 + Sync,
{
    let parts: Vec<Sum> = cells.par_iter().map(|c| tensor(c, rule, g)).collect();
    check_finite(parts.into_iter().fold(Sum::default(), |a, b| a + b))
}

pub(crate) fn integrate<const D: usize, G>(
    cells: &[Cell<D>],
    g: &G,
    spec: &QuadratureSpec,
) -> Result<Estimate>
where
    G: Fn([f64; D]) -> f64 + Sync,
{
    spec.validate()?;
    match spec.rule {
        Rule::TensorGaussLegendre => tensor_doubling(cells, g, spec),
        Rule::AdaptiveSubdivision => adaptive(cells, g, spec),
    }
}

fn tensor_doubling<const D: usize, G>(cells: &[Cell<D>], g: &G, spec: &QuadratureSpec) -> Result<Estimate>
where
    G: Fn([f64; D]) -> f64 + Sync,
{
    let mut m = spec.nodes;
    let mut prev = all_cells(cells, &gauss_legendre(m), g)?;
    loop {
        m *= 2;
        let cur = all_cells(cells, &gauss_legendre(m), g)?;
        let error = (cur.value - prev.value).abs();
        if error <= spec.target_rel_tol * cur.magnitude {
            return Ok(Estimate { value: cur.value, error, magnitude: cur.magnitude });
        }
        if m * 2 > MAX_NODES {
            return Err(Error::Accuracy { best: cur.value, estimate: error });
        }
        prev = cur;
    }
}

struct Leaf {
    sum: Sum,
    error: f64,
    converged: bool,
}

fn adaptive<const D: usize, G>(cells: &[Cell<D>], g: &G, spec: &QuadratureSpec) -> Result<Estimate>
where
    G: Fn([f64; D]) -> f64 + Sync,
{
    let rule = gauss_legendre(spec.nodes);
    let coarse: Vec<Sum> = cells.par_iter().map(|c| tensor(c, &rule, g)).collect();
    let total = check_finite(coarse.iter().fold(Sum::default(), |a, &b| a + b))?;
    let floor = NEGLIGIBLE * spec.target_rel_tol * total.magnitude;
    let leaves: Vec<Leaf> = cells
        .par_iter()
        .zip(coarse.par_iter())
        .map(|(c, &whole)| refine(c, whole, g, &rule, spec.target_rel_tol, floor, 0))
        .collect();
    let mut sum = Sum::default();
    let mut error = 0.0;
    let mut converged = true;
    for leaf in leaves {
        sum = sum + leaf.sum;
        error += leaf.error;
        converged &= leaf.converged;
    }
    let sum = check_finite(sum)?;
    if !converged || error > spec.target_rel_tol * sum.magnitude {
        return Err(Error::Accuracy { best: sum.value, estimate: error });
    }
    Ok(Estimate { value: sum.value, error, magnitude: sum.magnitude })
}

fn refine<const D: usize, G>(
    cell: &Cell<D>,
    whole: Sum,
    g: &G,
    rule: &GaussRule,
    tol: f64,
    floor: f64,
    depth: usize,
) -> Leaf
where
    G: Fn([f64; D]) -> f64,
{
    let kids = children(cell);
    let sums: Vec<Sum> = kids.iter().map(|k| tensor(k, rule, g)).collect();
    let split = sums.iter().fold(Sum::default(), |a, &b| a + b);
    let diff = (split.value - whole.value).abs();
    if diff <= tol * split.magnitude || diff <= floor {
        return Leaf { sum: split, error: diff, converged: true };
    }
    if depth >= MAX_DEPTH || !diff.is_finite() {
        return Leaf { sum: split, error: diff, converged: false };
    }
    let mut out = Leaf { sum: Sum::default(), error: 0.0, converged: true };
    for (k, s) in kids.iter().zip(sums) {
        let leaf = refine(k, s, g, rule, tol, floor, depth + 1);
        out.sum = out.sum + leaf.sum;
        out.error += leaf.error;
        out.converged &= leaf.converged;
    }
    out
}
