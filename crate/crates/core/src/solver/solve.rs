use super::banded::{max_abs, residual, BandedLu};
use super::grid::Grid;
use super::interp::Interpolant;
use super::stencil::{apply, stencil, Target};
use crate::error::{Error, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::sync::OnceLock;

/// Required relative residual `‖b − AW‖∞ / ‖b‖∞` of the linear solve.
pub const SOLVER_TOL: f64 = 1e-10;
const REFINEMENT_STEPS: usize = 3;
/// Nodes within this fraction of `R²` of the reduced origin use the
/// singular-part source (see [`singular_part`]).
pub const CORRECTION_RADIUS: f64 = 0.25;

/// `((2n+α)/4) P^{(α−4)/4}` with `P = σ² + t²`.
pub fn source(n: usize, alpha: f64, sigma: f64, t: f64) -> f64 {
    (2.0 * n as f64 + alpha) / 4.0 * (sigma * sigma + t * t).powf((alpha - 4.0) / 4.0)
}

/// `S = P^{α/4}/α`, a particular solution of the reduced equation on all of
/// the half-plane. Near the origin the discrete source is the stencil applied
/// to `S`, which replaces the unbounded point values of the source for
/// `α < 4` by their local average.
pub fn singular_part(alpha: f64, sigma: f64, t: f64) -> f64 {
    (sigma * sigma + t * t).powf(alpha / 4.0) / alpha
}

/// `(∂_σ S, ∂_t S)`, taken as zero at the origin.
pub fn singular_gradient(alpha: f64, sigma: f64, t: f64) -> (f64, f64) {
    let p = sigma * sigma + t * t;
    if p == 0.0 {
        return (0.0, 0.0);
    }
    let k = p.powf(alpha / 4.0 - 1.0) / 2.0;
    (k * sigma, k * t)
}

/// `v = 4P^{(4−α)/4}(W_σ² + W_t²) − αW`.
pub fn pfunction_value(alpha: f64, sigma: f64, t: f64, w: f64, w_sigma: f64, w_t: f64) -> f64 {
    let p = sigma * sigma + t * t;
    4.0 * p.powf((4.0 - alpha) / 4.0) * (w_sigma * w_sigma + w_t * w_t) - alpha * w
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Solved,
    /// Node values copied from a known function, no solve.
    Injected,
}

#[derive(Debug)]
pub struct GridSolution {
    grid: Grid,
    alpha: f64,
    n: usize,
    w: Vec<f64>,
    residual: f64,
    provenance: Provenance,
    interpolant: OnceLock<Interpolant>,
}

pub(crate) fn check_params(alpha: f64, n: usize) -> Result<()> {
    if !(2.0..=4.0).contains(&alpha) {
        return Err(Error::invalid(format!("the solver needs alpha in [2, 4], got {alpha}")));
    }
    if n == 0 {
        return Err(Error::invalid("n must be at least 1"));
    }
    Ok(())
}

pub fn assemble_and_solve(grid: &Grid, alpha: f64, n: usize) -> Result<GridSolution> {
    check_params(alpha, n)?;
    let r2 = grid.domain().radius.powi(2);
    let rows: Vec<(Vec<(usize, f64)>, f64)> = (0..grid.len())
        .into_par_iter()
        .map(|k| {
            let node = grid.nodes()[k];
            let row = stencil(grid, k, n)
                .into_iter()
                .filter_map(|(target, c)| match target {
                    Target::Node(m) => Some((m, c)),
                    Target::Boundary(..) => None,
                })
                .collect();
            let rhs = if node.sigma.hypot(node.t) < CORRECTION_RADIUS * r2 {
                apply(grid, k, n, |s, t| singular_part(alpha, s, t))
            } else {
                source(n, alpha, node.sigma, node.t)
            };
            (row, rhs)
        })
        .collect();
    let (matrix, b): (Vec<_>, Vec<_>) = rows.into_iter().unzip();
    let band = grid.bandwidth();
    let lu = BandedLu::factor(&matrix, band, band)?;
    let mut w = lu.solve(&b);
    let scale = max_abs(&b).max(f64::MIN_POSITIVE);
    let mut res = max_abs(&residual(&matrix, &w, &b)) / scale;
    for _ in 0..REFINEMENT_STEPS {
        if res <= SOLVER_TOL * 1e-3 {
            break;
        }
        let r = residual(&matrix, &w, &b);
        let d = lu.solve(&r);
        w.iter_mut().zip(&d).for_each(|(x, dx)| *x += dx);
        res = max_abs(&residual(&matrix, &w, &b)) / scale;
    }
    if !(res <= SOLVER_TOL) {
        return Err(Error::Solver { residual: res });
    }
    Ok(GridSolution::new(grid.clone(), alpha, n, w, res, Provenance::Solved))
}

impl GridSolution {
    fn new(grid: Grid, alpha: f64, n: usize, w: Vec<f64>, residual: f64, provenance: Provenance) -> Self {
        GridSolution { grid, alpha, n, w, residual, provenance, interpolant: OnceLock::new() }
    }

    /// Copies `f` onto the nodes of `grid`.
    pub fn inject(grid: &Grid, alpha: f64, n: usize, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        check_params(alpha, n)?;
        let w = grid.nodes().iter().map(|p| f(p.sigma, p.t)).collect();
        Ok(GridSolution::new(grid.clone(), alpha, n, w, 0.0, Provenance::Injected))
    }

    /// The exact ball solution `W = (P^{α/4} − R^α)/α` on the nodes.
    pub fn analytic_ball(grid: &Grid, alpha: f64, n: usize) -> Result<Self> {
        let ra = grid.domain().radius.powf(alpha) / alpha;
        GridSolution::inject(grid, alpha, n, |s, t| singular_part(alpha, s, t) - ra)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn h(&self) -> f64 {
        self.grid.h()
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[f64] {
        &self.w
    }

    pub fn residual(&self) -> f64 {
        self.residual
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    /// `W` at node `(i, j)`, with the axis mirror for `i < 0`.
    pub fn node_value(&self, i: i64, j: i64) -> Option<f64> {
        self.grid.index(i.abs(), j).map(|k| self.w[k])
    }

    pub fn interpolant(&self) -> &Interpolant {
        self.interpolant.get_or_init(|| Interpolant::build(self))
    }

    /// `(W, W_σ, W_t)` at any point of the closed domain.
    pub fn eval(&self, sigma: f64, t: f64) -> (f64, f64, f64) {
        self.interpolant().eval(sigma, t)
    }
}
