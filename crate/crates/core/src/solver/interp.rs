//! Piecewise quadratic reconstruction of a grid solution.
//!
//! Each grid cell carries a least-squares quadratic through the 4×4 block of
//! nodes around it, the boundary points on those grid lines (where `W = 0`)
//! and the mirror images across the axis (`W` is even in `σ`). The fit is
//! applied to `H = W − S` with `S` the singular part, and `S` is added back
//! exactly, so the cone-like behaviour of `W` at the reduced origin is not
//! asked of a polynomial.

use super::solve::{singular_gradient, singular_part, GridSolution};
use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

const SVD_EPS: f64 = 1e-12;

#[derive(Debug)]
pub struct Interpolant {
    h: f64,
    alpha: f64,
    ci_count: i64,
    cj_min: i64,
    cj_count: i64,
    fits: Vec<Option<[f64; 6]>>,
}

impl Interpolant {
    pub(crate) fn build(sol: &GridSolution) -> Interpolant {
        let grid = sol.grid();
        let dom = grid.domain();
        let h = grid.h();
        let alpha = sol.alpha();
        let ci_count = (dom.sigma_extent() / h).ceil() as i64 + 1;
        let jt = (dom.t_extent() / h).ceil() as i64 + 1;
        let cj_min = -jt;
        let cj_count = 2 * jt;
        let cells: Vec<(i64, i64)> =
            (0..cj_count).flat_map(|b| (0..ci_count).map(move |a| (a, cj_min + b))).collect();
        let fits = cells
            .par_iter()
            .map(|&(ci, cj)| {
                let near_s = ci as f64 * h;
                let (t0, t1) = (cj as f64 * h, (cj + 1) as f64 * h);
                let near_t = if t0 <= 0.0 && t1 >= 0.0 { 0.0 } else { t0.abs().min(t1.abs()) };
                (dom.level(near_s, near_t) <= 0.0).then(|| fit_cell(sol, ci, cj))
            })
            .collect();
        Interpolant { h, alpha, ci_count, cj_min, cj_count, fits }
    }

    fn cell(&self, ci: i64, cj: i64) -> Option<&[f64; 6]> {
        let b = cj - self.cj_min;
        if ci < 0 || ci >= self.ci_count || b < 0 || b >= self.cj_count {
            return None;
        }
        self.fits[(b * self.ci_count + ci) as usize].as_ref()
    }

    /// `(W, W_σ, W_t)`; NaN far outside the domain.
    pub fn eval(&self, sigma: f64, t: f64) -> (f64, f64, f64) {
        let h = self.h;
        let ci = ((sigma / h).floor() as i64).clamp(0, self.ci_count - 1);
        let cj = ((t / h).floor() as i64).clamp(self.cj_min, self.cj_min + self.cj_count - 1);
        let found = self.cell(ci, cj).map(|c| (ci, cj, c)).or_else(|| {
            // the point sits in a cell that only touches the boundary corner
            [(-1, 0), (0, -1), (0, 1), (-1, -1), (-1, 1), (1, 0)]
                .iter()
                .find_map(|&(a, b)| self.cell(ci + a, cj + b).map(|c| (ci + a, cj + b, c)))
        });
        let Some((ci, cj, c)) = found else {
            return (f64::NAN, f64::NAN, f64::NAN);
        };
        let x = (sigma - (ci as f64 + 0.5) * h) / h;
        let y = (t - (cj as f64 + 0.5) * h) / h;
        let hv = c[0] + c[1] * x + c[2] * y + c[3] * x * x + c[4] * x * y + c[5] * y * y;
        let hs = (c[1] + 2.0 * c[3] * x + c[4] * y) / h;
        let ht = (c[2] + c[4] * x + 2.0 * c[5] * y) / h;
        let (ss, st) = singular_gradient(self.alpha, sigma, t);
        (hv + singular_part(self.alpha, sigma, t), hs + ss, ht + st)
    }
}

/// Data `(σ, t, H)` around cell `(ci, cj)`.
fn cell_data(sol: &GridSolution, ci: i64, cj: i64) -> Vec<(f64, f64, f64)> {
    let grid = sol.grid();
    let dom = grid.domain();
    let h = grid.h();
    let alpha = sol.alpha();
    let smooth = |s: f64, t: f64, w: f64| (s, t, w - singular_part(alpha, s, t));
    let (s_lo, s_hi) = ((ci - 1) as f64 * h, (ci + 2) as f64 * h);
    let (t_lo, t_hi) = ((cj - 1) as f64 * h, (cj + 2) as f64 * h);
    let in_s = |s: f64| s >= s_lo && s <= s_hi;
    let in_t = |t: f64| t >= t_lo && t <= t_hi;
    let mut data = Vec::with_capacity(32);
    for j in cj - 1..=cj + 2 {
        let t = j as f64 * h;
        for i in ci - 1..=ci + 2 {
            if let Some(w) = sol.node_value(i, j) {
                data.push(smooth(i as f64 * h, t, w));
            }
        }
        if t.abs() < dom.t_extent() {
            let sb = dom.sigma_at(t);
            for s in [sb, -sb] {
                if in_s(s) {
                    data.push(smooth(s, t, 0.0));
                }
            }
        }
    }
    for i in ci - 1..=ci + 2 {
        let s = i as f64 * h;
        if s.abs() < dom.sigma_extent() {
            let tb = dom.t_at(s);
            for t in [tb, -tb] {
                if in_t(t) {
                    data.push(smooth(s, t, 0.0));
                }
            }
        }
    }
    data
}

fn fit_cell(sol: &GridSolution, ci: i64, cj: i64) -> [f64; 6] {
    let h = sol.h();
    let data = cell_data(sol, ci, cj);
    let (sc, tc) = ((ci as f64 + 0.5) * h, (cj as f64 + 0.5) * h);
    let cols = match data.len() {
        0 => return [0.0; 6],
        1 | 2 => 1,
        3..=7 => 3,
        _ => 6,
    };
    let a = DMatrix::from_fn(data.len(), cols, |r, c| {
        let x = (data[r].0 - sc) / h;
        let y = (data[r].1 - tc) / h;
        [1.0, x, y, x * x, x * y, y * y][c]
    });
    let b = DVector::from_iterator(data.len(), data.iter().map(|d| d.2));
    let mut out = [0.0; 6];
    if let Ok(sol) = a.svd(true, true).solve(&b, SVD_EPS) {
        out[..cols].copy_from_slice(sol.as_slice());
    }
    out
}
