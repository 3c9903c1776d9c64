use super::grid::{Grid, Neighbor};
use super::solve::{pfunction_value, singular_gradient, singular_part, GridSolution};
use crate::numfmt::{lenient, sig17};
use crate::quadrature::gauss::gauss_legendre;
use crate::quadrature::sphere_area;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub const DEFAULT_TRACE_SAMPLES: usize = 256;
/// Fraction of the arc dropped at each characteristic end.
pub const ARC_CLIP: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceSample {
    #[serde(serialize_with = "sig17", deserialize_with = "lenient")]
    pub arc_param: f64,
    #[serde(serialize_with = "sig17", deserialize_with = "lenient")]
    pub sigma: f64,
    #[serde(serialize_with = "sig17", deserialize_with = "lenient")]
    pub t: f64,
    #[serde(serialize_with = "sig17", deserialize_with = "lenient")]
    pub q: f64,
}

/// Samples of `q = |D_H u| / F_α^{1/2} = 2|∇W| P^{(4−α)/8}` along the boundary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NeumannTrace {
    pub samples: Vec<TraceSample>,
    #[serde(serialize_with = "sig17", deserialize_with = "lenient")]
    pub mean: f64,
    #[serde(serialize_with = "sig17", deserialize_with = "lenient")]
    pub std_dev: f64,
    #[serde(serialize_with = "sig17", deserialize_with = "lenient")]
    pub cv: f64,
}

pub fn neumann_trace(sol: &GridSolution) -> NeumannTrace {
    neumann_trace_with(sol, DEFAULT_TRACE_SAMPLES)
}

/// Boundary samples at arc parameters evenly spread over `[0.02, 0.98]`
/// (the parameter is the angle `θ/π` from the top of the curve). The normal
/// derivative is the one-sided `(4W(h) − W(2h))/(2h)` along the inward
/// normal, using `W = 0` on the boundary; the tangential derivative vanishes.
pub fn neumann_trace_with(sol: &GridSolution, samples: usize) -> NeumannTrace {
    let samples = samples.max(2);
    let dom = *sol.grid().domain();
    let h = sol.h();
    let alpha = sol.alpha();
    let out: Vec<TraceSample> = (0..samples)
        .into_par_iter()
        .map(|k| {
            let arc_param = ARC_CLIP + (1.0 - 2.0 * ARC_CLIP) * k as f64 / (samples - 1) as f64;
            let (sigma, t) = dom.boundary_point(std::f64::consts::PI * arc_param);
            let (ns, nt) = dom.inward_normal(sigma, t);
            let w1 = sol.eval(sigma + h * ns, t + h * nt).0;
            let w2 = sol.eval(sigma + 2.0 * h * ns, t + 2.0 * h * nt).0;
            let dn = (4.0 * w1 - w2) / (2.0 * h);
            let p = sigma * sigma + t * t;
            TraceSample { arc_param, sigma, t, q: 2.0 * dn.abs() * p.powf((4.0 - alpha) / 8.0) }
        })
        .collect();
    let m = out.len() as f64;
    let mean = out.iter().map(|s| s.q).sum::<f64>() / m;
    let var = out.iter().map(|s| (s.q - mean).powi(2)).sum::<f64>() / m;
    let std_dev = var.sqrt();
    NeumannTrace { samples: out, mean, std_dev, cv: std_dev / mean }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PFunctionNode {
    #[serde(serialize_with = "sig17", deserialize_with = "lenient")]
    pub sigma: f64,
    #[serde(serialize_with = "sig17", deserialize_with = "lenient")]
    pub t: f64,
    #[serde(serialize_with = "sig17", deserialize_with = "lenient")]
    pub v: f64,
    pub boundary_adjacent: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PFunctionReport {
    pub nodes: Vec<PFunctionNode>,
    /// `mean(q)²`, the discrete boundary constant.
    #[serde(serialize_with = "sig17", deserialize_with = "lenient")]
    pub boundary_constant: f64,
    #[serde(serialize_with = "sig17", deserialize_with = "lenient")]
    pub max_deviation: f64,
}

/// `v` at nodes with `σ ≥ 2h` from centred (Shortley–Weller at the
/// boundary) differences of `W − S`, plus the exact gradient of `S`.
pub fn pfunction_on_grid(sol: &GridSolution) -> PFunctionReport {
    let grid = sol.grid();
    let trace = neumann_trace(sol);
    let c2 = trace.mean * trace.mean;
    let alpha = sol.alpha();
    let h = grid.h();
    let nodes: Vec<PFunctionNode> = (0..grid.len())
        .into_par_iter()
        .filter(|&k| grid.nodes()[k].sigma >= 2.0 * h - 1e-12 * h)
        .map(|k| {
            let node = grid.nodes()[k];
            let smooth = |s: f64, t: f64, w: f64| w - singular_part(alpha, s, t);
            let value = |to: Neighbor, s: f64, t: f64| match to {
                Neighbor::Node(m) => smooth(s, t, sol.values()[m]),
                Neighbor::Boundary => smooth(s, t, 0.0),
            };
            let [e, w, n, s] = grid.arms(k);
            let (e, w, n, s) = (e.unwrap(), w.unwrap(), n.unwrap(), s.unwrap());
            let c = smooth(node.sigma, node.t, sol.values()[k]);
            let fe = value(e.to, node.sigma + e.len, node.t);
            let fw = value(w.to, node.sigma - w.len, node.t);
            let fnn = value(n.to, node.sigma, node.t + n.len);
            let fs = value(s.to, node.sigma, node.t - s.len);
            let (gs, gt) = singular_gradient(alpha, node.sigma, node.t);
            let ws = centred(fw, c, fe, w.len, e.len) + gs;
            let wt = centred(fs, c, fnn, s.len, n.len) + gt;
            let v = pfunction_value(alpha, node.sigma, node.t, sol.values()[k], ws, wt);
            PFunctionNode { sigma: node.sigma, t: node.t, v, boundary_adjacent: grid.is_boundary_adjacent(k) }
        })
        .collect();
    let max_deviation = nodes.iter().map(|p| (p.v - c2).abs()).fold(0.0, f64::max);
    PFunctionReport { nodes, boundary_constant: c2, max_deviation }
}

/// Second-order first derivative from values at `−a`, `0`, `+b`.
fn centred(fm: f64, f0: f64, fp: f64, a: f64, b: f64) -> f64 {
    (a * a * fp - b * b * fm + (b * b - a * a) * f0) / (a * b * (a + b))
}

/// Reconstructed values at a quadrature point.
#[derive(Debug, Clone, Copy)]
pub struct FieldSample {
    pub sigma: f64,
    pub t: f64,
    pub w: f64,
    pub w_sigma: f64,
    pub w_t: f64,
}

const PANEL_NODES: usize = 4;

/// `∫_Ω f dξ` for a cylindrical integrand built from the reconstruction,
/// with `dξ = (ω/2) σ^{n−1} dσ dt`. Uses polar panels of size about `h` in
/// `σ = λ sin φ`, `t = λ cos φ / k`.
pub fn integrate_grid<F>(sol: &GridSolution, f: F) -> f64
where
    F: Fn(&FieldSample) -> f64 + Sync,
{
    let grid: &Grid = sol.grid();
    let dom = grid.domain();
    let h = grid.h();
    let k = dom.k2().sqrt();
    let big = dom.sigma_extent();
    let n = sol.n();
    let half_omega = 0.5 * sphere_area(n);
    let n_lambda = (big / h).ceil() as usize;
    let n_phi = (std::f64::consts::PI * big / h).ceil() as usize;
    let rule = gauss_legendre(PANEL_NODES);
    let parts: Vec<f64> = (0..n_lambda)
        .into_par_iter()
        .map(|a| {
            let (l0, l1) = (big * a as f64 / n_lambda as f64, big * (a + 1) as f64 / n_lambda as f64);
            let mut acc = 0.0;
            for b in 0..n_phi {
                let p0 = std::f64::consts::PI * b as f64 / n_phi as f64;
                let p1 = std::f64::consts::PI * (b + 1) as f64 / n_phi as f64;
                for (lambda, wl) in rule.on(l0, l1) {
                    for (phi, wp) in rule.on(p0, p1) {
                        let sigma = lambda * phi.sin();
                        let t = lambda * phi.cos() / k;
                        let (w, w_sigma, w_t) = sol.eval(sigma, t);
                        let jac = half_omega * sigma.powi(n as i32 - 1) * lambda / k;
                        acc += wl * wp * jac * f(&FieldSample { sigma, t, w, w_sigma, w_t });
                    }
                }
            }
            acc
        })
        .collect();
    parts.into_iter().sum()
}
