//! The discrete reduced operator `W_σσ + W_tt + (n/σ)W_σ` at one node.

use super::grid::{Grid, Neighbor};

/// Where a stencil weight applies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Target {
    Node(usize),
    /// A boundary point `(σ, t)`, where the Dirichlet value is zero.
    Boundary(f64, f64),
}

/// Weights of the operator at node `k`. The centre node comes first.
pub fn stencil(grid: &Grid, k: usize, n: usize) -> Vec<(Target, f64)> {
    let node = grid.nodes()[k];
    let [east, west, north, south] = grid.arms(k);
    let (east, north, south) = (east.expect("east arm"), north.expect("north arm"), south.expect("south arm"));
    let nf = n as f64;
    let target = |to: Neighbor, ds: f64, dt: f64| match to {
        Neighbor::Node(m) => Target::Node(m),
        Neighbor::Boundary => Target::Boundary(node.sigma + ds, node.t + dt),
    };

    let (hn, hs) = (north.len, south.len);
    let cn = 2.0 / (hn * (hn + hs));
    let cs = 2.0 / (hs * (hn + hs));
    let mut centre = -2.0 / (hn * hs);
    let mut out = Vec::with_capacity(5);

    match west {
        None => {
            // Axis: (n/σ)W_σ → n W_σσ, and the ghost W(−h) = W(h).
            let he = east.len;
            let ce = 2.0 * (nf + 1.0) / (he * he);
            centre -= ce;
            out.push((target(east.to, he, 0.0), ce));
        }
        Some(west) => {
            let (he, hw) = (east.len, west.len);
            let drift = nf / node.sigma;
            let ce = (2.0 + drift * hw) / (he * (he + hw));
            let cw = (2.0 - drift * he) / (hw * (he + hw));
            centre += -2.0 / (he * hw) + drift * (he - hw) / (he * hw);
            out.push((target(east.to, he, 0.0), ce));
            out.push((target(west.to, -hw, 0.0), cw));
        }
    }
    out.push((target(north.to, 0.0, hn), cn));
    out.push((target(south.to, 0.0, -hs), cs));
    out.insert(0, (Target::Node(k), centre));
    out
}

/// Applies the stencil to a function known everywhere.
pub fn apply(grid: &Grid, k: usize, n: usize, f: impl Fn(f64, f64) -> f64) -> f64 {
    stencil(grid, k, n)
        .into_iter()
        .map(|(target, c)| {
            let (s, t) = match target {
                Target::Node(m) => (grid.nodes()[m].sigma, grid.nodes()[m].t),
                Target::Boundary(s, t) => (s, t),
            };
            c * f(s, t)
        })
        .sum()
}
