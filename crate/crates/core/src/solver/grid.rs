use super::domain::ReducedDomain;
use crate::error::{Error, Result};

/// Nodes closer than this fraction of `h` to the boundary are dropped, which
/// keeps Shortley–Weller arms away from zero.
const MIN_ARM: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Neighbor {
    Node(usize),
    /// A boundary point at the end of a shortened arm, `W = 0` there.
    Boundary,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arm {
    pub len: f64,
    pub to: Neighbor,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Node {
    pub i: usize,
    pub j: i64,
    pub sigma: f64,
    pub t: f64,
}

#[derive(Debug, Clone, Copy)]
struct Row {
    start: usize,
    len: usize,
}

/// Uniform nodes `(ih, jh)` strictly inside the reduced domain, ordered
/// by `t` row and then by `σ`. The row widths set the matrix bandwidth.
#[derive(Debug, Clone)]
pub struct Grid {
    domain: ReducedDomain,
    h: f64,
    j_min: i64,
    rows: Vec<Row>,
    nodes: Vec<Node>,
}

pub fn build_grid(domain: &ReducedDomain, h: f64) -> Result<Grid> {
    domain.validate()?;
    let r2 = domain.radius * domain.radius;
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::invalid(format!("h = {h} must be positive")));
    }
    if h > r2 / 8.0 {
        return Err(Error::invalid(format!("h = {h} is coarser than R²/8 = {}", r2 / 8.0)));
    }
    let jt = (domain.t_extent() / h).ceil() as i64;
    let mut rows = Vec::new();
    let mut nodes = Vec::new();
    let mut j_min = None;
    for j in -jt..=jt {
        let t = j as f64 * h;
        let mut len = 0;
        loop {
            let sigma = len as f64 * h;
            let inside = domain.sigma_at(t) - sigma > MIN_ARM * h
                && domain.t_at(sigma) - t.abs() > MIN_ARM * h;
            if !inside {
                break;
            }
            nodes.push(Node { i: len, j, sigma, t });
            len += 1;
        }
        if len == 0 {
            continue;
        }
        j_min.get_or_insert(j);
        rows.push(Row { start: nodes.len() - len, len });
    }
    let j_min = j_min.ok_or_else(|| Error::invalid("grid has no interior nodes"))?;
    Ok(Grid { domain: *domain, h, j_min, rows, nodes })
}

impl Grid {
    pub fn domain(&self) -> &ReducedDomain {
        &self.domain
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn index(&self, i: i64, j: i64) -> Option<usize> {
        let r = j - self.j_min;
        if i < 0 || r < 0 || r as usize >= self.rows.len() {
            return None;
        }
        let row = self.rows[r as usize];
        ((i as usize) < row.len).then(|| row.start + i as usize)
    }

    /// Largest row length, i.e. the lower and upper bandwidth of the system.
    pub fn bandwidth(&self) -> usize {
        self.rows.iter().map(|r| r.len).max().unwrap_or(0)
    }

    pub fn axis_nodes(&self) -> impl Iterator<Item = &Node> {
        self.nodes.iter().filter(|n| n.i == 0)
    }

    /// East, west, north and south arms of a node. The west arm of an axis
    /// node is `None` (its ghost mirrors the east neighbour).
    pub fn arms(&self, k: usize) -> [Option<Arm>; 4] {
        let node = self.nodes[k];
        let h = self.h;
        let (i, j) = (node.i as i64, node.j);
        let arm = |idx: Option<usize>, dist: f64| match idx {
            Some(m) => Arm { len: h, to: Neighbor::Node(m) },
            None => Arm { len: dist.min(h), to: Neighbor::Boundary },
        };
        let t_edge = self.domain.t_at(node.sigma);
        let east = arm(self.index(i + 1, j), self.domain.sigma_at(node.t) - node.sigma);
        let west = (i > 0).then(|| arm(self.index(i - 1, j), h));
        let north = arm(self.index(i, j + 1), t_edge - node.t);
        let south = arm(self.index(i, j - 1), t_edge + node.t);
        [Some(east), west, Some(north), Some(south)]
    }

    pub fn is_boundary_adjacent(&self, k: usize) -> bool {
        self.arms(k).iter().flatten().any(|a| a.to == Neighbor::Boundary)
    }
}
