//! Gauss–Legendre rules on `[-1, 1]`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

#[derive(Debug, Clone)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    /// Maps the rule onto `[a, b]` and returns `(node, weight)` pairs.
    pub fn on(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        self.nodes.iter().zip(&self.weights).map(move |(x, w)| (mid + half * x, half * w))
    }
}

/// The `m`-point rule, cached.
pub fn gauss_legendre(m: usize) -> Arc<GaussRule> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GaussRule>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
    guard.entry(m).or_insert_with(|| Arc::new(build(m))).clone()
}

fn build(m: usize) -> GaussRule {
    assert!(m >= 1, "a Gauss rule needs at least one node");
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    let mf = m as f64;
    for i in 0..m.div_ceil(2) {
        // Tricomi's initial guess, then Newton on P_m.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (mf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(m, x);
            dp = d;
            let step = p / d;
            x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(m, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[m - 1 - i] = x;
        weights[i] = w;
        weights[m - 1 - i] = w;
    }
    if m % 2 == 1 {
        nodes[m / 2] = 0.0;
    }
    GaussRule { nodes, weights }
}

/// `(P_m(x), P_m'(x))` by the three-term recurrence.
fn legendre(m: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if m == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=m {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = m as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_polynomials_exactly() {
        for m in [1, 2, 5, 16, 64, 200] {
            let rule = gauss_legendre(m);
            let total: f64 = rule.weights.iter().sum();
            assert!((total - 2.0).abs() < 1e-13, "m = {m}");
            let deg = 2 * m - 1;
            let approx: f64 = rule.on(0.0, 1.0).map(|(x, w)| w * x.powi(deg as i32)).sum();
            assert!((approx - 1.0 / (deg as f64 + 1.0)).abs() < 1e-13, "m = {m}");
        }
    }

    #[test]
    fn nodes_are_sorted_and_symmetric() {
        let rule = gauss_legendre(7);
        assert!(rule.nodes.windows(2).all(|w| w[0] < w[1]));
        for i in 0..7 {
            assert!((rule.nodes[i] + rule.nodes[6 - i]).abs() < 1e-15);
        }
    }
}
