use crate::calculus::GroupPoint;
use crate::error::{Error, Result};
use crate::reduced::ReducedPoint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleConfig {
    pub seed: u64,
    pub num_points: usize,
    pub rho_range: (f64, f64),
    pub simplex_floor: f64,
    pub t_over_sigma_range: (f64, f64),
}

impl Default for SampleConfig {
    fn default() -> Self {
        SampleConfig {
            seed: 42,
            num_points: 1000,
            rho_range: (0.1, 10.0),
            simplex_floor: 0.01,
            t_over_sigma_range: (-5.0, 5.0),
        }
    }
}

impl SampleConfig {
    pub fn with_points(mut self, num_points: usize) -> Self {
        self.num_points = num_points;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        let (lo, hi) = self.rho_range;
        if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
            return Err(Error::invalid(format!("bad rho_range ({lo}, {hi})")));
        }
        if !(self.simplex_floor > 0.0 && self.simplex_floor * (n as f64) < 1.0) {
            return Err(Error::invalid(format!(
                "simplex_floor {} must be positive with floor * n < 1",
                self.simplex_floor
            )));
        }
        let (a, b) = self.t_over_sigma_range;
        if !(a <= b && a.is_finite() && b.is_finite()) {
            return Err(Error::invalid(format!("bad t_over_sigma_range ({a}, {b})")));
        }
        if self.num_points == 0 {
            return Err(Error::invalid("num_points must be positive"));
        }
        Ok(())
    }
}

/// Generator for point `index`; depends only on `(seed, index)`.
pub fn point_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    if lo == hi {
        lo
    } else {
        rng.gen_range(lo..hi)
    }
}

/// Draws `(σ, t, weights)`: log-uniform gauge, uniform `t/σ`, and simplex
/// weights with every component at least `simplex_floor`.
fn draw_shape(cfg: &SampleConfig, n: usize, rng: &mut ChaCha8Rng) -> (f64, f64, Vec<f64>) {
    let (lo, hi) = cfg.rho_range;
    let rho = uniform(rng, lo.ln(), hi.ln()).exp();
    let tau = uniform(rng, cfg.t_over_sigma_range.0, cfg.t_over_sigma_range.1);
    let sigma = rho * rho / (1.0 + tau * tau).sqrt();
    let e: Vec<f64> = (0..n).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    let total: f64 = e.iter().sum();
    let free = 1.0 - cfg.simplex_floor * n as f64;
    let w = e.iter().map(|x| cfg.simplex_floor + free * x / total).collect();
    (sigma, tau * sigma, w)
}

pub fn sample_reduced(cfg: &SampleConfig, n: usize, index: u64) -> (ReducedPoint, ChaCha8Rng) {
    let mut rng = point_rng(cfg.seed, index);
    let (sigma, t, w) = draw_shape(cfg, n, &mut rng);
    let s = w.iter().map(|wj| wj * sigma).collect();
    let p = ReducedPoint::new(s, t).expect("sampled s is nonnegative");
    (p, rng)
}

/// A full-space point with the same `(σ, t, s/σ)` statistics and uniform
/// block angles.
pub fn sample_group(cfg: &SampleConfig, n: usize, index: u64) -> (GroupPoint, ChaCha8Rng) {
    let mut rng = point_rng(cfg.seed, index);
    let (sigma, t, w) = draw_shape(cfg, n, &mut rng);
    let mut x = vec![0.0; 2 * n];
    for j in 0..n {
        let r = (w[j] * sigma).sqrt();
        let theta = rng.gen_range(0.0..std::f64::consts::TAU);
        x[j] = r * theta.cos();
        x[n + j] = r * theta.sin();
    }
    let p = GroupPoint::new(x, t).expect("even dimension");
    (p, rng)
}

pub fn coefficients(rng: &mut ChaCha8Rng, k: usize) -> Vec<f64> {
    (0..k).map(|_| rng.gen_range(-1.0..1.0)).collect()
}
