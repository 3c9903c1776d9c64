use super::domain::{DomainKind, ReducedDomain};
use super::grid::build_grid;
use super::solve::{assemble_and_solve, singular_part, GridSolution};
use crate::error::{Error, Result};
use crate::numfmt::{lenient, lenient_opt, sig17, sig17_opt};
use serde::{Deserialize, Serialize};

/// Errors below this fraction of `R^α/α` count as round-off. The α = 4 ball
/// solution is quadratic and the scheme reproduces it exactly.
pub const ROUND_OFF_FLOOR: f64 = 1e-11;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    #[serde(serialize_with = "sig17", deserialize_with = "lenient")]
    pub h: f64,
    pub nodes: usize,
    #[serde(serialize_with = "sig17", deserialize_with = "lenient")]
    pub max_err: f64,
    #[serde(serialize_with = "sig17", deserialize_with = "lenient")]
    pub l2_err: f64,
    /// Against the previous (coarser) row; infinite when the error has hit
    /// round-off.
    #[serde(serialize_with = "sig17_opt", deserialize_with = "lenient_opt")]
    pub order_max: Option<f64>,
    #[serde(serialize_with = "sig17_opt", deserialize_with = "lenient_opt")]
    pub order_l2: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceStudy {
    pub domain: ReducedDomain,
    #[serde(serialize_with = "sig17", deserialize_with = "lenient")]
    pub alpha: f64,
    pub n: usize,
    /// `analytic` for the ball, `finest_grid` otherwise.
    pub reference: String,
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceStudy {
    pub fn min_order_max(&self) -> Option<f64> {
        self.rows.iter().filter_map(|r| r.order_max).reduce(f64::min)
    }

    /// Whether each refinement keeps the max error within `1 + slack` of
    /// the previous one (errors at round-off level compare equal).
    pub fn is_monotone(&self, slack: f64) -> bool {
        let floor = self.floor();
        self.rows.windows(2).all(|w| w[1].max_err <= (1.0 + slack) * w[0].max_err.max(floor))
    }

    fn floor(&self) -> f64 {
        ROUND_OFF_FLOOR * self.domain.radius.powf(self.alpha) / self.alpha
    }
}

pub fn convergence_study(
    domain: &ReducedDomain,
    alpha: f64,
    n: usize,
    h_list: &[f64],
) -> Result<ConvergenceStudy> {
    if h_list.is_empty() {
        return Err(Error::invalid("h_list is empty"));
    }
    let mut hs = h_list.to_vec();
    hs.sort_by(|a, b| b.total_cmp(a));
    hs.dedup();
    let ball = domain.kind == DomainKind::GaugeBall || domain.epsilon == 0.0;
    let solutions: Vec<GridSolution> =
        hs.iter().map(|&h| assemble_and_solve(&build_grid(domain, h)?, alpha, n)).collect::<Result<_>>()?;

    let ra = domain.radius.powf(alpha) / alpha;
    let (reference, compared): (&str, &[GridSolution]) = if ball {
        ("analytic", &solutions)
    } else {
        if solutions.len() < 2 {
            return Err(Error::invalid("a perturbed-domain study needs at least two h values"));
        }
        ("finest_grid", &solutions[..solutions.len() - 1])
    };
    let finest = solutions.last().expect("non-empty");
    let mut rows: Vec<ConvergenceRow> = Vec::new();
    for sol in compared {
        let errs: Vec<f64> = sol
            .grid()
            .nodes()
            .iter()
            .zip(sol.values())
            .map(|(p, w)| {
                let exact =
                    if ball { singular_part(alpha, p.sigma, p.t) - ra } else { finest.eval(p.sigma, p.t).0 };
                (w - exact).abs()
            })
            .collect();
        let h = sol.h();
        let max_err = errs.iter().copied().fold(0.0, f64::max);
        let l2_err = (errs.iter().map(|e| e * e).sum::<f64>() * h * h).sqrt();
        rows.push(ConvergenceRow { h, nodes: errs.len(), max_err, l2_err, order_max: None, order_l2: None });
    }
    let floor = ROUND_OFF_FLOOR * ra;
    for k in 1..rows.len() {
        let ratio = (rows[k - 1].h / rows[k].h).ln();
        let order = |coarse: f64, fine: f64| {
            if fine <= floor {
                f64::INFINITY
            } else {
                (coarse / fine).ln() / ratio
            }
        };
        rows[k].order_max = Some(order(rows[k - 1].max_err, rows[k].max_err));
        rows[k].order_l2 = Some(order(rows[k - 1].l2_err, rows[k].l2_err));
    }
    Ok(ConvergenceStudy { domain: *domain, alpha, n, reference: reference.to_string(), rows })
}
