//! Right-hand sides of the sum-of-squares expansions of `(F_α/16)Δ_H v`,
//! transcribed term by term. In reduced coordinates `|x|² = σ`,
//! `x_j² + x_{n+j}² = s_j` and `ρ⁴ = P = σ² + t²`.

use super::matrices::{build_matrix_bundle, frobenius_deficit, Derivs};
use super::pfunction::weight_reduced;
use super::point::ReducedPoint;
use crate::calculus::Jet;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// Toric symmetry, `n ≥ 2`.
    ToricGeneral,
    ToricN1,
    ToricN2,
    /// `U(s, t) = W(σ, t)`, any `n ≥ 1`.
    Cylindrical,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::ToricGeneral => "toric_general",
            Variant::ToricN1 => "toric_n1",
            Variant::ToricN2 => "toric_n2",
            Variant::Cylindrical => "cylindrical",
        })
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "toric_general" => Ok(Variant::ToricGeneral),
            "toric_n1" => Ok(Variant::ToricN1),
            "toric_n2" => Ok(Variant::ToricN2),
            "cylindrical" => Ok(Variant::Cylindrical),
            _ => Err(Error::invalid(format!("unknown variant {s:?}"))),
        }
    }
}

impl Variant {
    pub fn accepts(self, n: usize) -> bool {
        match self {
            Variant::ToricGeneral => n >= 2,
            Variant::ToricN1 => n == 1,
            Variant::ToricN2 => n == 2,
            Variant::Cylindrical => n >= 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SumOfSquares {
    pub variant: Variant,
    pub total: f64,
    pub terms: Vec<(&'static str, f64)>,
}

impl SumOfSquares {
    pub fn term(&self, name: &str) -> Option<f64> {
        self.terms.iter().find(|(k, _)| *k == name).map(|(_, v)| *v)
    }

    /// `‖M‖² − (tr M)²/(n+1)`, i.e. half of the matrix term.
    pub fn deficit(&self) -> f64 {
        self.term(MATRIX).unwrap_or(0.0) / 2.0
    }
}

pub const MATRIX: &str = "matrix_deficit";
pub const TRACE: &str = "trace_balance";
pub const EULER: &str = "euler_square";
pub const SIMPLEX: &str = "simplex_weighted";
pub const MIXED: &str = "mixed_t_squares";
pub const PAIR_MIXED: &str = "pair_t_squares";
pub const PAIR_BRACKET: &str = "pair_difference_bracket";

/// Relative spread allowed among the `U_j` (and `U_jj`) of a cylindrical jet.
const CYLINDRICAL_TOL: f64 = 1e-12;

pub fn rhs_sum_of_squares(
    variant: Variant,
    u: &Jet,
    p: &ReducedPoint,
    alpha: f64,
) -> Result<SumOfSquares> {
    let n = p.n();
    if !variant.accepts(n) {
        return Err(Error::invalid(format!("variant {variant} does not apply to n = {n}")));
    }
    let bundle = build_matrix_bundle(u, p, alpha)?;
    let d = Derivs::from_jet(u, n);
    let matrix = 2.0 * frobenius_deficit(&bundle.m);
    let nf = n as f64;
    let sigma = p.sigma();
    let t = p.t();
    let big_p = p.gauge4();
    let f = weight_reduced(p, alpha);
    let s = p.s();
    let b = 4.0 - alpha;
    let rho_a = big_p.powf(alpha / 4.0);

    let mut terms = vec![(MATRIX, matrix)];
    match variant {
        Variant::ToricN1 => {
            let u1 = d.uj[0];
            terms.push((TRACE, (2.0 + alpha) / 2.0 * sq(u1 - f / 2.0)));
            terms.push((MIXED, b / 2.0 / big_p * sq(sigma * d.ut - t * u1)));
        }
        Variant::ToricN2 => {
            let (u1, u2) = (d.uj[0], d.uj[1]);
            terms.push((TRACE, (4.0 + alpha) / 12.0 * sq(u1 + u2 - f)));
            let euler = s[0] * u1 + s[1] * u2 + t * d.ut - rho_a / 2.0;
            terms.push((EULER, b * (4.0 + alpha) / 12.0 * sigma * sigma / sq(big_p) * sq(euler)));
            let mixed: f64 = (0..2)
                .map(|j| 8.0 * sigma * s[j] / (3.0 * sq(big_p)) * sq(sigma * d.ut - t * d.uj[j]))
                .sum();
            terms.push((MIXED, b / 4.0 * mixed));
            terms.push((PAIR_MIXED, b / (12.0 * big_p) * sq(t * u1 + t * u2 - 2.0 * sigma * d.ut)));
            let bracket = b / 24.0 * sigma * sigma / big_p
                + b / 3.0 * sigma * sigma * s[0] * s[1] / sq(big_p);
            terms.push((PAIR_BRACKET, 2.0 * sq(u1 - u2) * bracket));
        }
        Variant::ToricGeneral => {
            let sum_u: f64 = d.uj.iter().sum();
            terms.push((TRACE, (2.0 * nf + alpha) / (nf * nf * (nf + 1.0)) * sq(sum_u - nf / 2.0 * f)));

            let euler = s.iter().zip(&d.uj).map(|(sj, uj)| sj * uj).sum::<f64>() + t * d.ut
                - rho_a / 2.0;
            terms.push((
                EULER,
                b * (2.0 * nf + alpha) * (nf - 1.0) / (4.0 * nf + 4.0) * sigma * sigma
                    / sq(big_p)
                    * sq(euler),
            ));

            let simplex: f64 = (0..n)
                .map(|j| (1.0 - nf * s[j] / sigma) * sq(d.uj[j] - f / 2.0))
                .sum();
            terms.push((
                SIMPLEX,
                (2.0 * nf + alpha) * (nf - 2.0) / (2.0 * nf * (nf + 1.0)) * simplex,
            ));

            let mixed: f64 = (0..n)
                .map(|j| {
                    let w = (nf - 1.0) * (2.0 * nf + 4.0) / (nf + 1.0) * sigma * s[j] / sq(big_p)
                        + (4.0 - 2.0 * nf) / (nf + 1.0) * s[j] / (sigma * big_p);
                    w * sq(sigma * d.ut - t * d.uj[j])
                })
                .sum();
            terms.push((MIXED, b / 4.0 * mixed));

            let mut pair_mixed = 0.0;
            let mut pair_bracket = 0.0;
            for i in 0..n {
                for j in 0..n {
                    if i == j {
                        continue;
                    }
                    pair_mixed += sq(t * d.uj[i] + t * d.uj[j] - 2.0 * sigma * d.ut);
                    let sisj = s[i] * s[j];
                    let spair = s[i] + s[j];
                    let bracket = b * sq(nf - 2.0) / (8.0 * nf * nf * (nf * nf - 1.0))
                        + (8.0 + 4.0 * nf - nf * nf) / (4.0 * nf * nf * (nf + 1.0))
                        + (3.0 * nf - 6.0) / (4.0 * nf + 4.0) * sisj / (sigma * sigma)
                        - 3.0 / (4.0 * nf + 4.0) * spair / sigma
                        + b / (4.0 * nf + 4.0) * sigma * spair / big_p
                        + b * (4.0 - 2.0 * nf) / (4.0 * nf + 4.0) * sisj / big_p
                        - b / (8.0 * (nf * nf - 1.0)) * sigma * sigma / big_p
                        + b * (nf - 1.0) * (nf + 2.0) / (4.0 * nf + 4.0) * sigma * sigma * sisj
                            / sq(big_p);
                    pair_bracket += sq(d.uj[i] - d.uj[j]) * bracket;
                }
            }
            terms.push((PAIR_MIXED, b / (8.0 * (nf * nf - 1.0)) / big_p * pair_mixed));
            terms.push((PAIR_BRACKET, pair_bracket));
        }
        Variant::Cylindrical => {
            check_cylindrical(&d)?;
            let ws = d.uj[0];
            let wt = d.ut;
            terms.push((TRACE, (2.0 * nf + alpha) / (nf + 1.0) * sq(ws - f / 2.0)));
            terms.push((
                EULER,
                b * (2.0 * nf + alpha) * (nf - 1.0) / (4.0 * nf + 4.0) * sigma * sigma
                    / sq(big_p)
                    * sq(sigma * ws + t * wt - rho_a / 2.0),
            ));
            let weight = (nf - 1.0) * (2.0 * nf + 4.0) / (nf + 1.0) * sigma * sigma / big_p
                + 4.0 / (nf + 1.0);
            terms.push((MIXED, b / (4.0 * big_p) * sq(sigma * wt - t * ws) * weight));
        }
    }
    let total = terms.iter().map(|(_, v)| v).sum();
    Ok(SumOfSquares { variant, total, terms })
}

fn sq(x: f64) -> f64 {
    x * x
}

fn check_cylindrical(d: &Derivs) -> Result<()> {
    let diag: Vec<f64> = (0..d.uj.len()).map(|j| d.ujk[(j, j)]).collect();
    let scale = d
        .uj
        .iter()
        .chain(&diag)
        .chain([d.ut, d.utt].iter())
        .fold(1e-300_f64, |m, v| m.max(v.abs()));
    let spread = |xs: &[f64]| {
        let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (hi - lo) / scale
    };
    if spread(&d.uj) > CYLINDRICAL_TOL || spread(&diag) > CYLINDRICAL_TOL {
        return Err(Error::invalid("jet is not cylindrical: the U_j or U_jj differ"));
    }
    Ok(())
}
