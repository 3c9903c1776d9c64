//! Polynomials annihilated by the reduced operator. Adding them to `U_α`
//! produces nontrivial solutions of the reduced PDE for the identity tests.

use super::point::ReducedPolynomial;
use crate::error::{Error, Result};

fn mono(n: usize, entries: &[(usize, u8)]) -> Vec<u8> {
    let mut e = vec![0u8; n + 1];
    for &(v, d) in entries {
        e[v] += d;
    }
    e
}

/// Toric 𝓛-harmonic polynomials of degree at most `degree_cap` (≤ 2):
/// `1`, `t`, `s_i − s_j`, `t(s_i − s_j)`, `t² − ½Σs_k²` and
/// `s_i s_j − ¼(s_i² + s_j²)`.
pub fn harmonic_basis(n: usize, degree_cap: usize) -> Result<Vec<ReducedPolynomial>> {
    if n == 0 {
        return Err(Error::invalid("n must be positive"));
    }
    if degree_cap > 2 {
        return Err(Error::invalid(format!("degree_cap must be at most 2, got {degree_cap}")));
    }
    let tv = n;
    let mut out = vec![ReducedPolynomial::new("1", n, vec![(1.0, mono(n, &[]))])?];
    if degree_cap >= 1 {
        out.push(ReducedPolynomial::new("t", n, vec![(1.0, mono(n, &[(tv, 1)]))])?);
        for i in 0..n {
            for j in i + 1..n {
                out.push(ReducedPolynomial::new(
                    format!("s{} - s{}", i + 1, j + 1),
                    n,
                    vec![(1.0, mono(n, &[(i, 1)])), (-1.0, mono(n, &[(j, 1)]))],
                )?);
            }
        }
    }
    if degree_cap >= 2 {
        for i in 0..n {
            for j in i + 1..n {
                out.push(ReducedPolynomial::new(
                    format!("t(s{} - s{})", i + 1, j + 1),
                    n,
                    vec![(1.0, mono(n, &[(tv, 1), (i, 1)])), (-1.0, mono(n, &[(tv, 1), (j, 1)]))],
                )?);
            }
        }
        let mut terms = vec![(1.0, mono(n, &[(tv, 2)]))];
        terms.extend((0..n).map(|k| (-0.5, mono(n, &[(k, 2)]))));
        out.push(ReducedPolynomial::new("t^2 - sum s_k^2 / 2", n, terms)?);
        for i in 0..n {
            for j in i + 1..n {
                out.push(ReducedPolynomial::new(
                    format!("s{a}s{b} - (s{a}^2 + s{b}^2)/4", a = i + 1, b = j + 1),
                    n,
                    vec![
                        (1.0, mono(n, &[(i, 1), (j, 1)])),
                        (-0.25, mono(n, &[(i, 2)])),
                        (-0.25, mono(n, &[(j, 2)])),
                    ],
                )?);
            }
        }
    }
    Ok(out)
}

/// 𝓛-harmonic polynomials that depend on `s` only through `σ`:
/// `1`, `t`, `t² − σ²/(n+1)` and `t³ − 3tσ²/(n+1)`.
pub fn cylindrical_harmonic_basis(n: usize) -> Result<Vec<ReducedPolynomial>> {
    if n == 0 {
        return Err(Error::invalid("n must be positive"));
    }
    let tv = n;
    let k = 1.0 / (n as f64 + 1.0);
    // σ² = Σ s_i² + 2 Σ_{i<j} s_i s_j, scaled and attached to t^m.
    let sigma_sq = |scale: f64, t_power: u8| {
        let mut terms = Vec::new();
        for i in 0..n {
            terms.push((scale, mono(n, &[(i, 2), (tv, t_power)])));
            for j in i + 1..n {
                terms.push((2.0 * scale, mono(n, &[(i, 1), (j, 1), (tv, t_power)])));
            }
        }
        terms
    };
    let mut quad = vec![(1.0, mono(n, &[(tv, 2)]))];
    quad.extend(sigma_sq(-k, 0));
    let mut cubic = vec![(1.0, mono(n, &[(tv, 3)]))];
    cubic.extend(sigma_sq(-3.0 * k, 1));
    Ok(vec![
        ReducedPolynomial::new("1", n, vec![(1.0, mono(n, &[]))])?,
        ReducedPolynomial::new("t", n, vec![(1.0, mono(n, &[(tv, 1)]))])?,
        ReducedPolynomial::new("t^2 - sigma^2/(n+1)", n, quad)?,
        ReducedPolynomial::new("t^3 - 3 t sigma^2/(n+1)", n, cubic)?,
    ])
}
