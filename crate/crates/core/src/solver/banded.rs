//! Banded LU factorization with partial pivoting.
//!
//! Row `r` is stored as a dense window over columns `[r − kl, r + kl + ku]`,
//! wide enough for the fill that row interchanges introduce. Multipliers stay
//! in the row where they were computed and later interchanges only move the
//! trailing columns, so the solve replays the elimination in order.

use crate::error::{Error, Result};

pub struct BandedLu {
    n: usize,
    kl: usize,
    ku: usize,
    width: usize,
    data: Vec<f64>,
    pivots: Vec<usize>,
}

impl BandedLu {
    /// Factors the matrix given as sparse rows `(column, value)`.
    pub fn factor(rows: &[Vec<(usize, f64)>], kl: usize, ku: usize) -> Result<BandedLu> {
        let n = rows.len();
        let width = 2 * kl + ku + 1;
        let mut lu = BandedLu { n, kl, ku, width, data: vec![0.0; n * width], pivots: vec![0; n] };
        for (r, row) in rows.iter().enumerate() {
            for &(c, v) in row {
                if c + kl < r || c > r + ku {
                    return Err(Error::invalid(format!(
                        "entry ({r}, {c}) lies outside the band ({kl}, {ku})"
                    )));
                }
                *lu.at_mut(r, c) += v;
            }
        }
        lu.eliminate()?;
        Ok(lu)
    }

    #[inline]
    fn pos(&self, r: usize, c: usize) -> usize {
        r * self.width + (c + self.kl - r)
    }

    #[inline]
    fn at(&self, r: usize, c: usize) -> f64 {
        self.data[self.pos(r, c)]
    }

    #[inline]
    fn at_mut(&mut self, r: usize, c: usize) -> &mut f64 {
        let p = self.pos(r, c);
        &mut self.data[p]
    }

    fn eliminate(&mut self) -> Result<()> {
        let n = self.n;
        for c in 0..n {
            let last_row = (c + self.kl).min(n - 1);
            let last_col = (c + self.kl + self.ku).min(n - 1);
            let mut p = c;
            let mut best = self.at(c, c).abs();
            for r in c + 1..=last_row {
                let v = self.at(r, c).abs();
                if v > best {
                    best = v;
                    p = r;
                }
            }
            if best == 0.0 || !best.is_finite() {
                return Err(Error::Solver { residual: f64::INFINITY });
            }
            self.pivots[c] = p;
            if p != c {
                for k in c..=last_col {
                    let (a, b) = (self.pos(c, k), self.pos(p, k));
                    self.data.swap(a, b);
                }
            }
            let pivot = self.at(c, c);
            let pivot_row = self.pos(c, c);
            for r in c + 1..=last_row {
                let l = self.at(r, c) / pivot;
                if l == 0.0 {
                    continue;
                }
                *self.at_mut(r, c) = l;
                let dst = self.pos(r, c);
                let len = last_col - c;
                let (head, tail) = self.data.split_at_mut(dst.max(pivot_row));
                // rows are disjoint, r > c
                let (src, dst) = (&head[pivot_row + 1..pivot_row + 1 + len], &mut tail[1..1 + len]);
                for (d, s) in dst.iter_mut().zip(src) {
                    *d -= l * s;
                }
            }
        }
        Ok(())
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut x = b.to_vec();
        for c in 0..n {
            let p = self.pivots[c];
            x.swap(c, p);
            let xc = x[c];
            if xc != 0.0 {
                for r in c + 1..=(c + self.kl).min(n - 1) {
                    x[r] -= self.at(r, c) * xc;
                }
            }
        }
        for c in (0..n).rev() {
            let last_col = (c + self.kl + self.ku).min(n - 1);
            let mut s = x[c];
            for k in c + 1..=last_col {
                s -= self.at(c, k) * x[k];
            }
            x[c] = s / self.at(c, c);
        }
        x
    }
}

/// `b − A x` for sparse rows.
pub fn residual(rows: &[Vec<(usize, f64)>], x: &[f64], b: &[f64]) -> Vec<f64> {
    rows.iter()
        .zip(b)
        .map(|(row, bi)| bi - row.iter().map(|&(c, v)| v * x[c]).sum::<f64>())
        .collect()
}

pub fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn matches_dense_solution() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let (n, kl, ku): (usize, usize, usize) = (40, 3, 2);
        let rows: Vec<Vec<(usize, f64)>> = (0..n)
            .map(|r| {
                let lo = r.saturating_sub(kl);
                let hi = (r + ku).min(n - 1);
                // small diagonal forces pivoting
                (lo..=hi).map(|c| (c, if c == r { 0.01 } else { rng.gen_range(-1.0..1.0) })).collect()
            })
            .collect();
        let x_true: Vec<f64> = (0..n).map(|i| (i as f64).sin()).collect();
        let b: Vec<f64> = rows.iter().map(|row| row.iter().map(|&(c, v)| v * x_true[c]).sum()).collect();
        let lu = BandedLu::factor(&rows, kl, ku).unwrap();
        let x = lu.solve(&b);
        let err = x.iter().zip(&x_true).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err < 1e-10, "err = {err}");
    }
}
