//! Floating-point LLL reduction and Fincke–Pohst enumeration.
//!
//! These routines only propose candidates. Every caller re-checks candidate
//! vectors in exact arithmetic, and the enumeration radius carries a relative
//! slack so that rounding can only add candidates, never drop them.

use std::ops::ControlFlow;

use crate::error::{Error, Result};

/// Relative slack added to every enumeration radius.
pub const RADIUS_SLACK: f64 = 1e-7;

/// A lattice basis given by its columns, reduced by LLL, together with the
/// unimodular change of basis.
#[derive(Clone, Debug)]
pub struct ReducedBasis {
    /// `dim × dim` matrix, row-major, of the original basis (columns are basis vectors).
    original: Vec<Vec<f64>>,
    /// Unimodular transform: reduced column `j` equals `original · unimodular[·][j]`.
    pub unimodular: Vec<Vec<i64>>,
    pub dim: usize,
}

fn column(m: &[Vec<f64>], j: usize) -> Vec<f64> {
    m.iter().map(|r| r[j]).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Gram–Schmidt data of a list of vectors: squared norms and coefficients.
fn gram_schmidt(cols: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let k = cols.len();
    let mut star: Vec<Vec<f64>> = Vec::with_capacity(k);
    let mut norms = vec![0.0; k];
    let mut mu = vec![vec![0.0; k]; k];
    for i in 0..k {
        let mut v = cols[i].clone();
        for j in 0..i {
            mu[i][j] = if norms[j] > 0.0 { dot(&cols[i], &star[j]) / norms[j] } else { 0.0 };
            for (vi, sj) in v.iter_mut().zip(&star[j]) {
                *vi -= mu[i][j] * sj;
            }
        }
        norms[i] = dot(&v, &v);
        star.push(v);
    }
    (norms, mu)
}

impl ReducedBasis {
    /// LLL-reduces the columns of `rows` (a square matrix) with parameter 0.99.
    pub fn new(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::Invalid("lattice basis must be square".into()));
        }
        if rows.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::Invalid("lattice basis has non-finite entries".into()));
        }
        let mut cols: Vec<Vec<f64>> = (0..dim).map(|j| column(rows, j)).collect();
        let mut unimodular: Vec<Vec<i64>> = (0..dim).map(|i| (0..dim).map(|j| i64::from(i == j)).collect()).collect();
        let mut k = 1;
        let mut swaps = 0usize;
        while k < dim {
            for j in (0..k).rev() {
                let (norms, mu) = gram_schmidt(&cols[..=k]);
                if norms[j] == 0.0 {
                    return Err(Error::Singular("lattice basis is degenerate".into()));
                }
                let q = mu[k][j].round();
                if q != 0.0 {
                    let qi = q as i64;
                    for t in 0..dim {
                        cols[k][t] -= q * cols[j][t];
                    }
                    for row in unimodular.iter_mut() {
                        row[k] =
                            row[k].checked_sub(qi.checked_mul(row[j]).ok_or_else(overflow)?).ok_or_else(overflow)?;
                    }
                }
            }
            let (norms, mu) = gram_schmidt(&cols[..=k]);
            if norms[k] >= (0.99 - mu[k][k - 1] * mu[k][k - 1]) * norms[k - 1] {
                k += 1;
            } else {
                cols.swap(k, k - 1);
                for row in unimodular.iter_mut() {
                    row.swap(k, k - 1);
                }
                k = (k - 1).max(1);
                swaps += 1;
                if swaps > 100_000 {
                    return Err(Error::Budget("LLL did not converge".into()));
                }
            }
        }
        Ok(ReducedBasis { original: rows.to_vec(), unimodular, dim })
    }

    /// Reduced basis vectors recomputed from the original matrix.
    pub fn reduced_columns(&self) -> Vec<Vec<f64>> {
        (0..self.dim)
            .map(|j| {
                (0..self.dim)
                    .map(|i| (0..self.dim).map(|t| self.original[i][t] * self.unimodular[t][j] as f64).sum())
                    .collect()
            })
            .collect()
    }

    /// Maps coordinates in the reduced basis back to the original basis.
    pub fn to_original(&self, y: &[i64]) -> Result<Vec<i64>> {
        (0..self.dim)
            .map(|i| {
                self.unimodular[i].iter().zip(y).try_fold(0i64, |acc, (&u, &v)| {
                    u.checked_mul(v).and_then(|p| acc.checked_add(p)).ok_or_else(overflow)
                })
            })
            .collect()
    }

    /// Visits every nonzero integer vector `a` (original coordinates) with
    /// `‖B a‖₂² ≤ r2` (up to the slack). Exactly one of `a`, `-a` is visited.
    pub fn enumerate(
        &self,
        r2: f64,
        max_nodes: u64,
        mut visit: impl FnMut(&[i64]) -> Result<ControlFlow<()>>,
    ) -> Result<()> {
        let dim = self.dim;
        let cols = self.reduced_columns();
        let (norms, mu) = gram_schmidt(&cols);
        if norms.iter().any(|&v| !(v > 0.0)) {
            return Err(Error::Singular("lattice basis is degenerate".into()));
        }
        let radius = r2 * (1.0 + RADIUS_SLACK) + 1e-300;
        let mut y = vec![0i64; dim];
        let mut nodes = 0u64;
        let mut state = Walk { norms: &norms, mu: &mu, radius, nodes: &mut nodes, max_nodes };
        // the last nonzero reduced coordinate is positive, so ±y appear once
        let _ = state.level(dim, 0.0, &mut y, &mut |y| visit(&self.to_original(y)?))?;
        Ok(())
    }
}

fn overflow() -> Error {
    Error::Budget("lattice coordinates overflow 64-bit integers".into())
}

struct Walk<'a> {
    norms: &'a [f64],
    mu: &'a [Vec<f64>],
    radius: f64,
    nodes: &'a mut u64,
    max_nodes: u64,
}

impl Walk<'_> {
    /// Fixes coordinates `level..dim`; `used` is their contribution to the norm.
    fn level(
        &mut self,
        level: usize,
        used: f64,
        y: &mut [i64],
        visit: &mut dyn FnMut(&[i64]) -> Result<ControlFlow<()>>,
    ) -> Result<ControlFlow<()>> {
        *self.nodes += 1;
        if *self.nodes > self.max_nodes {
            return Err(Error::Budget(format!("enumeration exceeded {} nodes", self.max_nodes)));
        }
        if level == 0 {
            if y.iter().all(|&v| v == 0) {
                return Ok(ControlFlow::Continue(()));
            }
            return visit(y);
        }
        let i = level - 1;
        let center: f64 = -(level..y.len()).map(|j| self.mu[j][i] * y[j] as f64).sum::<f64>();
        let rem = (self.radius - used).max(0.0);
        let half = (rem / self.norms[i]).sqrt();
        let mut lo = (center - half).ceil() as i64;
        let hi = (center + half).floor() as i64;
        // With every higher coordinate zero, only the nonnegative half is needed.
        if y[level..].iter().all(|&v| v == 0) {
            lo = lo.max(0);
        }
        if lo > hi {
            return Ok(ControlFlow::Continue(()));
        }
        // Schnorr–Euchner order: nearest to the centre first.
        let start = center.round().clamp(lo as f64, hi as f64) as i64;
        let (mut up, mut down) = (start, start - 1);
        while up <= hi || down >= lo {
            let take_up = down < lo || (up <= hi && (up as f64 - center).abs() <= (center - down as f64).abs());
            let v = if take_up {
                up += 1;
                up - 1
            } else {
                down -= 1;
                down + 1
            };
            let off = v as f64 - center;
            let here = used + off * off * self.norms[i];
            if here > self.radius {
                continue;
            }
            y[i] = v;
            if let ControlFlow::Break(()) = self.level(i, here, y, visit)? {
                y[i] = 0;
                return Ok(ControlFlow::Break(()));
            }
        }
        y[i] = 0;
        Ok(ControlFlow::Continue(()))
    }
}
