//! Dense exact rational matrices.

use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{invalid, Error, Result};
use crate::poly::SparsePolynomial;
use crate::rational::{format_rational, int, Rational};

#[derive(Clone, PartialEq, Eq)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RationalMatrix { rows, cols, data: vec![Rational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return invalid("ragged matrix rows");
        }
        Ok(RationalMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Result<Self> {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&v| int(v)).collect()).collect())
    }

    pub fn diagonal(entries: &[Rational]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, v) in entries.iter().enumerate() {
            m.set(i, i, v.clone());
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Rational> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn to_f64_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).iter().map(crate::rational::to_f64).collect()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::ArityMismatch { expected: self.cols, found: other.rows });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Result<Vec<Rational>> {
        if v.len() != self.cols {
            return Err(Error::ArityMismatch { expected: self.cols, found: v.len() });
        }
        Ok((0..self.rows).map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum()).collect())
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Result<Self> {
        if rows.iter().any(|&r| r >= self.rows) || cols.iter().any(|&c| c >= self.cols) {
            return invalid("submatrix index out of range");
        }
        let mut out = Self::zeros(rows.len(), cols.len());
        for (a, &r) in rows.iter().enumerate() {
            for (b, &c) in cols.iter().enumerate() {
                out.set(a, b, self.get(r, c).clone());
            }
        }
        Ok(out)
    }

    pub fn minor(&self, rows: &[usize], cols: &[usize]) -> Result<Rational> {
        if rows.len() != cols.len() {
            return invalid("minor needs equally many rows and columns");
        }
        self.submatrix(rows, cols)?.det()
    }

    /// Row-echelon reduction in place; returns (rank, sign of the permutation, pivot product).
    fn eliminate(&mut self) -> (usize, Rational) {
        let mut det = Rational::one();
        let mut rank = 0;
        for col in 0..self.cols {
            if rank == self.rows {
                break;
            }
            let Some(p) = (rank..self.rows).find(|&r| !self.get(r, col).is_zero()) else {
                det = Rational::zero();
                continue;
            };
            if p != rank {
                for j in 0..self.cols {
                    self.data.swap(p * self.cols + j, rank * self.cols + j);
                }
                det = -det;
            }
            let pivot = self.get(rank, col).clone();
            det *= &pivot;
            for r in rank + 1..self.rows {
                let factor = self.get(r, col) / &pivot;
                if factor.is_zero() {
                    continue;
                }
                for j in col..self.cols {
                    let v = self.get(r, j) - &factor * self.get(rank, j);
                    self.set(r, j, v);
                }
            }
            rank += 1;
        }
        (rank, det)
    }

    pub fn det(&self) -> Result<Rational> {
        if !self.is_square() {
            return invalid(format!("determinant of a {}x{} matrix", self.rows, self.cols));
        }
        if self.rows == 0 {
            return Ok(Rational::one());
        }
        let mut work = self.clone();
        let (rank, det) = work.eliminate();
        Ok(if rank < self.rows { Rational::zero() } else { det })
    }

    pub fn rank(&self) -> usize {
        let mut work = self.clone();
        work.eliminate().0
    }

    pub fn inverse(&self) -> Result<Self> {
        if !self.is_square() {
            return invalid("inverse of a non-square matrix");
        }
        let n = self.rows;
        let mut aug = Self::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, n + i, Rational::one());
        }
        for col in 0..n {
            let p = (col..n)
                .find(|&r| !aug.get(r, col).is_zero())
                .ok_or_else(|| Error::Singular(format!("{n}x{n} matrix has rank < {n}")))?;
            if p != col {
                for j in 0..2 * n {
                    aug.data.swap(p * 2 * n + j, col * 2 * n + j);
                }
            }
            let pivot = aug.get(col, col).clone();
            for j in 0..2 * n {
                let v = aug.get(col, j) / &pivot;
                aug.set(col, j, v);
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let factor = aug.get(r, col).clone();
                if factor.is_zero() {
                    continue;
                }
                for j in 0..2 * n {
                    let v = aug.get(r, j) - &factor * aug.get(col, j);
                    aug.set(r, j, v);
                }
            }
        }
        let mut inv = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv.set(i, j, aug.get(i, n + j).clone());
            }
        }
        Ok(inv)
    }

    /// Solves `self * x = b` for square nonsingular `self`.
    pub fn solve(&self, b: &[Rational]) -> Result<Vec<Rational>> {
        self.inverse()?.mul_vec(b)
    }

    /// Maximum absolute row sum (operator norm induced by the sup norm).
    pub fn sup_operator_norm(&self) -> Rational {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|v| v.abs()).sum::<Rational>())
            .max()
            .unwrap_or_else(Rational::zero)
    }
}

impl fmt::Debug for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = (0..self.rows)
            .map(|i| {
                let cells: Vec<String> = self.row(i).iter().map(format_rational).collect();
                format!("[{}]", cells.join(", "))
            })
            .collect();
        write!(f, "[{}]", rows.join(", "))
    }
}

/// Determinant of a square matrix of polynomials by fraction-free (Bareiss) elimination.
pub fn polynomial_determinant(mut m: Vec<Vec<SparsePolynomial>>, arity: usize) -> Result<SparsePolynomial> {
    let n = m.len();
    if m.iter().any(|r| r.len() != n) {
        return invalid("polynomial determinant needs a square matrix");
    }
    if n == 0 {
        return Ok(SparsePolynomial::one(arity));
    }
    let mut sign = false;
    let mut prev = SparsePolynomial::one(arity);
    for k in 0..n - 1 {
        let Some(p) = (k..n).find(|&r| !m[r][k].is_zero()) else {
            return Ok(SparsePolynomial::zero(arity));
        };
        if p != k {
            m.swap(p, k);
            sign = !sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &(&m[k][k] * &m[i][j]) - &(&m[i][k] * &m[k][j]);
                m[i][j] = num.div_exact(&prev)?;
            }
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    Ok(if sign { -&det } else { det })
}
