//! Small dense matrices over any [`Ring`].

use crate::error::{Error, Result};
use crate::scalar::{Ring, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Ring> Matrix<T> {
    pub fn new(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|row| row.len() != c) {
            return Err(Error::DimensionMismatch {
                expected: c,
                found: bad.len(),
            });
        }
        Self::new(r, c, rows.into_iter().flatten().collect())
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn zeros_like(rows: usize, cols: usize, like: &T) -> Self {
        Self {
            rows,
            cols,
            data: vec![like.zero_like(); rows * cols],
        }
    }

    pub fn identity_like(n: usize, like: &T) -> Self {
        Self::from_fn(n, n, |i, j| {
            if i == j {
                like.one_like()
            } else {
                like.zero_like()
            }
        })
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

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn map<U: Ring>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn try_mul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: rhs.rows,
            });
        }
        Ok(Self::from_fn(self.rows, rhs.cols, |i, j| {
            (0..self.cols).fold(self.get(i, 0).zero_like(), |acc, k| {
                acc.add(&self.get(i, k).mul(rhs.get(k, j)))
            })
        }))
    }

    pub fn mul_vec(&self, v: &[T]) -> Result<Vec<T>> {
        if self.cols != v.len() {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: v.len(),
            });
        }
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(v[0].zero_like(), |acc, (a, b)| acc.add(&a.mul(b)))
            })
            .collect())
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        if (self.rows, self.cols) != (rhs.rows, rhs.cols) {
            return Err(Error::DimensionMismatch {
                expected: self.data.len(),
                found: rhs.data.len(),
            });
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a.add(b))
                .collect(),
        })
    }

    pub fn scale(&self, c: &T::Base) -> Self {
        self.map(|v| v.scale(c))
    }

    pub fn trace(&self) -> T {
        (0..self.rows.min(self.cols))
            .fold(self.data[0].zero_like(), |acc, i| acc.add(self.get(i, i)))
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    /// `u^T self v`.
    pub fn bilinear(&self, u: &[T], v: &[T]) -> Result<T> {
        let mv = self.mul_vec(v)?;
        Ok(dot(u, &mv))
    }

    /// Gauss-Jordan inverse; pivots are chosen by largest base value.
    pub fn inverse(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                found: self.cols,
            });
        }
        let n = self.rows;
        if n == 0 {
            return Ok(self.clone());
        }
        let like = self.data[0].clone();
        let mut a = self.clone();
        let mut inv = Self::identity_like(n, &like);
        for col in 0..n {
            let pivot_row = (col..n)
                .filter(|&r| !a.get(r, col).base_value().is_zero())
                .max_by(|&r, &s| {
                    let x = a.get(r, col).base_value().to_f64().abs();
                    let y = a.get(s, col).base_value().to_f64().abs();
                    x.total_cmp(&y).then(s.cmp(&r))
                })
                .ok_or(Error::Singular)?;
            if pivot_row != col {
                a.swap_rows(pivot_row, col);
                inv.swap_rows(pivot_row, col);
            }
            let p = a.get(col, col).recip()?;
            for j in 0..n {
                let v = a.get(col, j).mul(&p);
                a.set(col, j, v);
                let v = inv.get(col, j).mul(&p);
                inv.set(col, j, v);
            }
            for r in 0..n {
                if r == col || a.get(r, col).is_zero() {
                    continue;
                }
                let factor = a.get(r, col).clone();
                for j in 0..n {
                    let v = a.get(r, j).sub(&factor.mul(a.get(col, j)));
                    a.set(r, j, v);
                    let v = inv.get(r, j).sub(&factor.mul(inv.get(col, j)));
                    inv.set(r, j, v);
                }
            }
        }
        Ok(inv)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

impl<S: Scalar> Matrix<S> {
    pub fn identity(n: usize) -> Self {
        Self::identity_like(n, &S::zero())
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::zeros_like(rows, cols, &S::zero())
    }

    pub fn from_i64_rows(rows: &[&[i64]]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| S::from_i64(v)).collect())
                .collect(),
        )
        .expect("ragged rows")
    }

    pub fn rank(&self, tol: f64) -> usize {
        S::matrix_rank(self.rows, self.cols, &self.data, tol)
    }

    /// Embeds every entry as a constant of the algebra of `like`.
    pub fn lift<E: Ring<Base = S>>(&self, like: &E) -> Matrix<E> {
        self.map(|v| like.constant_like(v.clone()))
    }

    pub fn max_abs(&self) -> f64 {
        self.data
            .iter()
            .map(|v| v.to_f64().abs())
            .fold(0.0, f64::max)
    }
}

pub fn dot<T: Ring>(u: &[T], v: &[T]) -> T {
    let zero = u.first().or(v.first()).map(Ring::zero_like);
    u.iter().zip(v).fold(
        zero.expect("dot product of empty vectors"),
        |acc, (a, b)| acc.add(&a.mul(b)),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    #[test]
    fn inverse_roundtrip() {
        let m: Matrix<Rational> = Matrix::from_i64_rows(&[&[2, 1, 0], &[1, 3, 1], &[0, 1, 4]]);
        let inv = m.inverse().unwrap();
        assert_eq!(m.try_mul(&inv).unwrap(), Matrix::identity(3));
    }

    #[test]
    fn inverse_needs_pivoting() {
        let m: Matrix<Rational> = Matrix::from_i64_rows(&[&[0, 1], &[1, 0]]);
        assert_eq!(m.inverse().unwrap(), m);
        let s: Matrix<Rational> = Matrix::from_i64_rows(&[&[1, 2], &[2, 4]]);
        assert_eq!(s.inverse(), Err(Error::Singular));
    }
}
