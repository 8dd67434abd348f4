//! Dense exact matrices over [`Rational`].
//!
//! Small and purpose-built: congruence transformations, inverses, kernels.
//! The kernel computation clears denominators and eliminates entirely over
//! the integers to keep coefficient growth in check.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::Error;
use crate::rational::Rational;

#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self, Error> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::WrongDimension("ragged rows".into()));
        }
        Ok(Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> Rational) -> Self {
        let mut m = Matrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn diagonal(entries: &[Rational]) -> Self {
        let n = entries.len();
        let mut m = Matrix::zeros(n, n);
        for (i, e) in entries.iter().enumerate() {
            m[(i, i)] = e.clone();
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

    pub fn is_symmetric(&self) -> bool {
        if !self.is_square() {
            return false;
        }
        for i in 0..self.rows {
            for j in 0..i {
                if self[(i, j)] != self[(j, i)] {
                    return false;
                }
            }
        }
        true
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in matrix product");
        Matrix::from_fn(self.rows, other.cols, |i, j| {
            let mut acc = Rational::zero();
            for k in 0..self.cols {
                acc = acc + self[(i, k)].clone() * other[(k, j)].clone();
            }
            acc
        })
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(self.cols, v.len(), "dimension mismatch in matrix-vector product");
        (0..self.rows)
            .map(|i| {
                let mut acc = Rational::zero();
                for k in 0..self.cols {
                    acc = acc + self[(i, k)].clone() * v[k].clone();
                }
                acc
            })
            .collect()
    }

    pub fn scale(&self, s: &Rational) -> Matrix {
        Matrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)].clone() * s.clone())
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix::from_fn(self.rows, self.cols, |i, j| {
            self[(i, j)].clone() + other[(i, j)].clone()
        })
    }

    /// The congruence transform `c^T * self * c`.
    pub fn congruent(&self, c: &Matrix) -> Matrix {
        c.transpose().mul(self).mul(c)
    }

    pub fn block_diag(blocks: &[&Matrix]) -> Matrix {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut m = Matrix::zeros(rows, cols);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    m[(r0 + i, c0 + j)] = b[(i, j)].clone();
                }
            }
            r0 += b.rows;
            c0 += b.cols;
        }
        m
    }

    pub fn determinant(&self) -> Rational {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let n = self.rows;
        let mut m = self.clone();
        let mut det = Rational::one();
        for k in 0..n {
            let pivot_row = match (k..n).find(|&i| !m[(i, k)].is_zero()) {
                Some(i) => i,
                None => return Rational::zero(),
            };
            if pivot_row != k {
                for j in 0..n {
                    let a = m[(k, j)].clone();
                    let b = m[(pivot_row, j)].clone();
                    m[(k, j)] = b;
                    m[(pivot_row, j)] = a;
                }
                det = -det;
            }
            let pivot = m[(k, k)].clone();
            det = det * pivot.clone();
            for i in k + 1..n {
                if m[(i, k)].is_zero() {
                    continue;
                }
                let factor = m[(i, k)].clone() / pivot.clone();
                for j in k..n {
                    let delta = factor.clone() * m[(k, j)].clone();
                    m[(i, j)] = m[(i, j)].clone() - delta;
                }
            }
        }
        det
    }

    pub fn inverse(&self) -> Result<Matrix, Error> {
        assert!(self.is_square(), "inverse of a non-square matrix");
        let n = self.rows;
        let mut m = self.clone();
        let mut inv = Matrix::identity(n);
        for k in 0..n {
            let pivot_row = (k..n)
                .find(|&i| !m[(i, k)].is_zero())
                .ok_or(Error::Singular)?;
            if pivot_row != k {
                for j in 0..n {
                    let (a, b) = (m[(k, j)].clone(), m[(pivot_row, j)].clone());
                    m[(k, j)] = b;
                    m[(pivot_row, j)] = a;
                    let (a, b) = (inv[(k, j)].clone(), inv[(pivot_row, j)].clone());
                    inv[(k, j)] = b;
                    inv[(pivot_row, j)] = a;
                }
            }
            let pivot = m[(k, k)].clone();
            for j in 0..n {
                m[(k, j)] = m[(k, j)].clone() / pivot.clone();
                inv[(k, j)] = inv[(k, j)].clone() / pivot.clone();
            }
            for i in 0..n {
                if i == k || m[(i, k)].is_zero() {
                    continue;
                }
                let factor = m[(i, k)].clone();
                for j in 0..n {
                    let dm = factor.clone() * m[(k, j)].clone();
                    m[(i, j)] = m[(i, j)].clone() - dm;
                    let di = factor.clone() * inv[(k, j)].clone();
                    inv[(i, j)] = inv[(i, j)].clone() - di;
                }
            }
        }
        Ok(inv)
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && !self.determinant().is_zero()
    }

    /// Basis of the right kernel, computed fraction-free over the integers.
    ///
    /// Each basis vector is a primitive integer vector with its first nonzero
    /// entry positive; the list is ordered by free column.
    pub fn nullspace(&self) -> Vec<Vec<Rational>> {
        let mut m: Vec<Vec<BigInt>> = (0..self.rows)
            .map(|i| {
                let mut lcm = BigInt::one();
                for j in 0..self.cols {
                    lcm = lcm.lcm(self[(i, j)].denom());
                }
                (0..self.cols)
                    .map(|j| {
                        let e = self[(i, j)].clone() * Rational::from_int(lcm.clone());
                        debug_assert!(e.is_integer());
                        e.numer().clone()
                    })
                    .collect()
            })
            .collect();

        let mut pivots: Vec<(usize, usize)> = Vec::new(); // (row, col)
        let mut rank = 0usize;
        for col in 0..self.cols {
            let pivot_row = match (rank..m.len()).find(|&i| !m[i][col].is_zero()) {
                Some(i) => i,
                None => continue,
            };
            m.swap(rank, pivot_row);
            let (pivot_slice, rest) = m.split_at_mut(rank + 1);
            let pivot_row_data = &pivot_slice[rank];
            let pivot = pivot_row_data[col].clone();
            for row in rest.iter_mut().filter(|r| !r[col].is_zero()) {
                let g = pivot.gcd(&row[col]);
                let pm = &pivot / &g;
                let cm = &row[col] / &g;
                let mut content = BigInt::zero();
                for j in 0..self.cols {
                    row[j] = &row[j] * &pm - &pivot_row_data[j] * &cm;
                    content = content.gcd(&row[j]);
                }
                if !content.is_zero() && !content.is_one() {
                    for e in row.iter_mut() {
                        *e /= &content;
                    }
                }
            }
            pivots.push((rank, col));
            rank += 1;
        }

        let pivot_cols: Vec<usize> = pivots.iter().map(|&(_, c)| c).collect();
        let mut basis = Vec::new();
        for free in (0..self.cols).filter(|c| !pivot_cols.contains(c)) {
            let mut x = vec![Rational::zero(); self.cols];
            x[free] = Rational::one();
            for &(row, col) in pivots.iter().rev() {
                let mut acc = Rational::zero();
                for j in col + 1..self.cols {
                    if m[row][j].is_zero() || x[j].is_zero() {
                        continue;
                    }
                    acc = acc + Rational::from_int(m[row][j].clone()) * x[j].clone();
                }
                x[col] = -acc / Rational::from_int(m[row][col].clone());
            }
            basis.push(primitive_scale(x));
        }
        basis
    }
}

/// Scales a rational vector to a primitive integer vector whose first
/// nonzero entry is positive.
fn primitive_scale(v: Vec<Rational>) -> Vec<Rational> {
    let mut lcm = BigInt::one();
    for e in &v {
        lcm = lcm.lcm(e.denom());
    }
    let ints: Vec<BigInt> = v
        .iter()
        .map(|e| (e.clone() * Rational::from_int(lcm.clone())).numer().clone())
        .collect();
    let mut g = BigInt::zero();
    for e in &ints {
        g = g.gcd(e);
    }
    if g.is_zero() {
        return v;
    }
    let sign = ints
        .iter()
        .find(|e| !e.is_zero())
        .map_or(BigInt::one(), |e| BigInt::from(e.signum()));
    let g = g * sign;
    ints.into_iter()
        .map(|e| Rational::from_int(e / &g))
        .collect()
}

impl Index<(usize, usize)> for Matrix {
    type Output = Rational;
    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self[(i, j)])?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}

/// `v^T * g * w` for a symmetric `g`.
pub fn bilinear(g: &Matrix, v: &[Rational], w: &[Rational]) -> Rational {
    let gw = g.mul_vec(w);
    v.iter()
        .zip(gw.iter())
        .fold(Rational::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn mat(rows: &[&[i64]]) -> Matrix {
        Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&e| Rational::from_int(e)).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn determinant_and_inverse() {
        let m = mat(&[&[2, 1], &[1, 1]]);
        assert_eq!(m.determinant(), q("1"));
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), Matrix::identity(2));

        let singular = mat(&[&[1, 2], &[2, 4]]);
        assert_eq!(singular.determinant(), q("0"));
        assert!(matches!(singular.inverse(), Err(Error::Singular)));
    }

    #[test]
    fn determinant_needs_row_swap() {
        let m = mat(&[&[0, 1], &[1, 0]]);
        assert_eq!(m.determinant(), q("-1"));
    }

    #[test]
    fn tridiagonal_determinants() {
        // det of the (n x n) tridiagonal (2,-1) matrix is n+1
        for n in 1..=6 {
            let m = Matrix::from_fn(n, n, |i, j| {
                if i == j {
                    q("2")
                } else if i.abs_diff(j) == 1 {
                    q("-1")
                } else {
                    q("0")
                }
            });
            assert_eq!(m.determinant(), Rational::from_int(n as i64 + 1));
        }
    }

    #[test]
    fn nullspace_of_rank_one() {
        let m = mat(&[&[1, 2, 3], &[2, 4, 6]]);
        let basis = m.nullspace();
        assert_eq!(basis.len(), 2);
        for v in &basis {
            assert_eq!(m.mul_vec(v), vec![q("0"), q("0")]);
        }
    }

    #[test]
    fn nullspace_of_invertible_is_empty() {
        assert!(mat(&[&[2, 1], &[1, 1]]).nullspace().is_empty());
    }

    #[test]
    fn nullspace_with_rational_entries() {
        let m = Matrix::from_rows(vec![vec![q("1/2"), q("1/3"), q("-1")]]).unwrap();
        let basis = m.nullspace();
        assert_eq!(basis.len(), 2);
        for v in &basis {
            assert_eq!(m.mul_vec(v), vec![q("0")]);
            // primitive integer output
            assert!(v.iter().all(|e| e.is_integer()));
        }
    }

    #[test]
    fn congruence_transform() {
        let g = mat(&[&[1, 0], &[0, 1]]);
        let c = mat(&[&[1, 1], &[0, 1]]);
        assert_eq!(g.congruent(&c), mat(&[&[1, 1], &[1, 2]]));
    }
}
