use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Dense row-major integer matrix.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<BigInt>>) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        Self { rows: rows.len(), cols, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.data
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|v| v * k).collect() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * &other[(k, j)];
                }
            }
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect() }
    }

    /// gcd of all entries.
    pub fn content(&self) -> BigInt {
        self.data.iter().fold(BigInt::zero(), |g, v| g.gcd(v))
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> BigInt {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a: Vec<Vec<BigInt>> = self.row_vecs();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                    Some(i) => {
                        a.swap(i, k);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                    a[i][j] = v / &prev;
                }
            }
            prev = a[k][k].clone();
        }
        sign * &a[n - 1][n - 1]
    }

    /// Adjugate of a 3×3 matrix: `M · adj(M) = det(M) · I`.
    pub fn adjugate3(&self) -> Self {
        assert!(self.rows == 3 && self.cols == 3, "adjugate3 needs a 3x3 matrix");
        let m = |i: usize, j: usize| &self[(i, j)];
        let cof = |r0: usize, r1: usize, c0: usize, c1: usize| m(r0, c0) * m(r1, c1) - m(r0, c1) * m(r1, c0);
        let mut adj = Self::zeros(3, 3);
        // adj[j][i] = cofactor(i, j)
        adj[(0, 0)] = cof(1, 2, 1, 2);
        adj[(1, 0)] = -cof(1, 2, 0, 2);
        adj[(2, 0)] = cof(1, 2, 0, 1);
        adj[(0, 1)] = -cof(0, 2, 1, 2);
        adj[(1, 1)] = cof(0, 2, 0, 2);
        adj[(2, 1)] = -cof(0, 2, 0, 1);
        adj[(0, 2)] = cof(0, 1, 1, 2);
        adj[(1, 2)] = -cof(0, 1, 0, 2);
        adj[(2, 2)] = cof(0, 1, 0, 1);
        adj
    }

    /// Characteristic polynomial `x³ − s1 x² + s2 x − s3` of a 3×3 matrix,
    /// returned as `[s1, s2, s3]`.
    pub fn charpoly3(&self) -> [BigInt; 3] {
        assert!(self.rows == 3 && self.cols == 3);
        let m = |i: usize, j: usize| &self[(i, j)];
        let trace = m(0, 0) + m(1, 1) + m(2, 2);
        let minors = (m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0))
            + (m(0, 0) * m(2, 2) - m(0, 2) * m(2, 0))
            + (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1));
        [trace, minors, self.det()]
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "[")?;
            for (j, v) in self.row(i).iter().enumerate() {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{v}")?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

fn sub_scaled(target: &mut [BigInt], src: &[BigInt], q: &BigInt) {
    for (t, s) in target.iter_mut().zip(src) {
        *t -= q * s;
    }
}

/// Row-style Hermite normal form of a full-column-rank integer matrix.
///
/// The result is square (`cols × cols`), upper triangular with positive
/// diagonal, and every entry above a pivot lies in `[0, pivot)`. Two
/// matrices span the same lattice iff their HNFs are equal.
pub fn hnf(basis: &IntMatrix) -> Result<IntMatrix> {
    let m = basis.cols();
    let mut rows: Vec<Vec<BigInt>> = basis.row_vecs();
    rows.retain(|r| r.iter().any(|v| !v.is_zero()));
    if rows.len() < m {
        return Err(Error::RankDeficient);
    }
    for j in 0..m {
        // gcd-reduce column j over rows j.. into a single pivot at row j
        loop {
            let pivot = (j..rows.len())
                .filter(|&i| !rows[i][j].is_zero())
                .min_by(|&a, &b| rows[a][j].magnitude().cmp(rows[b][j].magnitude()));
            let Some(p) = pivot else {
                return Err(Error::RankDeficient);
            };
            rows.swap(j, p);
            let mut done = true;
            for i in j + 1..rows.len() {
                if rows[i][j].is_zero() {
                    continue;
                }
                let q = rows[i][j].div_floor(&rows[j][j]);
                let (head, tail) = rows.split_at_mut(i);
                sub_scaled(&mut tail[0], &head[j], &q);
                if !rows[i][j].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if rows[j][j].is_negative() {
            for v in rows[j].iter_mut() {
                *v = -&*v;
            }
        }
    }
    rows.truncate(m);
    for j in 0..m {
        for i in 0..j {
            let q = rows[i][j].div_floor(&rows[j][j]);
            if !q.is_zero() {
                let (head, tail) = rows.split_at_mut(j);
                sub_scaled(&mut head[i], &tail[0], &q);
            }
        }
    }
    Ok(IntMatrix::from_rows(rows))
}
