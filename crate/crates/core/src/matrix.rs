//! Small dense real matrices (width ≤ 8 in practice) and their norms.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

/// Convergence tolerance of the Jacobi sweep, relative to the Gram matrix scale.
pub const JACOBI_TOL: f64 = 1e-12;

#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Mat {
            rows: r,
            cols: c,
            data: rows.iter().flatten().copied().collect(),
        }
    }

    /// The 0/1 matrix of a map `[rows] -> [cols]`: entry `(u, map[u])` is 1.
    pub fn from_map(map: &[usize], cols: usize) -> Self {
        let mut m = Self::zeros(map.len(), cols);
        for (u, &v) in map.iter().enumerate() {
            m[(u, v)] = 1.0;
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Mat {
        let mut t = Mat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn scale(&self, s: f64) -> Mat {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    /// `self += s * other`
    pub fn add_scaled(&mut self, other: &Mat, s: f64) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += s * b;
        }
    }

    /// `out = self * rhs`, reusing `out`'s allocation.
    pub fn mul_into(&self, rhs: &Mat, out: &mut Mat) {
        assert_eq!(self.cols, rhs.rows, "inner dimensions differ");
        out.rows = self.rows;
        out.cols = rhs.cols;
        out.data.clear();
        out.data.resize(self.rows * rhs.cols, 0.0);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == 0.0 {
                    continue;
                }
                let rrow = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                let orow = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (o, r) in orow.iter_mut().zip(rrow) {
                    *o += a * r;
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0.0)
    }

    pub fn max_abs_diff(&self, other: &Mat) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Operator 2-norm: the square root of the top eigenvalue of the smaller Gram matrix.
    pub fn spectral_norm(&self) -> f64 {
        if self.rows == 0 || self.cols == 0 {
            return 0.0;
        }
        let gram = if self.cols <= self.rows {
            self.transpose() * self
        } else {
            self * &self.transpose()
        };
        top_eigenvalue_symmetric(&gram).max(0.0).sqrt()
    }
}

/// Largest eigenvalue of a symmetric matrix.
///
/// Closed forms for sizes 1 and 2, cyclic Jacobi rotations otherwise.
pub fn top_eigenvalue_symmetric(a: &Mat) -> f64 {
    let n = a.rows;
    assert_eq!(n, a.cols, "matrix must be square");
    match n {
        0 => 0.0,
        1 => a[(0, 0)],
        2 => {
            let (p, q, r) = (a[(0, 0)], a[(0, 1)], a[(1, 1)]);
            let mid = 0.5 * (p + r);
            let half = 0.5 * (p - r);
            mid + (half * half + q * q).sqrt()
        }
        _ => jacobi_eigenvalues(a).into_iter().fold(f64::NEG_INFINITY, f64::max),
    }
}

/// All eigenvalues of a symmetric matrix by cyclic Jacobi sweeps.
pub fn jacobi_eigenvalues(a: &Mat) -> Vec<f64> {
    let n = a.rows;
    let mut m = a.clone();
    let scale = m.frobenius().max(f64::MIN_POSITIVE);
    for _sweep in 0..100 {
        let mut off = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                off += m[(i, j)] * m[(i, j)];
            }
        }
        if off.sqrt() <= JACOBI_TOL * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = m[(k, p)];
                    let akq = m[(k, q)];
                    m[(k, p)] = c * akp - s * akq;
                    m[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = m[(p, k)];
                    let aqk = m[(q, k)];
                    m[(p, k)] = c * apk - s * aqk;
                    m[(q, k)] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| m[(i, i)]).collect()
}

impl std::ops::Index<(usize, usize)> for Mat {
    type Output = f64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Mat {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul<&Mat> for &Mat {
    type Output = Mat;
    fn mul(self, rhs: &Mat) -> Mat {
        let mut out = Mat::zeros(self.rows, rhs.cols);
        self.mul_into(rhs, &mut out);
        out
    }
}

impl Mul<&Mat> for Mat {
    type Output = Mat;
    fn mul(self, rhs: &Mat) -> Mat {
        &self * rhs
    }
}

impl Add<&Mat> for &Mat {
    type Output = Mat;
    fn add(self, rhs: &Mat) -> Mat {
        let mut out = self.clone();
        out.add_scaled(rhs, 1.0);
        out
    }
}

impl Sub<&Mat> for &Mat {
    type Output = Mat;
    fn sub(self, rhs: &Mat) -> Mat {
        let mut out = self.clone();
        out.add_scaled(rhs, -1.0);
        out
    }
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Mat{}x{}[", self.rows, self.cols)?;
        for i in 0..self.rows {
            if i > 0 {
                f.write_str("; ")?;
            }
            for j in 0..self.cols {
                if j > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{}", self[(i, j)])?;
            }
        }
        f.write_str("]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn oracle_norm(m: &Mat) -> f64 {
        let nm = nalgebra::DMatrix::from_row_slice(m.rows(), m.cols(), m.data());
        nm.singular_values().max()
    }

    #[test]
    fn known_norms() {
        assert_eq!(Mat::identity(3).spectral_norm(), 1.0);
        let xor = Mat::from_rows(&[vec![0.5, -0.5], vec![-0.5, 0.5]]);
        assert!((xor.spectral_norm() - 1.0).abs() < 1e-15);
        let dict = Mat::from_rows(&[vec![0.5, -0.5], vec![0.5, -0.5]]);
        assert!((dict.spectral_norm() - 1.0).abs() < 1e-15);
        assert_eq!(Mat::zeros(3, 2).spectral_norm(), 0.0);
        // rank one, all-ones 3x3 has norm 3
        let ones = Mat::from_rows(&[vec![1.0; 3], vec![1.0; 3], vec![1.0; 3]]);
        assert!((ones.spectral_norm() - 3.0).abs() < 1e-12);
    }

    fn matrices() -> impl Strategy<Value = Mat> {
        (1usize..=8, 1usize..=8).prop_flat_map(|(r, c)| {
            proptest::collection::vec(-2.0f64..2.0, r * c).prop_map(move |d| Mat {
                rows: r,
                cols: c,
                data: d,
            })
        })
    }

    proptest! {
        #[test]
        fn spectral_matches_svd_oracle(m in matrices()) {
            let ours = m.spectral_norm();
            let theirs = oracle_norm(&m);
            prop_assert!((ours - theirs).abs() <= 1e-9 * theirs.max(1.0), "{ours} vs {theirs}");
        }

        #[test]
        fn spectral_at_most_frobenius(m in matrices()) {
            prop_assert!(m.spectral_norm() <= m.frobenius() * (1.0 + 1e-12) + 1e-15);
        }
    }
}
