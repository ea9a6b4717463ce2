//! Small dense real linear algebra used by the module, norm and functional code.
//!
//! Dimensions here are tiny (a handful of coordinates), so everything is plain
//! row-major `Vec<f64>` with O(n^3) algorithms.

use alloc::vec;
use alloc::vec::Vec;

/// Residual tolerance for rank and span-membership tests.
pub const RANK_TOL: f64 = 1e-9;

pub fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

pub fn norm(x: &[f64]) -> f64 {
    libm::sqrt(dot(x, x))
}

pub fn add(x: &[f64], y: &[f64]) -> Vec<f64> {
    x.iter().zip(y).map(|(a, b)| a + b).collect()
}

pub fn sub(x: &[f64], y: &[f64]) -> Vec<f64> {
    x.iter().zip(y).map(|(a, b)| a - b).collect()
}

pub fn scale(x: &[f64], s: f64) -> Vec<f64> {
    x.iter().map(|a| a * s).collect()
}

/// `y += s * x`
pub fn axpy(s: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += s * xi;
    }
}

pub fn unit(n: usize, i: usize) -> Vec<f64> {
    let mut e = vec![0.0; n];
    e[i] = 1.0;
    e
}

pub fn is_zero_vec(x: &[f64], tol: f64) -> bool {
    x.iter().all(|v| v.abs() <= tol)
}

/// Removes from `v` its projection onto the span of the orthonormal `basis`.
/// Two passes of modified Gram-Schmidt keep the result orthogonal to working precision.
pub fn reject(basis: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    let mut r = v.to_vec();
    for _ in 0..2 {
        for q in basis {
            let c = dot(q, &r);
            axpy(-c, q, &mut r);
        }
    }
    r
}

/// Orthogonal projection of `v` onto the span of the orthonormal `basis`.
pub fn project(basis: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    sub(v, &reject(basis, v))
}

/// Tests whether the residual of `v` against an orthonormal basis is negligible,
/// relative to the size of `v`.
pub fn in_span(basis: &[Vec<f64>], v: &[f64]) -> bool {
    let scale = norm(v).max(1.0);
    norm(&reject(basis, v)) <= RANK_TOL * scale
}

/// Orthonormal basis of the span of `vectors` (pivoted Gram-Schmidt: vectors whose
/// residual falls under the tolerance are skipped).
pub fn orthonormalize(vectors: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for v in vectors {
        let r = reject(&basis, v);
        let rn = norm(&r);
        if rn > RANK_TOL * norm(v).max(1.0) {
            basis.push(scale(&r, 1.0 / rn));
        }
    }
    basis
}

pub fn rank(vectors: &[Vec<f64>]) -> usize {
    orthonormalize(vectors).len()
}

/// Dense row-major matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    /// Builds a matrix from rows; all rows must share one length.
    pub fn from_rows(rows: &[Vec<f64>]) -> Option<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return None;
        }
        Some(Mat { rows: r, cols: c, data: rows.iter().flatten().copied().collect() })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Mat::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// `u v^T - v u^T`.
    pub fn wedge(u: &[f64], v: &[f64]) -> Self {
        let n = u.len();
        Mat::from_fn(n, n, |i, j| u[i] * v[j] - v[i] * u[j])
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

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        Mat::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.rows).map(|i| dot(self.row(i), x)).collect()
    }

    pub fn matmul(&self, other: &Mat) -> Mat {
        Mat::from_fn(self.rows, other.cols, |i, j| {
            (0..self.cols).map(|k| self[(i, k)] * other[(k, j)]).sum()
        })
    }

    pub fn scaled(&self, s: f64) -> Mat {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(|v| v * s).collect() }
    }

    pub fn plus(&self, other: &Mat) -> Mat {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    /// `x^T A y`.
    pub fn bilinear(&self, x: &[f64], y: &[f64]) -> f64 {
        dot(x, &self.mul_vec(y))
    }

    /// `x^T A y` for antisymmetric `A`, summed over the wedge `x_i y_j - x_j y_i` so that
    /// `x = y` gives exactly zero.
    pub fn antisymmetric_bilinear(&self, x: &[f64], y: &[f64]) -> f64 {
        let mut s = 0.0;
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                s += self[(i, j)] * (x[i] * y[j] - x[j] * y[i]);
            }
        }
        s
    }

    /// Largest entry of the symmetric part `(A + A^T)/2` in absolute value.
    pub fn max_symmetric_part(&self) -> f64 {
        let mut worst = 0.0_f64;
        for i in 0..self.rows {
            for j in 0..self.cols {
                worst = worst.max(((self[(i, j)] + self[(j, i)]) / 2.0).abs());
            }
        }
        worst
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }
}

impl core::ops::Index<(usize, usize)> for Mat {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl core::ops::IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
/// Returns eigenvalues in descending order with matching unit eigenvectors.
pub fn symmetric_eigen(a: &Mat) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = a.rows();
    let mut m = a.clone();
    let mut v = Mat::identity(n);
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[(i, j)] * m[(i, j)])
            .sum();
        let diag: f64 = (0..n).map(|i| m[(i, i)] * m[(i, i)]).sum();
        if off <= 1e-30 * diag.max(1e-300) || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + libm::sqrt(theta * theta + 1.0));
                let c = 1.0 / libm::sqrt(t * t + 1.0);
                let s = t * c;
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(j, j)].partial_cmp(&m[(i, i)]).unwrap_or(core::cmp::Ordering::Equal));
    let values = order.iter().map(|&i| m[(i, i)]).collect();
    let vectors = order.iter().map(|&i| (0..n).map(|k| v[(k, i)]).collect()).collect();
    (values, vectors)
}

/// Largest singular value of `a` and a unit right singular vector attaining it.
pub fn top_singular(a: &Mat) -> (f64, Vec<f64>) {
    let gram = a.transpose().matmul(a);
    let (values, vectors) = symmetric_eigen(&gram);
    match values.first() {
        Some(&lambda) => (libm::sqrt(lambda.max(0.0)), vectors[0].clone()),
        None => (0.0, Vec::new()),
    }
}

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
/// Returns `None` when a pivot falls under the tolerance.
pub fn solve(a: &Mat, b: &[f64]) -> Option<Vec<f64>> {
    let n = a.rows();
    let mut m = a.clone();
    let mut rhs = b.to_vec();
    let scale = a.max_abs().max(1e-300);
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| m[(i, col)].abs().partial_cmp(&m[(j, col)].abs()).unwrap())?;
        if m[(pivot, col)].abs() <= 1e-14 * scale {
            return None;
        }
        if pivot != col {
            for k in 0..n {
                let tmp = m[(col, k)];
                m[(col, k)] = m[(pivot, k)];
                m[(pivot, k)] = tmp;
            }
            rhs.swap(col, pivot);
        }
        for i in (col + 1)..n {
            let factor = m[(i, col)] / m[(col, col)];
            if factor == 0.0 {
                continue;
            }
            for k in col..n {
                m[(i, k)] -= factor * m[(col, k)];
            }
            rhs[i] -= factor * rhs[col];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = ((i + 1)..n).map(|k| m[(i, k)] * x[k]).sum();
        x[i] = (rhs[i] - s) / m[(i, i)];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orthonormalize_drops_dependent_vectors() {
        let vs = vec![vec![1.0, 1.0, 0.0], vec![2.0, 2.0, 0.0], vec![0.0, 1.0, 0.0]];
        let q = orthonormalize(&vs);
        assert_eq!(q.len(), 2);
        assert!(dot(&q[0], &q[1]).abs() < 1e-15);
        assert!(in_span(&q, &[3.0, -1.0, 0.0]));
        assert!(!in_span(&q, &[0.0, 0.0, 1e-3]));
    }

    #[test]
    fn jacobi_recovers_known_spectrum() {
        let a = Mat::from_rows(&[vec![2.0, 1.0, 0.0], vec![1.0, 2.0, 0.0], vec![0.0, 0.0, 5.0]]).unwrap();
        let (vals, vecs) = symmetric_eigen(&a);
        let expect = [5.0, 3.0, 1.0];
        for (v, e) in vals.iter().zip(expect) {
            assert!((v - e).abs() < 1e-12);
        }
        for (val, vec) in vals.iter().zip(&vecs) {
            let av = a.mul_vec(vec);
            for (x, y) in av.iter().zip(vec) {
                assert!((x - val * y).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn top_singular_of_cross_product_matrix_is_axis_norm() {
        // [w]_x for w = (3, 4, 0)
        let c = Mat::from_rows(&[vec![0.0, 0.0, 4.0], vec![0.0, 0.0, -3.0], vec![-4.0, 3.0, 0.0]]).unwrap();
        let (s, u) = top_singular(&c);
        assert!((s - 5.0).abs() < 1e-12);
        assert!((norm(&c.mul_vec(&u)) - 5.0).abs() < 1e-12);
    }

    #[test]
    fn solve_small_system() {
        let a = Mat::from_rows(&[vec![0.0, 2.0], vec![3.0, 1.0]]).unwrap();
        let x = solve(&a, &[4.0, 5.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-15 && (x[1] - 2.0).abs() < 1e-15);
        let singular = Mat::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
        assert!(solve(&singular, &[1.0, 2.0]).is_none());
    }
}
