//! Small dense linear algebra for `d <= MAX_DIM`.
//!
//! Determinants use LU factorization with partial pivoting; symmetric
//! eigenproblems use the cyclic Jacobi method. Sizes are tiny and fixed, so
//! everything lives on the stack.

use crate::bodies::Point;
use crate::error::{invalid, Error, Result};
use crate::MAX_DIM;

/// Square matrix of order `n <= MAX_DIM`, row-major.
#[derive(Clone, Copy, PartialEq)]
pub struct Matrix {
    n: usize,
    a: [[f64; MAX_DIM]; MAX_DIM],
}

impl std::fmt::Debug for Matrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_list().entries(self.rows()).finish()
    }
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        assert!((1..=MAX_DIM).contains(&n), "matrix order {n} out of range");
        Matrix {
            n,
            a: [[0.0; MAX_DIM]; MAX_DIM],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.a[i][i] = 1.0;
        }
        m
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m.a[i][i] = v;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if !(1..=MAX_DIM).contains(&n) {
            return Err(Error::UnsupportedDimension(n));
        }
        let mut m = Self::zeros(n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: row.len(),
                });
            }
            for (j, &v) in row.iter().enumerate() {
                if !v.is_finite() {
                    return Err(invalid("matrix entries must be finite"));
                }
                m.a[i][j] = v;
            }
        }
        Ok(m)
    }

    /// Matrix whose columns are the given points.
    pub fn from_columns(cols: &[Point]) -> Result<Self> {
        let n = cols.len();
        if !(1..=MAX_DIM).contains(&n) {
            return Err(Error::UnsupportedDimension(n));
        }
        let mut m = Self::zeros(n);
        for (j, c) in cols.iter().enumerate() {
            if c.dim() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: c.dim(),
                });
            }
            for i in 0..n {
                m.a[i][j] = c[i];
            }
        }
        Ok(m)
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.a[i][j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.a[i][j] = v;
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| self.a[i][..self.n].to_vec()).collect()
    }

    pub fn column(&self, j: usize) -> Point {
        let mut p = Point::zeros(self.n);
        for i in 0..self.n {
            p[i] = self.a[i][j];
        }
        p
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                t.a[j][i] = self.a[i][j];
            }
        }
        t
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut m = *self;
        for i in 0..self.n {
            for j in 0..self.n {
                m.a[i][j] *= s;
            }
        }
        m
    }

    pub fn mul(&self, other: &Matrix) -> Self {
        assert_eq!(self.n, other.n);
        let mut m = Self::zeros(self.n);
        for i in 0..self.n {
            for k in 0..self.n {
                let aik = self.a[i][k];
                for j in 0..self.n {
                    m.a[i][j] += aik * other.a[k][j];
                }
            }
        }
        m
    }

    #[inline]
    pub fn mul_vec(&self, p: &Point) -> Point {
        debug_assert_eq!(self.n, p.dim());
        let mut out = Point::zeros(self.n);
        for i in 0..self.n {
            let mut s = 0.0;
            for j in 0..self.n {
                s += self.a[i][j] * p[j];
            }
            out[i] = s;
        }
        out
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.a[i][i]).sum()
    }

    /// Largest absolute entry of `self - other`.
    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                m = m.max((self.a[i][j] - other.a[i][j]).abs());
            }
        }
        m
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| (self.a[i][j] - self.a[j][i]).abs() <= tol))
    }

    pub fn det(&self) -> f64 {
        let mut a = self.a;
        lu_det(&mut a, self.n)
    }

    /// Inverse by Gauss-Jordan elimination with partial pivoting.
    pub fn inverse(&self) -> Result<Self> {
        let n = self.n;
        let mut a = self.a;
        let mut inv = Self::identity(n).a;
        for col in 0..n {
            let piv = (col..n)
                .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
                .unwrap();
            if a[piv][col].abs() < 1e-300 {
                return Err(Error::SingularMatrix(0.0));
            }
            a.swap(col, piv);
            inv.swap(col, piv);
            let p = a[col][col];
            for j in 0..n {
                a[col][j] /= p;
                inv[col][j] /= p;
            }
            for i in 0..n {
                if i != col {
                    let f = a[i][col];
                    if f != 0.0 {
                        for j in 0..n {
                            a[i][j] -= f * a[col][j];
                            inv[i][j] -= f * inv[col][j];
                        }
                    }
                }
            }
        }
        Ok(Matrix { n, a: inv })
    }

    /// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
    ///
    /// Returns eigenvalues in ascending order and the matrix whose columns are
    /// the matching orthonormal eigenvectors.
    pub fn symmetric_eigen(&self) -> (Vec<f64>, Matrix) {
        let n = self.n;
        let mut a = self.a;
        let mut v = Self::identity(n).a;
        for _sweep in 0..100 {
            let mut off = 0.0;
            for i in 0..n {
                for j in (i + 1)..n {
                    off += a[i][j] * a[i][j];
                }
            }
            let scale: f64 = (0..n).map(|i| a[i][i] * a[i][i]).sum::<f64>().max(1e-300);
            if off <= 1e-30 * scale {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = a[p][q];
                    if apq.abs() < 1e-300 {
                        continue;
                    }
                    let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let t = if theta == 0.0 { 1.0 } else { t };
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    for k in 0..n {
                        let akp = a[k][p];
                        let akq = a[k][q];
                        a[k][p] = c * akp - s * akq;
                        a[k][q] = s * akp + c * akq;
                    }
                    for k in 0..n {
                        let apk = a[p][k];
                        let aqk = a[q][k];
                        a[p][k] = c * apk - s * aqk;
                        a[q][k] = s * apk + c * aqk;
                    }
                    for k in 0..n {
                        let vkp = v[k][p];
                        let vkq = v[k][q];
                        v[k][p] = c * vkp - s * vkq;
                        v[k][q] = s * vkp + c * vkq;
                    }
                }
            }
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| a[i][i].total_cmp(&a[j][j]));
        let values = order.iter().map(|&i| a[i][i]).collect();
        let mut vecs = Self::zeros(n);
        for (new_j, &old_j) in order.iter().enumerate() {
            for i in 0..n {
                vecs.a[i][new_j] = v[i][old_j];
            }
        }
        (values, vecs)
    }

    /// `f(self)` for symmetric `self`, applying `f` to the spectrum.
    pub fn symmetric_function(&self, f: impl Fn(f64) -> f64) -> Matrix {
        let (vals, vecs) = self.symmetric_eigen();
        let mut out = Self::zeros(self.n);
        for (k, &lambda) in vals.iter().enumerate() {
            let fl = f(lambda);
            for i in 0..self.n {
                for j in 0..self.n {
                    out.a[i][j] += fl * vecs.a[i][k] * vecs.a[j][k];
                }
            }
        }
        out
    }
}

/// Determinant of the leading `n x n` block, destroying `a`.
#[inline]
pub(crate) fn lu_det(a: &mut [[f64; MAX_DIM]; MAX_DIM], n: usize) -> f64 {
    let mut det = 1.0;
    for col in 0..n {
        let mut piv = col;
        let mut best = a[col][col].abs();
        for (i, row) in a.iter().enumerate().take(n).skip(col + 1) {
            if row[col].abs() > best {
                best = row[col].abs();
                piv = i;
            }
        }
        if best == 0.0 {
            return 0.0;
        }
        if piv != col {
            a.swap(col, piv);
            det = -det;
        }
        let p = a[col][col];
        det *= p;
        for i in (col + 1)..n {
            let f = a[i][col] / p;
            if f != 0.0 {
                for j in (col + 1)..n {
                    a[i][j] -= f * a[col][j];
                }
            }
        }
    }
    det
}

/// Unit vector orthogonal to the span of `vectors` (`d - 1` vectors in
/// dimension `d`), chosen as the coordinate axis with the largest residual
/// after projection. Sign is arbitrary.
pub(crate) fn orthogonal_complement(vectors: &[Point], d: usize) -> Result<Point> {
    let basis = orthonormalize(vectors, 1e-12)?;
    if basis.len() + 1 != d {
        return Err(invalid("vectors do not span a hyperplane"));
    }
    let mut best: Option<Point> = None;
    for i in 0..d {
        let mut r = Point::axis(d, i);
        for _ in 0..2 {
            for b in &basis {
                let c = r.dot(b);
                r = r.sub(&b.scale(c));
            }
        }
        if best.as_ref().is_none_or(|b| r.norm() > b.norm()) {
            best = Some(r);
        }
    }
    let r = best.unwrap();
    Ok(r.scale(1.0 / r.norm()))
}

/// Modified Gram-Schmidt with re-orthogonalization; drops dependent vectors.
pub(crate) fn orthonormalize(vectors: &[Point], tol: f64) -> Result<Vec<Point>> {
    let mut basis: Vec<Point> = Vec::with_capacity(vectors.len());
    for v in vectors {
        let mut r = *v;
        for _ in 0..2 {
            for b in &basis {
                let c = r.dot(b);
                r = r.sub(&b.scale(c));
            }
        }
        let nr = r.norm();
        if nr > tol * v.norm().max(1.0) {
            basis.push(r.scale(1.0 / nr));
        }
    }
    Ok(basis)
}
