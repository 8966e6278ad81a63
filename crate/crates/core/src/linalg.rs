//! Minimal dense linear-algebra kernel.
//!
//! Everything here is sized for dense symmetric positive-definite systems
//! with a few hundred unknowns at most: plain Cholesky without pivoting,
//! triangular substitution, and the usual matrix/vector plumbing. All
//! operations are pure functions on immutable inputs.

use crate::error::{Error, Result};

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix needs {} entries, got {}",
                rows,
                cols,
                rows * cols,
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParams("non-finite matrix entry".into()));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Matrix::from_vec(r, c, rows.concat())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    /// `A x`.
    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "matvec: {}x{} by vector of length {}",
                self.rows,
                self.cols,
                x.len()
            )));
        }
        Ok((0..self.rows).map(|i| dot(self.row(i), x)).collect())
    }

    /// `A^T x`.
    pub fn matvec_t(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.rows {
            return Err(Error::DimensionMismatch(format!(
                "matvec_t: {}x{} by vector of length {}",
                self.rows,
                self.cols,
                x.len()
            )));
        }
        let mut out = vec![0.0; self.cols];
        for i in 0..self.rows {
            let row = self.row(i);
            let xi = x[i];
            for (o, &a) in out.iter_mut().zip(row) {
                *o += a * xi;
            }
        }
        Ok(out)
    }

    pub fn matmul(&self, rhs: &Matrix) -> Result<Matrix> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "matmul: {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for m in 0..self.cols {
                let a = self.get(i, m);
                if a == 0.0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.data[i * rhs.cols + j] += a * rhs.get(m, j);
                }
            }
        }
        Ok(out)
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j));
            }
        }
        out
    }

    /// `A^T A`, filled symmetrically.
    pub fn gram(&self) -> Matrix {
        let p = self.cols;
        let mut g = Matrix::zeros(p, p);
        for r in 0..self.rows {
            let row = self.row(r);
            for i in 0..p {
                let ri = row[i];
                if ri == 0.0 {
                    continue;
                }
                for j in i..p {
                    g.data[i * p + j] += ri * row[j];
                }
            }
        }
        for i in 0..p {
            for j in 0..i {
                g.data[i * p + j] = g.data[j * p + i];
            }
        }
        g
    }
}

/// Dot product; panics on length mismatch (internal plumbing).
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "dot: length mismatch");
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `y += alpha * x`.
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    assert_eq!(x.len(), y.len(), "axpy: length mismatch");
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Rank-one outer product `a b^T`.
pub fn outer(a: &[f64], b: &[f64]) -> Matrix {
    let mut m = Matrix::zeros(a.len(), b.len());
    for (i, &ai) in a.iter().enumerate() {
        for (j, &bj) in b.iter().enumerate() {
            m.set(i, j, ai * bj);
        }
    }
    m
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn norm_inf(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

/// Lower-triangular Cholesky factor of an SPD matrix: `lower * lower^T = A`.
#[derive(Debug, Clone)]
pub struct CholeskyFactor {
    lower: Matrix,
}

/// Plain Cholesky factorization of a symmetric positive-definite matrix.
///
/// Symmetry is checked to 1e-10 relative to the largest entry. A pivot at
/// or below `dim * machine_epsilon * max_diagonal` aborts with [`Error::NotSpd`]
/// rather than producing garbage.
pub fn cholesky(a: &Matrix) -> Result<CholeskyFactor> {
    let n = a.rows();
    if a.cols() != n {
        return Err(Error::DimensionMismatch(format!(
            "cholesky: {}x{} is not square",
            a.rows(),
            a.cols()
        )));
    }
    let scale = norm_inf(a.data());
    let sym_tol = 1e-10 * scale.max(1.0);
    for i in 0..n {
        for j in 0..i {
            if (a.get(i, j) - a.get(j, i)).abs() > sym_tol {
                return Err(Error::NotSpd(format!(
                    "asymmetric at ({i},{j}): {} vs {}",
                    a.get(i, j),
                    a.get(j, i)
                )));
            }
        }
    }
    let max_diag = (0..n).fold(0.0f64, |acc, i| acc.max(a.get(i, i)));
    let pivot_tol = n as f64 * f64::EPSILON * max_diag;

    let mut lower = Matrix::zeros(n, n);
    for j in 0..n {
        let mut d = a.get(j, j);
        for m in 0..j {
            let l = lower.get(j, m);
            d -= l * l;
        }
        if d <= pivot_tol || !d.is_finite() {
            return Err(Error::NotSpd(format!(
                "pivot {d:.3e} at column {j} (tolerance {pivot_tol:.3e})"
            )));
        }
        let root = d.sqrt();
        lower.set(j, j, root);
        for i in (j + 1)..n {
            let mut v = a.get(i, j);
            for m in 0..j {
                v -= lower.get(i, m) * lower.get(j, m);
            }
            lower.set(i, j, v / root);
        }
    }
    Ok(CholeskyFactor { lower })
}

impl CholeskyFactor {
    pub fn dim(&self) -> usize {
        self.lower.rows()
    }

    pub fn lower(&self) -> &Matrix {
        &self.lower
    }

    /// The upper-triangular transpose factor `lower^T`.
    pub fn upper(&self) -> Matrix {
        self.lower.transpose()
    }

    /// Solves `A x = b` where `A = lower * lower^T`.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        let y = self.forward_substitute(b)?;
        Ok(self.back_substitute_unchecked(&y))
    }

    /// Solves `lower * x = b` by forward substitution.
    ///
    /// Equivalently applies `(U^{-1})^T` for the upper factor `U = lower^T`,
    /// which is how dual vectors are mapped into transformed coordinates.
    pub fn forward_substitute(&self, b: &[f64]) -> Result<Vec<f64>> {
        let n = self.dim();
        if b.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "triangular solve: dim {} factor, length {} rhs",
                n,
                b.len()
            )));
        }
        let mut x = vec![0.0; n];
        for i in 0..n {
            let mut v = b[i];
            for m in 0..i {
                v -= self.lower.get(i, m) * x[m];
            }
            x[i] = v / self.lower.get(i, i);
        }
        Ok(x)
    }

    /// Solves `lower^T x = y` by back substitution (length already checked).
    fn back_substitute_unchecked(&self, y: &[f64]) -> Vec<f64> {
        let n = self.dim();
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let mut v = y[i];
            for m in (i + 1)..n {
                v -= self.lower.get(m, i) * x[m];
            }
            x[i] = v / self.lower.get(i, i);
        }
        x
    }
}
