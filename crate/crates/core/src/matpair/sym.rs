use std::ops::{Add, Sub};

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Dense real symmetric matrix.
///
/// Only the lower triangle of the input is trusted; the upper triangle is
/// overwritten by its mirror, so `a[i][j] == a[j][i]` holds bit for bit.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    data: DMatrix<f64>,
}

impl SymMatrix {
    /// Builds from the lower triangle of `m` (upper triangle ignored).
    pub fn from_lower(mut m: DMatrix<f64>) -> Result<Self> {
        let n = square_dim(&m)?;
        for j in 0..n {
            for i in j..n {
                let v = m[(i, j)];
                if !v.is_finite() {
                    return Err(Error::NonFinite { row: i, col: j });
                }
                m[(j, i)] = v;
            }
        }
        Ok(Self { data: m })
    }

    /// Builds from a full matrix that must already be symmetric up to
    /// `rel_tol * max|a_ij|`.
    pub fn from_dense(m: DMatrix<f64>, rel_tol: f64) -> Result<Self> {
        let n = square_dim(&m)?;
        let scale = m.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        for j in 0..n {
            for i in j..n {
                let (a, b) = (m[(i, j)], m[(j, i)]);
                if !a.is_finite() {
                    return Err(Error::NonFinite { row: i, col: j });
                }
                if !b.is_finite() {
                    return Err(Error::NonFinite { row: j, col: i });
                }
                let deviation = (a - b).abs();
                if deviation > rel_tol * scale {
                    return Err(Error::NotSymmetric { row: i, col: j, deviation });
                }
            }
        }
        Self::from_lower(m)
    }

    /// Symmetrizes `(m + mᵀ)/2`. Used for products that are symmetric in
    /// exact arithmetic.
    pub fn symmetrize(m: &DMatrix<f64>) -> Result<Self> {
        square_dim(m)?;
        Self::from_lower((m + m.transpose()) * 0.5)
    }

    pub fn from_row_slice(n: usize, values: &[f64]) -> Result<Self> {
        if values.len() != n * n {
            return Err(Error::DimensionMismatch(format!(
                "expected {} entries for a {n}x{n} matrix, got {}",
                n * n,
                values.len()
            )));
        }
        Self::from_dense(DMatrix::from_row_slice(n, n, values), 0.0)
    }

    pub fn identity(n: usize) -> Self {
        Self { data: DMatrix::identity(n, n) }
    }

    pub fn zeros(n: usize) -> Self {
        Self { data: DMatrix::zeros(n, n) }
    }

    pub fn from_diagonal(diag: &[f64]) -> Result<Self> {
        let n = diag.len();
        let mut m = DMatrix::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        Self::from_lower(m)
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[(i, j)]
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.data
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.data
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.data[(i, i)]).collect()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self { data: &self.data * s }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.norm()
    }

    /// Number of structurally nonzero entries in the lower triangle.
    pub fn lower_nnz(&self) -> usize {
        let n = self.dim();
        (0..n).map(|j| (j..n).filter(|&i| self.data[(i, j)] != 0.0).count()).sum()
    }

    /// Congruence `Bᵀ A B`, symmetrized.
    pub fn congruence(&self, b: &DMatrix<f64>) -> Result<Self> {
        if b.nrows() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "congruence: matrix is {0}x{0}, basis has {1} rows",
                self.dim(),
                b.nrows()
            )));
        }
        Self::symmetrize(&(b.transpose() * (&self.data * b)))
    }

    pub(crate) fn check_same_dim(&self, other: &SymMatrix, ctx: &str) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(format!(
                "{ctx}: {} vs {}",
                self.dim(),
                other.dim()
            )));
        }
        Ok(())
    }
}

fn square_dim(m: &DMatrix<f64>) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "matrix is {}x{}, expected square",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(m.nrows())
}

impl Add for &SymMatrix {
    type Output = SymMatrix;

    fn add(self, rhs: &SymMatrix) -> SymMatrix {
        assert_eq!(self.dim(), rhs.dim(), "SymMatrix dimension mismatch");
        SymMatrix { data: &self.data + &rhs.data }
    }
}

impl Sub for &SymMatrix {
    type Output = SymMatrix;

    fn sub(self, rhs: &SymMatrix) -> SymMatrix {
        assert_eq!(self.dim(), rhs.dim(), "SymMatrix dimension mismatch");
        SymMatrix { data: &self.data - &rhs.data }
    }
}

impl AsRef<DMatrix<f64>> for SymMatrix {
    fn as_ref(&self) -> &DMatrix<f64> {
        &self.data
    }
}
