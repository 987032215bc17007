//! Dense symmetric and SPD kernels shared by every other module.

use nalgebra::{DMatrix, SymmetricEigen, SVD};

use super::sym::SymMatrix;
use super::Tolerances;
use crate::error::{Error, Result};

/// Eigendecomposition of a single symmetric matrix, eigenvalues ascending.
///
/// Columns of `vectors` are unit vectors whose largest-magnitude component
/// is positive (first such component on ties).
#[derive(Debug, Clone)]
pub struct SymEigen {
    pub values: Vec<f64>,
    pub vectors: DMatrix<f64>,
}

impl SymEigen {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// `V f(Λ) Vᵀ`, symmetrized.
    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> Result<SymMatrix> {
        let mut scaled = self.vectors.clone();
        for (j, &lam) in self.values.iter().enumerate() {
            let s = f(lam);
            scaled.column_mut(j).scale_mut(s);
        }
        SymMatrix::symmetrize(&(scaled * self.vectors.transpose()))
    }

    pub fn min_value(&self) -> f64 {
        self.values.first().copied().unwrap_or(f64::NAN)
    }

    pub fn max_abs_value(&self) -> f64 {
        self.values.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }
}

fn eig_iteration_cap(n: usize) -> usize {
    1000 + 100 * n
}

/// Full symmetric eigendecomposition with deterministic ordering and signs.
pub fn sym_eigen(a: &SymMatrix) -> Result<SymEigen> {
    let n = a.dim();
    if n == 0 {
        return Ok(SymEigen { values: Vec::new(), vectors: DMatrix::zeros(0, 0) });
    }
    let eig = SymmetricEigen::try_new(a.as_matrix().clone(), f64::EPSILON, eig_iteration_cap(n))
        .ok_or(Error::ConvergenceFailure { n })?;

    let mut order: Vec<usize> = (0..n).collect();
    // Stable sort keeps the solver's output order for exact ties.
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));

    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    normalize_column_signs(&mut vectors);
    Ok(SymEigen { values, vectors })
}

/// Eigenvalues only, ascending.
pub fn sym_eigenvalues(a: &SymMatrix) -> Result<Vec<f64>> {
    let n = a.dim();
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut values: Vec<f64> = a.as_matrix().clone().symmetric_eigenvalues().iter().copied().collect();
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::ConvergenceFailure { n });
    }
    values.sort_by(f64::total_cmp);
    Ok(values)
}

/// Flips each column so that its largest-magnitude entry is positive.
pub fn normalize_column_signs(x: &mut DMatrix<f64>) {
    for mut col in x.column_iter_mut() {
        let mut best = 0usize;
        let mut best_abs = -1.0;
        for (i, v) in col.iter().enumerate() {
            if v.abs() > best_abs {
                best_abs = v.abs();
                best = i;
            }
        }
        if best_abs > 0.0 && col[best] < 0.0 {
            col.neg_mut();
        }
    }
}

/// Smallest eigenvalue; `<= 0` means the matrix is not SPD.
pub fn spd_check(a: &SymMatrix) -> Result<f64> {
    if let Some((idx, _)) = a.as_matrix().iter().enumerate().find(|(_, v)| !v.is_finite()) {
        let n = a.dim();
        return Err(Error::NonFinite { row: idx % n, col: idx / n });
    }
    Ok(sym_eigenvalues(a)?.first().copied().unwrap_or(f64::NAN))
}

/// Lower triangular Cholesky factor `L` with `L Lᵀ = A`.
#[derive(Debug, Clone)]
pub struct CholeskyFactor {
    l: DMatrix<f64>,
}

impl CholeskyFactor {
    pub fn l(&self) -> &DMatrix<f64> {
        &self.l
    }

    pub fn into_l(self) -> DMatrix<f64> {
        self.l
    }

    pub fn dim(&self) -> usize {
        self.l.nrows()
    }

    /// `L⁻¹ B`
    pub fn solve_l(&self, b: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        self.l
            .solve_lower_triangular(b)
            .ok_or(Error::NotPositiveDefinite { what: "Cholesky factor", pivot: None })
    }

    /// `L⁻ᵀ B`
    pub fn solve_lt(&self, b: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        self.l
            .tr_solve_lower_triangular(b)
            .ok_or(Error::NotPositiveDefinite { what: "Cholesky factor", pivot: None })
    }

    /// `B L⁻ᵀ`, i.e. `(L⁻¹ Bᵀ)ᵀ`.
    pub fn right_solve_lt(&self, b: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        Ok(self.solve_l(&b.transpose())?.transpose())
    }
}

/// Cholesky factorization; reports the first non-positive pivot.
pub fn cholesky(a: &SymMatrix) -> Result<CholeskyFactor> {
    cholesky_named(a, "matrix")
}

pub(crate) fn cholesky_named(a: &SymMatrix, what: &'static str) -> Result<CholeskyFactor> {
    let n = a.dim();
    // Row-major lower triangle so the inner products run over contiguous rows.
    let mut l = vec![0.0f64; n * n];
    let src = a.as_matrix();
    for i in 0..n {
        for j in 0..=i {
            let (row_i, row_j) = (&l[i * n..i * n + j], &l[j * n..j * n + j]);
            let dot: f64 = row_i.iter().zip(row_j).map(|(x, y)| x * y).sum();
            let s = src[(i, j)] - dot;
            if i == j {
                if !(s > 0.0) {
                    return Err(Error::NotPositiveDefinite { what, pivot: Some(i) });
                }
                l[i * n + i] = s.sqrt();
            } else {
                l[i * n + j] = s / l[j * n + j];
            }
        }
    }
    Ok(CholeskyFactor { l: DMatrix::from_row_slice(n, n, &l) })
}

fn check_pd_spectrum(eig: &SymEigen, tol: &Tolerances) -> Result<()> {
    let scale = eig.max_abs_value();
    if !(eig.min_value() > tol.positive_definite * scale) {
        return Err(Error::NotPositiveDefinite { what: "matrix", pivot: None });
    }
    Ok(())
}

/// Principal square root of an SPD matrix.
pub fn spd_sqrt(a: &SymMatrix) -> Result<SymMatrix> {
    spd_power(a, 0.5, &Tolerances::default())
}

/// Inverse of the principal square root of an SPD matrix.
pub fn spd_inv_sqrt(a: &SymMatrix) -> Result<SymMatrix> {
    spd_power(a, -0.5, &Tolerances::default())
}

/// SPD inverse through the eigendecomposition.
pub fn spd_inverse(a: &SymMatrix) -> Result<SymMatrix> {
    spd_power(a, -1.0, &Tolerances::default())
}

/// `A^p` for SPD `A`; rejects `λ_min <= tol_pd·‖A‖₂`.
pub fn spd_power(a: &SymMatrix, p: f64, tol: &Tolerances) -> Result<SymMatrix> {
    let eig = sym_eigen(a)?;
    check_pd_spectrum(&eig, tol)?;
    if p == 0.5 {
        eig.map_values(f64::sqrt)
    } else if p == -0.5 {
        eig.map_values(|v| 1.0 / v.sqrt())
    } else if p == -1.0 {
        eig.map_values(f64::recip)
    } else {
        eig.map_values(|v| v.powf(p))
    }
}

/// Singular values, descending.
pub fn singular_values(m: &DMatrix<f64>) -> Result<Vec<f64>> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Ok(Vec::new());
    }
    let n = m.nrows().max(m.ncols());
    let svd = SVD::try_new(m.clone(), false, false, f64::EPSILON, eig_iteration_cap(n))
        .ok_or(Error::ConvergenceFailure { n })?;
    let mut sv: Vec<f64> = svd.singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    Ok(sv)
}

pub fn spectral_norm(m: &DMatrix<f64>) -> Result<f64> {
    Ok(singular_values(m)?.first().copied().unwrap_or(0.0))
}

/// `‖A‖₂ = max |λ|` for symmetric `A`.
pub fn sym_spectral_norm(a: &SymMatrix) -> Result<f64> {
    let v = sym_eigenvalues(a)?;
    Ok(v.iter().fold(0.0, |acc, x| acc.max(x.abs())))
}

/// Euclidean-orthonormal basis of `Ran(basis)` (thin QR).
pub fn orthonormalize(basis: &DMatrix<f64>) -> DMatrix<f64> {
    basis.clone().qr().q()
}

/// `M`-orthonormal basis of `Ran(basis)`: `Y L⁻ᵀ` with `L Lᵀ = Yᵀ M Y`.
pub fn m_orthonormalize(basis: &DMatrix<f64>, m: &SymMatrix) -> Result<DMatrix<f64>> {
    let gram = m.congruence(basis)?;
    let chol = cholesky_named(&gram, "basis Gram matrix")?;
    chol.right_solve_lt(basis)
}

/// Largest absolute entry of `XᵀMX − I` (`M = I` when `m` is `None`).
pub fn orthonormality_defect(x: &DMatrix<f64>, m: Option<&SymMatrix>) -> f64 {
    let gram = match m {
        Some(m) => x.transpose() * (m.as_matrix() * x),
        None => x.transpose() * x,
    };
    let k = gram.nrows();
    let mut worst = 0.0f64;
    for i in 0..k {
        for j in 0..k {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((gram[(i, j)] - target).abs());
        }
    }
    worst
}
