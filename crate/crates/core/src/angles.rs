//! Sines of canonical angles between equal-dimension subspaces, in the
//! Euclidean and in an `M`-weighted inner product.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matpair::{cholesky_named, orthonormality_defect, singular_values, SymMatrix, Tolerances};

/// Canonical-angle sines, descending, with their spectral and Frobenius norms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AngleReport {
    pub k: usize,
    pub sines: Vec<f64>,
    pub norm2: f64,
    pub norm_f: f64,
}

impl AngleReport {
    /// Pads with zeros to `k` values; a `p×k` product with `p < k` leaves
    /// `k − p` angles identically zero.
    pub fn from_singular_values(mut sines: Vec<f64>, k: usize) -> Self {
        sines.sort_by(|a, b| b.total_cmp(a));
        sines.resize(k, 0.0);
        let norm2 = sines.first().copied().unwrap_or(0.0);
        let norm_f = sines.iter().map(|s| s * s).sum::<f64>().sqrt();
        Self { k, sines, norm2, norm_f }
    }

    pub fn zero(k: usize) -> Self {
        Self::from_singular_values(Vec::new(), k)
    }
}

fn check_bases(x: &DMatrix<f64>, y: &DMatrix<f64>) -> Result<()> {
    if x.nrows() != y.nrows() || x.ncols() != y.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "bases are {}x{} and {}x{}",
            x.nrows(),
            x.ncols(),
            y.nrows(),
            y.ncols()
        )));
    }
    if x.ncols() == 0 || x.ncols() > x.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "subspace dimension {} invalid for ambient dimension {}",
            x.ncols(),
            x.nrows()
        )));
    }
    Ok(())
}

pub fn sin_theta_euclid(x: &DMatrix<f64>, y: &DMatrix<f64>) -> Result<AngleReport> {
    sin_theta_euclid_with(x, y, &Tolerances::default())
}

/// Singular values of `(I − X Xᵀ) Y` for Euclidean-orthonormal bases.
pub fn sin_theta_euclid_with(x: &DMatrix<f64>, y: &DMatrix<f64>, tol: &Tolerances) -> Result<AngleReport> {
    check_bases(x, y)?;
    for basis in [x, y] {
        let deviation = orthonormality_defect(basis, None);
        if !(deviation <= tol.orthonormal) {
            return Err(Error::NotOrthonormal { deviation, tol: tol.orthonormal });
        }
    }
    let residual = y - x * (x.transpose() * y);
    Ok(AngleReport::from_singular_values(singular_values(&residual)?, x.ncols()))
}

pub fn sin_theta_m(x1: &DMatrix<f64>, y1: &DMatrix<f64>, m: &SymMatrix) -> Result<AngleReport> {
    sin_theta_m_with(x1, y1, m, &Tolerances::default())
}

/// Singular values of `M^{1/2} (I − X₁ X₁ᵀ M) Y₁` for `M`-orthonormal bases.
///
/// `M^{1/2}` is replaced by the Cholesky factor `Lᵀ`; the two differ by an
/// orthogonal factor on the left, which leaves singular values unchanged.
pub fn sin_theta_m_with(
    x1: &DMatrix<f64>,
    y1: &DMatrix<f64>,
    m: &SymMatrix,
    tol: &Tolerances,
) -> Result<AngleReport> {
    check_bases(x1, y1)?;
    if m.dim() != x1.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "M is {0}x{0}, bases have {1} rows",
            m.dim(),
            x1.nrows()
        )));
    }
    let chol = cholesky_named(m, "M")?;
    for basis in [x1, y1] {
        let deviation = orthonormality_defect(basis, Some(m));
        if !(deviation <= tol.m_orthonormal) {
            return Err(Error::NotMOrthonormal { deviation, tol: tol.m_orthonormal });
        }
    }
    let my1 = m.as_matrix() * y1;
    let residual = y1 - x1 * (x1.transpose() * my1);
    let weighted = chol.l().transpose() * residual;
    Ok(AngleReport::from_singular_values(singular_values(&weighted)?, x1.ncols()))
}

/// Lower-triangular `Y₁₁` with `Y₁₁ Y₁₁ᵀ = I − X̃₁ᵀ δM X̃₁`.
#[derive(Debug, Clone)]
pub struct CholCorrection {
    pub y11: DMatrix<f64>,
    /// False when `δM` vanishes on the block and `Y₁₁ = I` needs no inverse.
    pub applied_inverse: bool,
}

/// Correction for the leading `k` columns of the full perturbed basis `X̃`.
pub fn chol_correction(xtilde: &DMatrix<f64>, delta_m: &SymMatrix, k: usize) -> Result<CholCorrection> {
    if k == 0 || k > xtilde.ncols() {
        return Err(Error::BadBlockSize { k, n: xtilde.ncols() });
    }
    chol_correction_block(&xtilde.columns(0, k).into_owned(), delta_m)
}

/// Correction for an explicit selected block `X̃₁`.
pub fn chol_correction_block(xtilde1: &DMatrix<f64>, delta_m: &SymMatrix) -> Result<CholCorrection> {
    let projected = delta_m.congruence(xtilde1)?;
    let k = xtilde1.ncols();
    if projected.max_abs() == 0.0 {
        return Ok(CholCorrection { y11: DMatrix::identity(k, k), applied_inverse: false });
    }
    let block = &SymMatrix::identity(k) - &projected;
    let chol = cholesky_named(&block, "I - X~1* dM X~1").map_err(|_| Error::CorrectionNotPD)?;
    Ok(CholCorrection { y11: chol.into_l(), applied_inverse: true })
}

/// Singular values of `X̂₂ᵀ M X̃₁ Y₁₁⁻ᵀ`.
pub fn sin_theta_m_corrected(
    xhat2: &DMatrix<f64>,
    m: &SymMatrix,
    xtilde1: &DMatrix<f64>,
    corr: &CholCorrection,
) -> Result<AngleReport> {
    let n = m.dim();
    let k = xtilde1.ncols();
    if xhat2.nrows() != n || xtilde1.nrows() != n || xhat2.ncols() + k != n {
        return Err(Error::DimensionMismatch(format!(
            "X^2 is {}x{}, X~1 is {}x{}, M is {n}x{n}",
            xhat2.nrows(),
            xhat2.ncols(),
            xtilde1.nrows(),
            k
        )));
    }
    if corr.y11.nrows() != k || corr.y11.ncols() != k {
        return Err(Error::DimensionMismatch(format!(
            "Y11 is {}x{}, expected {k}x{k}",
            corr.y11.nrows(),
            corr.y11.ncols()
        )));
    }
    let coupling = xhat2.transpose() * (m.as_matrix() * xtilde1);
    let product = if corr.applied_inverse {
        let diag = corr.y11.diagonal();
        let dmax = diag.amax();
        if !(diag.iter().all(|d| d.abs() > f64::EPSILON * dmax * k as f64)) {
            return Err(Error::SingularCorrection);
        }
        // B Y⁻ᵀ = (Y⁻¹ Bᵀ)ᵀ
        corr.y11
            .solve_lower_triangular(&coupling.transpose())
            .ok_or(Error::SingularCorrection)?
            .transpose()
    } else {
        coupling
    };
    Ok(AngleReport::from_singular_values(singular_values(&product)?, k))
}
