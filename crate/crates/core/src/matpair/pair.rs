use nalgebra::DMatrix;

use super::kernels::{cholesky_named, normalize_column_signs, sym_eigen};
use super::sym::SymMatrix;
use crate::error::{Error, Result};

/// Simultaneous diagonalization `Xᵀ H X = diag(λ)`, `Xᵀ M X = I` of a
/// definite pair, `λ` ascending.
#[derive(Debug, Clone)]
pub struct PairEigen {
    pub x: DMatrix<f64>,
    pub lambda: Vec<f64>,
    /// `max_i ‖H xᵢ − λᵢ M xᵢ‖ / ((‖H‖ + |λᵢ|‖M‖)‖xᵢ‖)` with Frobenius norms
    /// standing in for the operator norms.
    pub residual: f64,
}

impl PairEigen {
    pub fn dim(&self) -> usize {
        self.lambda.len()
    }

    /// Reorders an externally built decomposition into ascending order.
    pub fn from_unsorted(x: DMatrix<f64>, lambda: Vec<f64>, residual: f64) -> Self {
        let n = lambda.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| lambda[i].total_cmp(&lambda[j]));
        let mut xs = DMatrix::zeros(x.nrows(), n);
        for (dst, &src) in order.iter().enumerate() {
            xs.set_column(dst, &x.column(src));
        }
        normalize_column_signs(&mut xs);
        let lambda = order.iter().map(|&i| lambda[i]).collect();
        Self { x: xs, lambda, residual }
    }
}

/// Which end of the ascending spectrum forms the selected block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Selection {
    /// The `k` smallest eigenvalues.
    #[default]
    Lowest,
    /// The `k` largest eigenvalues.
    Highest,
}

/// Split of a [`PairEigen`] into the selected block (`x1`, `lambda1`) and
/// its complement.
#[derive(Debug, Clone)]
pub struct Partition {
    pub k: usize,
    pub selection: Selection,
    pub x1: DMatrix<f64>,
    pub x2: DMatrix<f64>,
    pub lambda1: Vec<f64>,
    pub lambda2: Vec<f64>,
}

impl Partition {
    /// Smallest distance between a selected and an unselected eigenvalue.
    pub fn split_gap(&self) -> f64 {
        let mut gap = f64::INFINITY;
        for a in &self.lambda1 {
            for b in &self.lambda2 {
                gap = gap.min((a - b).abs());
            }
        }
        gap
    }

    /// True when the split separates eigenvalues closer than
    /// `rel_tol·max|λ|`; angles are then basis dependent.
    pub fn is_degenerate_split(&self, rel_tol: f64) -> bool {
        let scale = self
            .lambda1
            .iter()
            .chain(&self.lambda2)
            .fold(0.0f64, |acc, v| acc.max(v.abs()));
        self.split_gap() <= rel_tol * scale
    }
}

/// Solves `H x = λ M x` by reducing with `M = L Lᵀ` to `L⁻¹ H L⁻ᵀ`.
pub fn pair_eigendecompose(h: &SymMatrix, m: &SymMatrix) -> Result<PairEigen> {
    h.check_same_dim(m, "pair_eigendecompose")?;
    let n = h.dim();
    cholesky_named(h, "H")?;
    let chol = cholesky_named(m, "M")?;

    let left = chol.solve_l(h.as_matrix())?;
    let reduced = chol.solve_l(&left.transpose())?;
    let reduced = SymMatrix::symmetrize(&reduced)?;
    let eig = sym_eigen(&reduced)?;

    let mut x = chol.solve_lt(&eig.vectors)?;
    normalize_column_signs(&mut x);

    let h_norm = h.frobenius_norm();
    let m_norm = m.frobenius_norm();
    let hx = h.as_matrix() * &x;
    let mx = m.as_matrix() * &x;
    let mut residual = 0.0f64;
    for i in 0..n {
        let lam = eig.values[i];
        let r = (hx.column(i) - mx.column(i) * lam).norm();
        let scale = (h_norm + lam.abs() * m_norm) * x.column(i).norm();
        if scale > 0.0 {
            residual = residual.max(r / scale);
        }
    }

    Ok(PairEigen { x, lambda: eig.values, residual })
}

/// Selected block of the `k` smallest eigenvalues.
pub fn partition(e: &PairEigen, k: usize) -> Result<Partition> {
    partition_with(e, k, Selection::Lowest)
}

pub fn partition_with(e: &PairEigen, k: usize, selection: Selection) -> Result<Partition> {
    let n = e.dim();
    if k == 0 || k >= n {
        return Err(Error::BadBlockSize { k, n });
    }
    let (sel, rest): (Vec<usize>, Vec<usize>) = match selection {
        Selection::Lowest => ((0..k).collect(), (k..n).collect()),
        Selection::Highest => ((n - k..n).collect(), (0..n - k).collect()),
    };
    let x1 = e.x.select_columns(sel.iter());
    let x2 = e.x.select_columns(rest.iter());
    Ok(Partition {
        k,
        selection,
        x1,
        x2,
        lambda1: sel.iter().map(|&i| e.lambda[i]).collect(),
        lambda2: rest.iter().map(|&i| e.lambda[i]).collect(),
    })
}
