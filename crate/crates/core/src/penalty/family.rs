use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::matpair::{cholesky_named, sym_eigen, SymEigen, SymMatrix};

/// Eigenvalues of `He` below this multiple of `‖He‖₂` span its kernel.
pub const KERNEL_TOL: f64 = 1e-10;

/// `H_κ = H_b + κ H_e` with `H_b` positive definite and `H_e` semidefinite.
#[derive(Debug, Clone)]
pub struct PenaltyFamily {
    hb: SymMatrix,
    he: SymMatrix,
    kernel_dim: usize,
    /// Orthogonal `Q = [Q_k Q_p]` with `Q_k` spanning `Ker(H_e)`.
    split: DMatrix<f64>,
    /// Set when `Q` is a coordinate permutation: `split[:, j] = e_{perm[j]}`.
    permutation: Option<Vec<usize>>,
}

impl PenaltyFamily {
    pub fn new(hb: SymMatrix, he: SymMatrix) -> Result<Self> {
        hb.check_same_dim(&he, "penalty family")?;
        cholesky_named(&hb, "Hb")?;
        let n = hb.dim();
        let diagonal = (0..n).all(|j| (0..n).all(|i| i == j || he.get(i, j) == 0.0));

        // Ascending eigenvalues of He with their eigenvectors; a coordinate
        // permutation when He is diagonal, so the split stays exact.
        let (values, vectors, permuted) = if diagonal {
            let diag = he.diagonal();
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by(|&i, &j| diag[i].total_cmp(&diag[j]));
            let mut q = DMatrix::zeros(n, n);
            for (j, &i) in order.iter().enumerate() {
                q[(i, j)] = 1.0;
            }
            (order.iter().map(|&i| diag[i]).collect::<Vec<_>>(), q, Some(order))
        } else {
            let eig = sym_eigen(&he)?;
            (eig.values, eig.vectors, None)
        };
        let scale = values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        if values.first().is_some_and(|&v| v < -1e-12 * scale) {
            return Err(Error::NotPositiveDefinite { what: "He (semidefinite)", pivot: None });
        }
        let kernel_dim = values.iter().filter(|&&v| v <= KERNEL_TOL * scale).count();
        Ok(Self { hb, he, kernel_dim, split: vectors, permutation: permuted })
    }

    pub fn hb(&self) -> &SymMatrix {
        &self.hb
    }

    pub fn he(&self) -> &SymMatrix {
        &self.he
    }

    pub fn dim(&self) -> usize {
        self.hb.dim()
    }

    pub fn kernel_dim(&self) -> usize {
        self.kernel_dim
    }

    pub fn split_basis(&self) -> &DMatrix<f64> {
        &self.split
    }

    pub fn permutation(&self) -> Option<&[usize]> {
        self.permutation.as_deref()
    }

    pub fn assemble(&self, kappa: f64) -> Result<SymMatrix> {
        check_kappa(kappa)?;
        Ok(&self.hb + &self.he.scaled(kappa))
    }

    pub fn block_form(&self, kappa: f64) -> Result<BlockForm> {
        check_kappa(kappa)?;
        let k = self.kernel_dim;
        let n = self.dim();
        if k == 0 {
            return Err(Error::EmptyKernel);
        }
        let hb = self.hb.congruence(&self.split)?.into_matrix();
        let he = self.he.congruence(&self.split)?.into_matrix();
        let p = n - k;
        let lb = SymMatrix::from_lower(hb.view((0, 0), (k, k)).into_owned())?;
        let rb = hb.view((k, 0), (p, k)).into_owned();
        let wb = SymMatrix::from_lower(hb.view((k, k), (p, p)).into_owned())?;
        let stiff = SymMatrix::from_lower(hb.view((k, k), (p, p)) + he.view((k, k), (p, p)) * kappa)?;

        let eta_kappa = if p == 0 || rb.amax() == 0.0 {
            0.0
        } else {
            // ‖L⁻¹ Rᵀ W⁻ᵀ‖₂ with L Lᵀ = L_b, W Wᵀ = W_b + κ H_e
            let lc = cholesky_named(&lb, "Lb")?;
            let wc = cholesky_named(&stiff, "Wb + kappa He")?;
            let coupled = wc.right_solve_lt(&lc.solve_l(&rb.transpose())?)?;
            crate::matpair::singular_values(&coupled)?[0]
        };
        Ok(BlockForm { kappa, lb, rb, wb, stiff, eta_kappa, split: self.split.clone() })
    }

    /// `H_∞ = Q blockdiag(L_b, 0) Qᵀ`.
    pub fn limit_matrix(&self) -> Result<SymMatrix> {
        let k = self.kernel_dim;
        if k == 0 {
            return Err(Error::EmptyKernel);
        }
        let qk = self.split.columns(0, k).into_owned();
        let lb = self.hb.congruence(&qk)?;
        SymMatrix::symmetrize(&(&qk * lb.as_matrix() * qk.transpose()))
    }
}

fn check_kappa(kappa: f64) -> Result<()> {
    if !(kappa >= 0.0 && kappa.is_finite()) {
        return Err(Error::InvalidArgument(format!("kappa = {kappa} must be finite and >= 0")));
    }
    Ok(())
}

/// `H_κ` in split coordinates: `[[L_b, R_bᵀ], [R_b, W_b + κ H_e]]`.
#[derive(Debug, Clone)]
pub struct BlockForm {
    pub kappa: f64,
    pub lb: SymMatrix,
    pub rb: DMatrix<f64>,
    pub wb: SymMatrix,
    /// `W_b + κ H_e` restricted to the range of `H_e`.
    pub stiff: SymMatrix,
    /// `‖D_κ^{-1/2}(D_κ − H_κ)D_κ^{-1/2}‖₂`.
    pub eta_kappa: f64,
    split: DMatrix<f64>,
}

impl BlockForm {
    pub fn kernel_dim(&self) -> usize {
        self.lb.dim()
    }

    fn from_split(&self, blocks: &DMatrix<f64>) -> Result<SymMatrix> {
        SymMatrix::symmetrize(&(&self.split * blocks * self.split.transpose()))
    }

    fn block_diag(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
        let (k, p) = (a.nrows(), b.nrows());
        let mut m = DMatrix::zeros(k + p, k + p);
        m.view_mut((0, 0), (k, k)).copy_from(a);
        m.view_mut((k, k), (p, p)).copy_from(b);
        m
    }

    /// Block diagonal part `D_κ` in original coordinates.
    pub fn dkappa(&self) -> Result<SymMatrix> {
        self.from_split(&Self::block_diag(self.lb.as_matrix(), self.stiff.as_matrix()))
    }

    /// `H_κ` reassembled from the blocks, in original coordinates.
    pub fn reassemble(&self) -> Result<SymMatrix> {
        let k = self.kernel_dim();
        let mut m = Self::block_diag(self.lb.as_matrix(), self.stiff.as_matrix());
        let p = self.rb.nrows();
        m.view_mut((k, 0), (p, k)).copy_from(&self.rb);
        m.view_mut((0, k), (k, p)).copy_from(&self.rb.transpose());
        self.from_split(&m)
    }

    /// Eigendecomposition of `D_κ` assembled from its two diagonal blocks,
    /// so the bounded branch carries no coupling noise.
    pub fn dkappa_eigen(&self) -> Result<SymEigen> {
        let a = sym_eigen(&self.lb)?;
        let b = sym_eigen(&self.stiff)?;
        let vectors = &self.split * Self::block_diag(&a.vectors, &b.vectors);
        let values: Vec<f64> = a.values.iter().chain(&b.values).copied().collect();
        let n = values.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
        let mut sorted = vectors.select_columns(order.iter());
        crate::matpair::normalize_column_signs(&mut sorted);
        Ok(SymEigen { values: order.iter().map(|&i| values[i]).collect(), vectors: sorted })
    }

    /// Largest eigenvalue of `L_b` against the smallest of `W_b + κ H_e`;
    /// `true` when the bounded branch lies strictly below the escaping one.
    pub fn branches_separated(&self) -> Result<bool> {
        let lo = sym_eigen(&self.lb)?.values;
        let hi = sym_eigen(&self.stiff)?.values;
        Ok(match (lo.last(), hi.first()) {
            (Some(a), Some(b)) => a < b,
            _ => true,
        })
    }
}

/// Tridiagonal `tridiag(−1, 2, −1)` of order `n` with `H_e = e_n e_nᵀ`.
pub fn tridiagonal_family(n: usize) -> Result<PenaltyFamily> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("tridiagonal family needs n >= 2, got {n}")));
    }
    let mut hb = DMatrix::zeros(n, n);
    for i in 0..n {
        hb[(i, i)] = 2.0;
        if i + 1 < n {
            hb[(i + 1, i)] = -1.0;
        }
    }
    let mut e = DVector::zeros(n);
    e[n - 1] = 1.0;
    PenaltyFamily::new(SymMatrix::from_lower(hb)?, SymMatrix::from_lower(&e * e.transpose())?)
}

/// Named families: `tridiag3`, `tridiag4`.
pub fn builtin_example(name: &str) -> Result<PenaltyFamily> {
    match name {
        "tridiag3" => tridiagonal_family(3),
        "tridiag4" => tridiagonal_family(4),
        other => Err(Error::UnknownExample(other.to_string())),
    }
}
