//! Dense SPD kernels and simultaneous diagonalization of definite pairs.

mod kernels;
mod pair;
mod sym;

pub use kernels::{
    cholesky, m_orthonormalize, normalize_column_signs, orthonormality_defect, orthonormalize,
    singular_values, spd_check, spd_inv_sqrt, spd_inverse, spd_power, spd_sqrt, spectral_norm,
    sym_eigen, sym_eigenvalues, sym_spectral_norm, CholeskyFactor, SymEigen,
};
pub(crate) use kernels::cholesky_named;
pub use pair::{pair_eigendecompose, partition, partition_with, PairEigen, Partition, Selection};
pub use sym::SymMatrix;

/// Absolute tolerance defaults. Callers scale them by dimension and norm
/// where an operation says so.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Euclidean orthonormality of subspace bases.
    pub orthonormal: f64,
    /// `M`-orthonormality; looser so mildly ill-conditioned `M` passes.
    pub m_orthonormal: f64,
    /// `λ_min <= positive_definite·‖A‖₂` counts as singular.
    pub positive_definite: f64,
    /// Relative eigenvalue distance below which a block split is degenerate.
    pub degenerate_split: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { orthonormal: 1e-10, m_orthonormal: 1e-8, positive_definite: 1e-14, degenerate_split: 1e-12 }
    }
}
