use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Failures raised by the numerical kernels, angle and bound evaluators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix contains a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("matrix is not symmetric: |a[{row}][{col}] - a[{col}][{row}]| = {deviation:e}")]
    NotSymmetric { row: usize, col: usize, deviation: f64 },

    #[error("{what} is not positive definite{}", pivot.map(|p| format!(" (pivot {p})")).unwrap_or_default())]
    NotPositiveDefinite { what: &'static str, pivot: Option<usize> },

    #[error("symmetric eigensolver did not converge (n = {n})")]
    ConvergenceFailure { n: usize },

    #[error("block size k = {k} must satisfy 1 <= k < n = {n}")]
    BadBlockSize { k: usize, n: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("basis is not orthonormal (deviation {deviation:e} > {tol:e})")]
    NotOrthonormal { deviation: f64, tol: f64 },

    #[error("basis is not M-orthonormal (deviation {deviation:e} > {tol:e})")]
    NotMOrthonormal { deviation: f64, tol: f64 },

    #[error("I - X~* dM X~ is not positive definite; perturbation too large for the two-step bound")]
    CorrectionNotPD,

    #[error("correction factor Y11 is numerically singular")]
    SingularCorrection,

    #[error("relative distance eta = {0} outside [0, 1)")]
    EtaOutOfRange(f64),

    #[error("eta_M = {0} must be below 1/2")]
    EtaTooLarge(f64),

    #[error("eta_H = {0} must be below 1")]
    EtaHTooLarge(f64),

    #[error("empty spectrum")]
    EmptySpectrum,

    #[error("unsupported p-norm index {0}; expected 1, 2 or inf")]
    BadP(String),

    #[error("relative gap is zero")]
    ZeroGap,

    #[error("spectral dichotomy violated: the spectra interlace")]
    DichotomyViolated,

    #[error("spectra share the eigenvalue {0}")]
    ResonantSpectra(f64),

    #[error("pair is not definite (Crawford number estimate {0:e} <= 0)")]
    IndefinitePair(f64),

    #[error("chordal gap is zero")]
    ZeroChordalGap,

    #[error("semidefinite term has an empty kernel")]
    EmptyKernel,

    #[error("unknown example '{0}'")]
    UnknownExample(String),

    #[error("unknown pair variant '{0}'")]
    UnknownVariant(String),

    #[error("empty kappa grid")]
    EmptyGrid,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// True for failures caused by loss of (positive) definiteness.
    pub fn is_definiteness(&self) -> bool {
        matches!(
            self,
            Error::NotPositiveDefinite { .. }
                | Error::IndefinitePair(_)
                | Error::CorrectionNotPD
                | Error::SingularCorrection
        )
    }
}
