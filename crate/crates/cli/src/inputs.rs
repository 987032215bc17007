//! Loading the unperturbed and perturbed pairs from flags.

use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Args;
use relsin_core::io::{diag_matrix, read_mtx_file};
use relsin_core::matpair::SymMatrix;
use relsin_core::perturb::perturb_spd;

use crate::UsageError;

#[derive(Debug, Args)]
pub struct PairArgs {
    /// Stiffness matrix H (Matrix Market).
    #[arg(long)]
    pub pair_h: PathBuf,
    /// Mass matrix M (Matrix Market); identity when omitted.
    #[arg(long, conflicts_with = "m_diag")]
    pub pair_m: Option<PathBuf>,
    /// Use M = diag(1, 2, ..., n).
    #[arg(long)]
    pub m_diag: bool,
    /// Perturbed stiffness matrix; overrides --eta-h.
    #[arg(long, conflicts_with = "eta_h")]
    pub pert_h: Option<PathBuf>,
    /// Perturbed mass matrix; overrides --eta-m.
    #[arg(long, conflicts_with = "eta_m")]
    pub pert_m: Option<PathBuf>,
    /// Relative entrywise perturbation of H.
    #[arg(long)]
    pub eta_h: Option<f64>,
    /// Relative entrywise perturbation of M.
    #[arg(long)]
    pub eta_m: Option<f64>,
    /// Seed for generated perturbations; M uses seed + 1000.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

/// `(H, M)` and `(H̃, M̃)`.
pub struct Pairs {
    pub h: SymMatrix,
    pub m: SymMatrix,
    pub h_tilde: SymMatrix,
    pub m_tilde: SymMatrix,
}

const M_SEED_OFFSET: u64 = 1000;

fn read(path: &PathBuf) -> Result<SymMatrix> {
    read_mtx_file(path).with_context(|| format!("reading {}", path.display()))
}

fn perturbed(base: &SymMatrix, file: Option<&PathBuf>, eta: Option<f64>, seed: u64, name: &str) -> Result<SymMatrix> {
    match (file, eta) {
        (Some(path), _) => read(path),
        (None, Some(eta)) => Ok(perturb_spd(base, eta, seed).with_context(|| format!("perturbing {name}"))?.perturbed),
        (None, None) => Ok(base.clone()),
    }
}

impl PairArgs {
    pub fn load(&self) -> Result<Pairs> {
        let h = read(&self.pair_h)?;
        let n = h.dim();
        let m = match (&self.pair_m, self.m_diag) {
            (Some(path), _) => read(path)?,
            (None, true) => diag_matrix(n),
            (None, false) => SymMatrix::identity(n),
        };
        if m.dim() != n {
            return Err(UsageError(format!("H is {n}x{n} but M is {0}x{0}", m.dim())).into());
        }
        let h_tilde = perturbed(&h, self.pert_h.as_ref(), self.eta_h, self.seed, "H")?;
        let m_tilde =
            perturbed(&m, self.pert_m.as_ref(), self.eta_m, self.seed.wrapping_add(M_SEED_OFFSET), "M")?;
        if h_tilde.dim() != n || m_tilde.dim() != n {
            return Err(UsageError("perturbed matrices must match the dimension of H".into()).into());
        }
        Ok(Pairs { h, m, h_tilde, m_tilde })
    }
}
