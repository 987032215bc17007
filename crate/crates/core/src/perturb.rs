//! Relative distances between SPD matrices, mass lumping and entrywise
//! random perturbations.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matpair::{cholesky_named, singular_values, sym_eigenvalues, SymMatrix};

/// Relative distances of `Ã` from `A`.
///
/// `eta` and `phi*` use the symmetric form `A^{-1/2}(A−Ã)A^{-1/2}`, `psi*`
/// the mixed form `A^{-1/2}(A−Ã)Ã^{-1/2}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RelMeasure {
    pub eta: f64,
    pub psi2: f64,
    pub psi_f: f64,
    pub phi2: f64,
    pub phi_f: f64,
}

impl RelMeasure {
    pub const ZERO: Self = Self { eta: 0.0, psi2: 0.0, psi_f: 0.0, phi2: 0.0, phi_f: 0.0 };
}

/// Square roots are replaced by Cholesky factors: `L⁻¹ E L̃⁻ᵀ` and
/// `A^{-1/2} E Ã^{-1/2}` differ only by orthogonal factors.
pub fn measure(a: &SymMatrix, at: &SymMatrix) -> Result<RelMeasure> {
    a.check_same_dim(at, "measure")?;
    let la = cholesky_named(a, "A")?;
    let lt = cholesky_named(at, "A~")?;
    let diff = (a - at).into_matrix();
    let left = la.solve_l(&diff)?;

    let symmetric = SymMatrix::symmetrize(&la.right_solve_lt(&left)?)?;
    let sym_values = sym_eigenvalues(&symmetric)?;
    let phi2 = sym_values.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    let phi_f = symmetric.frobenius_norm();

    let mixed = lt.right_solve_lt(&left)?;
    let psi_values = singular_values(&mixed)?;
    let psi2 = psi_values.first().copied().unwrap_or(0.0);
    let psi_f = mixed.norm();

    Ok(RelMeasure { eta: phi2, psi2, psi_f, phi2, phi_f })
}

fn check_eta(eta: f64) -> Result<()> {
    if !(0.0..1.0).contains(&eta) {
        return Err(Error::EtaOutOfRange(eta));
    }
    Ok(())
}

/// Upper bound `η/√(1−η)` on `Ψ` in terms of `η`.
pub fn psi_bound_from_eta(eta: f64) -> Result<f64> {
    check_eta(eta)?;
    Ok(eta / (1.0 - eta).sqrt())
}

/// Relative distance bound `η/(1−η)` carried over to the inverses.
pub fn eta_of_inverse(eta: f64) -> Result<f64> {
    check_eta(eta)?;
    Ok(eta / (1.0 - eta))
}

/// Scales `D` to the multiple of itself closest to `M` in relative
/// distance. Returns `M̃` and its `η`.
pub fn lump(m: &SymMatrix, d: &SymMatrix) -> Result<(SymMatrix, f64)> {
    m.check_same_dim(d, "lump")?;
    cholesky_named(m, "M")?;
    let ld = cholesky_named(d, "D")?;
    let scaled = ld.right_solve_lt(&ld.solve_l(m.as_matrix())?)?;
    let values = sym_eigenvalues(&SymMatrix::symmetrize(&scaled)?)?;
    let (lo, hi) = (values[0], values[values.len() - 1]);
    let mid = 0.5 * (hi + lo);
    Ok((d.scaled(mid), (hi - lo) / (hi + lo)))
}

/// Symmetric `δA` with entries uniform on `[−η|a_ij|, η|a_ij|]`, so zeros
/// of `A` stay zero.
pub fn entrywise_perturb(a: &SymMatrix, eta_rel: f64, seed: u64) -> Result<SymMatrix> {
    if !(eta_rel >= 0.0) || !eta_rel.is_finite() {
        return Err(Error::InvalidArgument(format!("relative size {eta_rel} must be finite and >= 0")));
    }
    let n = a.dim();
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut delta = DMatrix::zeros(n, n);
    for j in 0..n {
        for i in j..n {
            let v = a.get(i, j);
            if !v.is_finite() {
                return Err(Error::NonFinite { row: i, col: j });
            }
            if v != 0.0 && eta_rel > 0.0 {
                let bound = eta_rel * v.abs();
                delta[(i, j)] = rng.random_range(-bound..=bound);
            }
        }
    }
    SymMatrix::from_lower(delta)
}

/// Result of [`perturb_spd`].
#[derive(Debug, Clone)]
pub struct SpdPerturbation {
    pub perturbed: SymMatrix,
    pub delta: SymMatrix,
    /// Seed that produced a positive definite result.
    pub seed: u64,
}

pub const MAX_RESAMPLES: u64 = 8;

/// [`entrywise_perturb`] retried with `seed + 1, seed + 2, …` until
/// `A + δA` is positive definite.
pub fn perturb_spd(a: &SymMatrix, eta_rel: f64, seed: u64) -> Result<SpdPerturbation> {
    let mut last = Error::NotPositiveDefinite { what: "A + dA", pivot: None };
    for attempt in 0..MAX_RESAMPLES {
        let s = seed.wrapping_add(attempt);
        let delta = entrywise_perturb(a, eta_rel, s)?;
        let perturbed = a + &delta;
        match cholesky_named(&perturbed, "A + dA") {
            Ok(_) => return Ok(SpdPerturbation { perturbed, delta, seed: s }),
            Err(e) => last = e,
        }
    }
    Err(last)
}
