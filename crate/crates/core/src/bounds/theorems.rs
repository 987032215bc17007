use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::gaps::{Dichotomy, GapReport, PNorm};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormKind {
    #[default]
    Spectral,
    Frobenius,
}

/// Two-step subspace bound with its per-term breakdown.
///
/// `total = step1 + step2 · correction_factor`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    /// Contribution of the perturbation of `H`.
    #[serde(with = "crate::nan_serde")]
    pub step1: f64,
    /// Contribution of the perturbation of `M`, before correction.
    #[serde(with = "crate::nan_serde")]
    pub step2: f64,
    #[serde(with = "crate::nan_serde")]
    pub correction_factor: f64,
    #[serde(with = "crate::nan_serde")]
    pub total: f64,
    pub norm_kind: NormKind,
    /// Gap index used by `step2`; `None` for the Frobenius bound.
    pub p: Option<PNorm>,
    pub applicable: bool,
    pub reason: Option<String>,
}

impl BoundReport {
    fn new(step1: f64, step2: f64, correction_factor: f64, norm_kind: NormKind, p: Option<PNorm>) -> Self {
        Self {
            step1,
            step2,
            correction_factor,
            total: step1 + step2 * correction_factor,
            norm_kind,
            p,
            applicable: true,
            reason: None,
        }
    }

    /// Placeholder for a bound whose hypotheses fail; numeric fields are NaN.
    pub fn inapplicable(norm_kind: NormKind, p: Option<PNorm>, err: &Error) -> Self {
        Self {
            step1: f64::NAN,
            step2: f64::NAN,
            correction_factor: f64::NAN,
            total: f64::NAN,
            norm_kind,
            p,
            applicable: false,
            reason: Some(err.to_string()),
        }
    }

    /// `true` when the bound applies and `value <= total + tol`.
    pub fn covers(&self, value: f64, tol: f64) -> bool {
        self.applicable && value <= self.total + tol
    }
}

fn positive_gap(gap: f64) -> Result<f64> {
    if gap > 0.0 {
        Ok(gap)
    } else {
        Err(Error::ZeroGap)
    }
}

fn check_eta_m(eta_m: f64) -> Result<()> {
    if !(0.0..0.5).contains(&eta_m) {
        return Err(Error::EtaTooLarge(eta_m));
    }
    Ok(())
}

fn check_main_gaps(gaps: &GapReport, p: PNorm) -> Result<(f64, f64)> {
    if gaps.dichotomy.dichotomy == Dichotomy::Interlaced {
        return Err(Error::DichotomyViolated);
    }
    Ok((positive_gap(gaps.relgap)?, positive_gap(gaps.relgap_p.get(p))?))
}

/// Bound `Ψ_H / RelGap` on the angle caused by perturbing `H` alone.
pub fn bound_step1(psi_h: f64, relgap: f64) -> Result<f64> {
    Ok(psi_h / positive_gap(relgap)?)
}

/// Spectral-norm bound for simultaneous perturbations of `H` and `M`.
pub fn bound_main(psi_h: f64, psi_m: f64, eta_m: f64, gaps: &GapReport, p: PNorm) -> Result<BoundReport> {
    check_eta_m(eta_m)?;
    let (relgap, relgap_p) = check_main_gaps(gaps, p)?;
    let factor = (1.0 - eta_m).sqrt() / (1.0 - 2.0 * eta_m).sqrt();
    Ok(BoundReport::new(psi_h / relgap, psi_m / relgap_p, factor, NormKind::Spectral, Some(p)))
}

/// Variant of [`bound_main`] in terms of the symmetric measures `Φ`.
pub fn bound_main_phi(
    phi_h: f64,
    phi_m: f64,
    eta_h: f64,
    eta_m: f64,
    gaps: &GapReport,
    p: PNorm,
) -> Result<BoundReport> {
    if !(0.0..1.0).contains(&eta_h) {
        return Err(Error::EtaHTooLarge(eta_h));
    }
    check_eta_m(eta_m)?;
    let (relgap, relgap_p) = check_main_gaps(gaps, p)?;
    let step1 = phi_h / (relgap * (1.0 - eta_h).sqrt());
    let factor = 1.0 / (1.0 - 2.0 * eta_m).sqrt();
    Ok(BoundReport::new(step1, phi_m / relgap_p, factor, NormKind::Spectral, Some(p)))
}

/// Frobenius-norm bound; needs no spectral dichotomy.
pub fn bound_frobenius(psi_h_f: f64, psi_m_f: f64, relgap: f64, relgap_comp: f64) -> Result<BoundReport> {
    let step1 = psi_h_f / positive_gap(relgap)?;
    let step2 = psi_m_f / positive_gap(relgap_comp)?;
    Ok(BoundReport::new(step1, step2, 1.0, NormKind::Frobenius, None))
}

/// Solves `Λ̂₂ Z − Z Λ̃₁ = −C Λ̃₁` entrywise: `Z_ij = −λ̃_j C_ij / (λ̂_i − λ̃_j)`.
pub fn sylvester_diag_solve(lambda2_hat: &[f64], lambda1_tilde: &[f64], c: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if c.nrows() != lambda2_hat.len() || c.ncols() != lambda1_tilde.len() {
        return Err(Error::DimensionMismatch(format!(
            "C is {}x{}, spectra have lengths {} and {}",
            c.nrows(),
            c.ncols(),
            lambda2_hat.len(),
            lambda1_tilde.len()
        )));
    }
    let mut z = DMatrix::zeros(c.nrows(), c.ncols());
    for (i, &lh) in lambda2_hat.iter().enumerate() {
        for (j, &lt) in lambda1_tilde.iter().enumerate() {
            let diff = lh - lt;
            if diff == 0.0 {
                return Err(Error::ResonantSpectra(lh));
            }
            z[(i, j)] = -lt / diff * c[(i, j)];
        }
    }
    Ok(z)
}
