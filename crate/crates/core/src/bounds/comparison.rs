//! Classical Frobenius-norm subspace bound for definite pairs, with the
//! Crawford number it depends on.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matpair::{cholesky, sym_eigenvalues, sym_spectral_norm, SymMatrix};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrawfordOptions {
    /// Uniform grid over `[0, 2π)` locating the global maximum.
    pub grid_points: usize,
    /// Golden-section stopping width, relative to `2π`.
    pub rel_tol: f64,
    /// With both matrices positive definite, `f(θ) = λ_min(cos θ H + sin θ M)`
    /// is positive and concave on `[0, π/2]` and dominated there, so golden
    /// section alone finds the maximum.
    pub exploit_concavity: bool,
}

impl Default for CrawfordOptions {
    fn default() -> Self {
        Self { grid_points: 720, rel_tol: 1e-8, exploit_concavity: true }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrawfordResult {
    pub gamma: f64,
    pub theta: f64,
    /// Final golden-section interval containing the maximizer.
    pub theta_bracket: (f64, f64),
    pub evaluations: usize,
}

fn rotated_min(h: &SymMatrix, m: &SymMatrix, theta: f64) -> Result<f64> {
    let (s, c) = theta.sin_cos();
    let rotated = SymMatrix::from_lower(h.as_matrix() * c + m.as_matrix() * s)?;
    Ok(sym_eigenvalues(&rotated)?[0])
}

/// Crawford number `min_{‖x‖=1} |xᵀ(H + iM)x|`, as `max_θ λ_min(cos θ H + sin θ M)`.
pub fn crawford(h: &SymMatrix, m: &SymMatrix) -> Result<CrawfordResult> {
    crawford_with(h, m, &CrawfordOptions::default())
}

pub fn crawford_with(h: &SymMatrix, m: &SymMatrix, opts: &CrawfordOptions) -> Result<CrawfordResult> {
    h.check_same_dim(m, "crawford")?;
    if h.dim() == 0 {
        return Err(Error::EmptySpectrum);
    }
    let mut evaluations = 0usize;
    let mut f = |theta: f64| {
        evaluations += 1;
        rotated_min(h, m, theta)
    };

    let both_definite = opts.exploit_concavity && cholesky(h).is_ok() && cholesky(m).is_ok();
    let (mut lo, mut hi) = if both_definite {
        (0.0, FRAC_PI_2)
    } else {
        let points = opts.grid_points.max(8);
        let step = 2.0 * PI / points as f64;
        let mut best = (f64::NEG_INFINITY, 0.0);
        for i in 0..points {
            let theta = i as f64 * step;
            let v = f(theta)?;
            if v > best.0 {
                best = (v, theta);
            }
        }
        if !(best.0 > 0.0) {
            return Err(Error::IndefinitePair(best.0));
        }
        (best.1 - step, best.1 + step)
    };

    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let width_tol = opts.rel_tol * 2.0 * PI;
    let mut a = hi - ratio * (hi - lo);
    let mut b = lo + ratio * (hi - lo);
    let (mut fa, mut fb) = (f(a)?, f(b)?);
    while hi - lo > width_tol {
        if fa < fb {
            lo = a;
            a = b;
            fa = fb;
            b = lo + ratio * (hi - lo);
            fb = f(b)?;
        } else {
            hi = b;
            b = a;
            fb = fa;
            a = hi - ratio * (hi - lo);
            fa = f(a)?;
        }
    }
    let (mut gamma, mut theta) = if fa >= fb { (fa, a) } else { (fb, b) };
    if both_definite {
        for end in [0.0, FRAC_PI_2] {
            let v = f(end)?;
            if v > gamma {
                gamma = v;
                theta = end;
            }
        }
    }
    if !(gamma > 0.0) {
        return Err(Error::IndefinitePair(gamma));
    }
    Ok(CrawfordResult { gamma, theta: theta.rem_euclid(2.0 * PI), theta_bracket: (lo, hi), evaluations })
}

/// Chordal gap `min |λ̃ − λ| / (√(1+λ̃²) √(1+λ²))` over `λ ∈ Λ₁`, `λ̃ ∈ Λ̃₂`.
pub fn chordal_gap(lambda1: &[f64], lambda2_tilde: &[f64]) -> Result<f64> {
    if lambda1.is_empty() || lambda2_tilde.is_empty() {
        return Err(Error::EmptySpectrum);
    }
    let mut gap = f64::INFINITY;
    for &a in lambda1 {
        for &b in lambda2_tilde {
            gap = gap.min((b - a).abs() / ((1.0 + b * b).sqrt() * (1.0 + a * a).sqrt()));
        }
    }
    Ok(gap)
}

/// Terms of the classical bound
/// `√‖H²+M²‖₂ / (γ γ̃) · √(‖δH X₁‖²_F + ‖δM X₁‖²_F) / δ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SunBound {
    #[serde(with = "crate::nan_serde")]
    pub sqrt_norm_h2_m2: f64,
    #[serde(with = "crate::nan_serde")]
    pub gamma: f64,
    #[serde(with = "crate::nan_serde")]
    pub gamma_tilde: f64,
    pub residual_f: f64,
    pub chordal_gap: f64,
    pub total: f64,
}

/// Inputs of [`sun_bound`]. `x1` must have Euclidean-orthonormal columns.
#[derive(Debug, Clone, Copy)]
pub struct SunInputs<'a> {
    pub h: &'a SymMatrix,
    pub m: &'a SymMatrix,
    pub delta_h: &'a SymMatrix,
    pub delta_m: &'a SymMatrix,
    pub x1: &'a DMatrix<f64>,
    pub lambda1: &'a [f64],
    pub lambda2_tilde: &'a [f64],
}

pub fn sun_bound(inputs: &SunInputs<'_>) -> Result<SunBound> {
    sun_bound_with(inputs, &CrawfordOptions::default())
}

pub fn sun_bound_with(inputs: &SunInputs<'_>, opts: &CrawfordOptions) -> Result<SunBound> {
    let SunInputs { h, m, delta_h, delta_m, x1, lambda1, lambda2_tilde } = *inputs;
    h.check_same_dim(m, "sun_bound")?;
    h.check_same_dim(delta_h, "sun_bound")?;
    h.check_same_dim(delta_m, "sun_bound")?;
    if x1.nrows() != h.dim() {
        return Err(Error::DimensionMismatch(format!("X1 has {} rows, H is {1}x{1}", x1.nrows(), h.dim())));
    }

    let residual_f = ((delta_h.as_matrix() * x1).norm_squared() + (delta_m.as_matrix() * x1).norm_squared()).sqrt();
    let chordal = chordal_gap(lambda1, lambda2_tilde)?;
    if residual_f == 0.0 {
        return Ok(SunBound {
            sqrt_norm_h2_m2: f64::NAN,
            gamma: f64::NAN,
            gamma_tilde: f64::NAN,
            residual_f,
            chordal_gap: chordal,
            total: 0.0,
        });
    }
    if !(chordal > 0.0) {
        return Err(Error::ZeroChordalGap);
    }

    let hm = h.as_matrix();
    let mm = m.as_matrix();
    let squares = SymMatrix::symmetrize(&(hm * hm + mm * mm))?;
    let sqrt_norm_h2_m2 = sym_spectral_norm(&squares)?.sqrt();
    let gamma = crawford_with(h, m, opts)?.gamma;
    let gamma_tilde = crawford_with(&(h + delta_h), &(m + delta_m), opts)?.gamma;
    let total = sqrt_norm_h2_m2 / (gamma * gamma_tilde) * residual_f / chordal;
    Ok(SunBound { sqrt_norm_h2_m2, gamma, gamma_tilde, residual_f, chordal_gap: chordal, total })
}
