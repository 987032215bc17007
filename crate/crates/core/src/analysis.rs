//! End-to-end evaluation of one perturbation `(H, M) → (H̃, M̃)`: exact
//! angles from full decompositions next to every bound.
//!
//! The intermediate pair `(H̃, M)` splits the perturbation into an `H` step
//! and an `M` step.

use serde::{Deserialize, Serialize};

use crate::angles::{chol_correction_block, sin_theta_euclid, sin_theta_m, sin_theta_m_corrected, AngleReport};
use crate::bounds::{
    bound_frobenius, bound_main, bound_main_phi, sun_bound_with, BoundReport, CrawfordOptions, GapReport, NormKind,
    PNorm, SunBound, SunInputs,
};
use crate::error::Result;
use crate::matpair::{
    m_orthonormalize, orthonormalize, pair_eigendecompose, partition_with, singular_values, PairEigen, Selection,
    SymMatrix, Tolerances,
};
use crate::perturb::{measure, RelMeasure};

#[derive(Debug, Clone)]
pub struct AnalysisOptions {
    pub selection: Selection,
    pub compute_sun: bool,
    pub crawford: CrawfordOptions,
    pub tolerances: Tolerances,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self {
            selection: Selection::Lowest,
            compute_sun: false,
            crawford: CrawfordOptions::default(),
            tolerances: Tolerances::default(),
        }
    }
}

/// Decompositions of the unperturbed, intermediate and perturbed pairs.
#[derive(Debug, Clone)]
pub struct PairTriple {
    pub base: PairEigen,
    pub intermediate: PairEigen,
    pub perturbed: PairEigen,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PerturbationAnalysis {
    pub n: usize,
    pub k: usize,
    pub lambda: Vec<f64>,
    pub lambda_intermediate: Vec<f64>,
    pub lambda_tilde: Vec<f64>,
    /// Angle in the `M` product between the base and intermediate subspaces.
    pub angle_step1: AngleReport,
    /// Angle in the `M` product between the intermediate and perturbed subspaces.
    pub angle_step2: AngleReport,
    /// Singular values of `X̂₂ᵀ M X̃₁` without the scalar-product correction.
    pub coupling: AngleReport,
    /// Angle in the `M` product between the base and perturbed subspaces.
    pub angle_total: AngleReport,
    pub angle_euclid: AngleReport,
    pub measure_h: RelMeasure,
    pub measure_m: RelMeasure,
    pub gaps: GapReport,
    /// Spectral-norm bound for p = 1, 2, ∞.
    pub bounds_main: Vec<BoundReport>,
    /// `Φ`-based spectral-norm bound for p = 1, 2, ∞.
    pub bounds_phi: Vec<BoundReport>,
    pub bound_frobenius: BoundReport,
    pub sun: Option<SunBound>,
    pub degenerate_split: bool,
    #[serde(with = "crate::nan_serde")]
    pub max_residual: f64,
}

impl PerturbationAnalysis {
    pub fn run(
        h: &SymMatrix,
        m: &SymMatrix,
        h_tilde: &SymMatrix,
        m_tilde: &SymMatrix,
        k: usize,
        opts: &AnalysisOptions,
    ) -> Result<Self> {
        let triple = PairTriple {
            base: pair_eigendecompose(h, m)?,
            intermediate: pair_eigendecompose(h_tilde, m)?,
            perturbed: pair_eigendecompose(h_tilde, m_tilde)?,
        };
        Self::from_decompositions(h, m, h_tilde, m_tilde, k, &triple, opts)
    }

    pub fn from_decompositions(
        h: &SymMatrix,
        m: &SymMatrix,
        h_tilde: &SymMatrix,
        m_tilde: &SymMatrix,
        k: usize,
        triple: &PairTriple,
        opts: &AnalysisOptions,
    ) -> Result<Self> {
        let sel = opts.selection;
        let base = partition_with(&triple.base, k, sel)?;
        let inter = partition_with(&triple.intermediate, k, sel)?;
        let pert = partition_with(&triple.perturbed, k, sel)?;
        let tol = &opts.tolerances;
        let delta_m = m_tilde - m;

        let angle_step1 = sin_theta_m(&base.x1, &inter.x1, m)?;
        let correction = chol_correction_block(&pert.x1, &delta_m)?;
        let angle_step2 = sin_theta_m_corrected(&inter.x2, m, &pert.x1, &correction)?;
        let coupling = AngleReport::from_singular_values(
            singular_values(&(inter.x2.transpose() * (m.as_matrix() * &pert.x1)))?,
            k,
        );
        let rescaled = m_orthonormalize(&pert.x1, m)?;
        let angle_total = sin_theta_m(&base.x1, &rescaled, m)?;
        let angle_euclid = sin_theta_euclid(&orthonormalize(&base.x1), &orthonormalize(&pert.x1))?;

        let measure_h = measure(h, h_tilde)?;
        let measure_m = measure(m, m_tilde)?;
        let gaps = GapReport::compute(&base.lambda2, &inter.lambda1, &inter.lambda2, &pert.lambda1)?;

        let bounds_main = PNorm::ALL
            .iter()
            .map(|&p| {
                bound_main(measure_h.psi2, measure_m.psi2, measure_m.eta, &gaps, p)
                    .unwrap_or_else(|e| BoundReport::inapplicable(NormKind::Spectral, Some(p), &e))
            })
            .collect();
        let bounds_phi = PNorm::ALL
            .iter()
            .map(|&p| {
                bound_main_phi(measure_h.phi2, measure_m.phi2, measure_h.eta, measure_m.eta, &gaps, p)
                    .unwrap_or_else(|e| BoundReport::inapplicable(NormKind::Spectral, Some(p), &e))
            })
            .collect();
        let bound_frob = bound_frobenius(measure_h.psi_f, measure_m.psi_f, gaps.relgap, gaps.relgap_comp)
            .unwrap_or_else(|e| BoundReport::inapplicable(NormKind::Frobenius, None, &e));

        let sun = if opts.compute_sun {
            let delta_h = h_tilde - h;
            let x1 = orthonormalize(&base.x1);
            Some(sun_bound_with(
                &SunInputs {
                    h,
                    m,
                    delta_h: &delta_h,
                    delta_m: &delta_m,
                    x1: &x1,
                    lambda1: &base.lambda1,
                    lambda2_tilde: &pert.lambda2,
                },
                &opts.crawford,
            )?)
        } else {
            None
        };

        let degenerate_split = [&base, &inter, &pert].iter().any(|p| p.is_degenerate_split(tol.degenerate_split));
        let max_residual =
            triple.base.residual.max(triple.intermediate.residual).max(triple.perturbed.residual);

        Ok(Self {
            n: h.dim(),
            k,
            lambda: triple.base.lambda.clone(),
            lambda_intermediate: triple.intermediate.lambda.clone(),
            lambda_tilde: triple.perturbed.lambda.clone(),
            angle_step1,
            angle_step2,
            coupling,
            angle_total,
            angle_euclid,
            measure_h,
            measure_m,
            gaps,
            bounds_main,
            bounds_phi,
            bound_frobenius: bound_frob,
            sun,
            degenerate_split,
            max_residual,
        })
    }

    pub fn main_bound(&self, p: PNorm) -> &BoundReport {
        &self.bounds_main[PNorm::ALL.iter().position(|&q| q == p).unwrap_or(2)]
    }

    pub fn phi_bound(&self, p: PNorm) -> &BoundReport {
        &self.bounds_phi[PNorm::ALL.iter().position(|&q| q == p).unwrap_or(2)]
    }

    /// Bound matching `norm`: spectral uses the main bound at `p`.
    pub fn bound(&self, norm: NormKind, p: PNorm) -> &BoundReport {
        match norm {
            NormKind::Spectral => self.main_bound(p),
            NormKind::Frobenius => &self.bound_frobenius,
        }
    }

    /// Exact total angle in `norm`.
    pub fn exact(&self, norm: NormKind) -> f64 {
        match norm {
            NormKind::Spectral => self.angle_total.norm2,
            NormKind::Frobenius => self.angle_total.norm_f,
        }
    }
}
