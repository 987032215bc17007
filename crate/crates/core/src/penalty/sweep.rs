use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::family::PenaltyFamily;
use super::variant::{variant_eigen, PairVariant, Slot};
use crate::analysis::{AnalysisOptions, PairTriple, PerturbationAnalysis};
use crate::angles::sin_theta_m;
use crate::bounds::{bound_frobenius, bound_main, bound_main_phi, BoundReport, GapReport, NormKind, PNorm};
use crate::error::{Error, Result};
use crate::matpair::{
    m_orthonormalize, pair_eigendecompose, partition_with, sym_eigen, PairEigen, SymEigen, SymMatrix,
};
use crate::perturb::{eta_of_inverse, measure, psi_bound_from_eta};

/// Which bound supplies `Right_κ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundKind {
    /// Spectral norm, `Ψ`-based.
    #[default]
    Main,
    /// Spectral norm, `Φ`-based.
    Phi,
    Frobenius,
}

impl BoundKind {
    pub fn norm(self) -> NormKind {
        match self {
            BoundKind::Main | BoundKind::Phi => NormKind::Spectral,
            BoundKind::Frobenius => NormKind::Frobenius,
        }
    }
}

impl FromStr for BoundKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "main" | "psi" | "spectral" => Ok(BoundKind::Main),
            "phi" => Ok(BoundKind::Phi),
            "frobenius" | "fro" => Ok(BoundKind::Frobenius),
            _ => Err(Error::InvalidArgument(format!("unknown bound kind '{s}'"))),
        }
    }
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundKind::Main => "main",
            BoundKind::Phi => "phi",
            BoundKind::Frobenius => "frobenius",
        })
    }
}

/// Subspace `Left_κ` is measured against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Reference {
    /// The bounded eigenspace of the `κ → ∞` limit, realized as that of the
    /// block diagonal part `D_κ`; `H_κ` is the perturbation.
    #[default]
    Limit,
    /// `H_κ` is the unperturbed operator and `D_κ` the perturbation.
    PerturbedPair,
}

impl FromStr for Reference {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "limit" => Ok(Reference::Limit),
            "perturbed-pair" | "perturbed" | "pair" => Ok(Reference::PerturbedPair),
            _ => Err(Error::InvalidArgument(format!("unknown reference '{s}'"))),
        }
    }
}

impl fmt::Display for Reference {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Reference::Limit => "limit",
            Reference::PerturbedPair => "perturbed-pair",
        })
    }
}

/// Ascending positive penalty parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KappaGrid(Vec<f64>);

impl KappaGrid {
    /// `points` values log-spaced from `start` to `stop` inclusive.
    pub fn log(start: f64, stop: f64, points: usize) -> Result<Self> {
        if points == 0 {
            return Err(Error::EmptyGrid);
        }
        if !(start > 0.0 && stop >= start && stop.is_finite()) {
            return Err(Error::InvalidArgument(format!("grid needs 0 < start <= stop, got {start}..{stop}")));
        }
        if points == 1 {
            return Ok(Self(vec![start]));
        }
        let (a, b) = (start.log10(), stop.log10());
        let step = (b - a) / (points - 1) as f64;
        let mut values: Vec<f64> = (0..points).map(|i| 10f64.powf(a + step * i as f64)).collect();
        values[0] = start;
        values[points - 1] = stop;
        Self::from_values(values)
    }

    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyGrid);
        }
        if values.iter().any(|v| !(*v > 0.0 && v.is_finite())) || values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument("grid must be positive, finite and strictly ascending".into()));
        }
        Ok(Self(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }
}

impl Default for KappaGrid {
    fn default() -> Self {
        Self::log(1e2, 1e8, 13).expect("default grid is valid")
    }
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub k: usize,
    pub variant: PairVariant,
    pub bound: BoundKind,
    pub reference: Reference,
    pub p: PNorm,
    pub parallel: bool,
}

impl SweepConfig {
    pub fn new(k: usize, variant: PairVariant) -> Self {
        Self { k, variant, bound: BoundKind::Main, reference: Reference::Limit, p: PNorm::Inf, parallel: true }
    }
}

/// Quotients above `1 + QUOTIENT_SLACK` are flagged.
pub const QUOTIENT_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub kappa: f64,
    /// Exact sine norm.
    #[serde(with = "crate::nan_serde")]
    pub left: f64,
    /// Bound value.
    #[serde(with = "crate::nan_serde")]
    pub right: f64,
    /// `left / right`; `None` for `0/0` and for failed points.
    pub quotient: Option<f64>,
    #[serde(with = "crate::nan_serde")]
    pub eta_kappa: f64,
    #[serde(with = "crate::nan_serde")]
    pub step1: f64,
    #[serde(with = "crate::nan_serde")]
    pub step2: f64,
    pub flags: Vec<String>,
}

impl SweepPoint {
    fn failed(kappa: f64, err: &Error) -> Self {
        Self {
            kappa,
            left: f64::NAN,
            right: f64::NAN,
            quotient: None,
            eta_kappa: f64::NAN,
            step1: f64::NAN,
            step2: f64::NAN,
            flags: vec![format!("error: {err}")],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub variant: PairVariant,
    pub k: usize,
    pub bound: BoundKind,
    pub reference: Reference,
    pub p: PNorm,
    pub points: Vec<SweepPoint>,
    /// Fitted exponent of `Left_κ ~ κ^s` over the upper half of the grid.
    pub left_slope: Option<f64>,
    pub right_slope: Option<f64>,
}

impl SweepResult {
    pub fn kappa_grid(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.kappa).collect()
    }

    pub fn left(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.left).collect()
    }

    pub fn right(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.right).collect()
    }

    pub fn quotient(&self) -> Vec<Option<f64>> {
        self.points.iter().map(|p| p.quotient).collect()
    }

    /// Point whose `κ` matches `kappa` to relative `1e-9`.
    pub fn at(&self, kappa: f64) -> Option<&SweepPoint> {
        self.points.iter().find(|p| (p.kappa - kappa).abs() <= 1e-9 * kappa)
    }

    pub fn succeeded(&self) -> usize {
        self.points.iter().filter(|p| p.left.is_finite() && p.right.is_finite()).count()
    }
}

/// Least-squares slope of `log y` against `log x`; `None` below two points.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| **x > 0.0 && **y > 0.0 && x.is_finite() && y.is_finite())
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Effectivity quotients `Left_κ / Right_κ` over a grid of penalty values.
pub fn effectivity_sweep(family: &PenaltyFamily, grid: &KappaGrid, cfg: &SweepConfig) -> Result<SweepResult> {
    let kappas = grid.values();
    if kappas.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let eval = |&kappa: &f64| evaluate_point(family, kappa, cfg).unwrap_or_else(|e| SweepPoint::failed(kappa, &e));
    let points: Vec<SweepPoint> =
        if cfg.parallel { kappas.par_iter().map(eval).collect() } else { kappas.iter().map(eval).collect() };

    let upper = kappas.len() / 2;
    let tail = &points[upper..];
    let xs: Vec<f64> = tail.iter().map(|p| p.kappa).collect();
    let left_slope = loglog_slope(&xs, &tail.iter().map(|p| p.left).collect::<Vec<_>>());
    let right_slope = loglog_slope(&xs, &tail.iter().map(|p| p.right).collect::<Vec<_>>());

    Ok(SweepResult {
        variant: cfg.variant,
        k: cfg.k,
        bound: cfg.bound,
        reference: cfg.reference,
        p: cfg.p,
        points,
        left_slope,
        right_slope,
    })
}

/// Matrix in `slot` for the SPD matrix `s` with eigendecomposition `eig`.
fn slot_matrix(slot: Slot, s: &SymMatrix, eig: &SymEigen) -> Result<SymMatrix> {
    match slot {
        Slot::Identity => Ok(SymMatrix::identity(s.dim())),
        Slot::Matrix => Ok(s.clone()),
        Slot::Inverse => eig.map_values(|l| 1.0 / l),
    }
}

fn slot_eta(slot: Slot, eta: f64) -> Result<f64> {
    match slot {
        Slot::Identity => Ok(0.0),
        Slot::Matrix => Ok(eta),
        Slot::Inverse => eta_of_inverse(eta),
    }
}

/// Decomposition of `(A of first, B of second)` for a variant, reusing an
/// analytic decomposition when the mixed pair coincides with one of them.
fn mixed_pair(
    variant: PairVariant,
    first: (&SymMatrix, &SymEigen, &PairEigen),
    second: (&SymMatrix, &SymEigen, &PairEigen),
) -> Result<PairEigen> {
    let (a_slot, b_slot) = variant.slots();
    match (a_slot, b_slot) {
        (_, Slot::Identity) => Ok(first.2.clone()),
        (Slot::Identity, _) => Ok(second.2.clone()),
        _ => pair_eigendecompose(&slot_matrix(a_slot, first.0, first.1)?, &slot_matrix(b_slot, second.0, second.1)?),
    }
}

fn evaluate_point(family: &PenaltyFamily, kappa: f64, cfg: &SweepConfig) -> Result<SweepPoint> {
    let variant = cfg.variant;
    let sel = variant.bounded_branch();
    let (a_slot, b_slot) = variant.slots();
    let block = family.block_form(kappa)?;
    let h = family.assemble(kappa)?;
    let d = block.dkappa()?;
    let h_eig = sym_eigen(&h)?;
    let d_eig = block.dkappa_eigen()?;
    let h_pair = variant_eigen(&h_eig, variant)?;
    let d_pair = variant_eigen(&d_eig, variant)?;

    let mut flags = Vec::new();
    if cfg.k > block.kernel_dim() {
        flags.push(format!("k = {} exceeds kernel dimension {}", cfg.k, block.kernel_dim()));
    }
    if !block.branches_separated()? {
        flags.push("bounded and escaping branches overlap".to_string());
    }

    let (left, report) = match cfg.reference {
        Reference::Limit => {
            let base = partition_with(&d_pair, cfg.k, sel)?;
            let tilde = partition_with(&h_pair, cfg.k, sel)?;
            let b_d = slot_matrix(b_slot, &d, &d_eig)?;
            let angle = sin_theta_m(&base.x1, &m_orthonormalize(&tilde.x1, &b_d)?, &b_d)?;
            let left = match cfg.bound.norm() {
                NormKind::Spectral => angle.norm2,
                NormKind::Frobenius => angle.norm_f,
            };
            let inter = mixed_pair(variant, (&h, &h_eig, &h_pair), (&d, &d_eig, &d_pair))?;
            let inter = partition_with(&inter, cfg.k, sel)?;
            if inter.is_degenerate_split(1e-12) || base.is_degenerate_split(1e-12) {
                flags.push("degenerate split".to_string());
            }
            let gaps = GapReport::compute(&base.lambda2, &inter.lambda1, &inter.lambda2, &tilde.lambda1)?;
            let eta = block.eta_kappa;
            let (eta_a, eta_b) = (slot_eta(a_slot, eta)?, slot_eta(b_slot, eta)?);
            let report = match cfg.bound {
                BoundKind::Main => bound_main(psi_bound_from_eta(eta_a)?, psi_bound_from_eta(eta_b)?, eta_b, &gaps, cfg.p),
                BoundKind::Phi => bound_main_phi(eta_a, eta_b, eta_a, eta_b, &gaps, cfg.p),
                BoundKind::Frobenius => {
                    let psi_a = measure(&slot_matrix(a_slot, &d, &d_eig)?, &slot_matrix(a_slot, &h, &h_eig)?)?;
                    let psi_b = measure(&b_d, &slot_matrix(b_slot, &h, &h_eig)?)?;
                    bound_frobenius(psi_a.psi_f, psi_b.psi_f, gaps.relgap, gaps.relgap_comp)
                }
            };
            (left, report)
        }
        Reference::PerturbedPair => {
            let (a_h, b_h) = (slot_matrix(a_slot, &h, &h_eig)?, slot_matrix(b_slot, &h, &h_eig)?);
            let (a_d, b_d) = (slot_matrix(a_slot, &d, &d_eig)?, slot_matrix(b_slot, &d, &d_eig)?);
            let triple = PairTriple {
                intermediate: mixed_pair(variant, (&d, &d_eig, &d_pair), (&h, &h_eig, &h_pair))?,
                base: h_pair,
                perturbed: d_pair,
            };
            let opts = AnalysisOptions { selection: sel, ..Default::default() };
            let analysis = PerturbationAnalysis::from_decompositions(&a_h, &b_h, &a_d, &b_d, cfg.k, &triple, &opts)?;
            if analysis.degenerate_split {
                flags.push("degenerate split".to_string());
            }
            let report = match cfg.bound {
                BoundKind::Main => analysis.main_bound(cfg.p).clone(),
                BoundKind::Phi => analysis.phi_bound(cfg.p).clone(),
                BoundKind::Frobenius => analysis.bound_frobenius.clone(),
            };
            let report = if report.applicable {
                Ok(report)
            } else {
                Err(Error::InvalidArgument(report.reason.unwrap_or_default()))
            };
            (analysis.exact(cfg.bound.norm()), report)
        }
    };

    let report = report.unwrap_or_else(|e| {
        flags.push(format!("bound inapplicable: {e}"));
        BoundReport::inapplicable(cfg.bound.norm(), Some(cfg.p), &e)
    });
    let quotient = if !report.applicable || (left == 0.0 && report.total == 0.0) {
        None
    } else {
        Some(left / report.total)
    };
    if quotient.is_some_and(|q| q > 1.0 + QUOTIENT_SLACK) {
        flags.push("quotient exceeds one".to_string());
    }
    Ok(SweepPoint {
        kappa,
        left,
        right: report.total,
        quotient,
        eta_kappa: block.eta_kappa,
        step1: report.step1,
        step2: report.step2,
        flags,
    })
}
