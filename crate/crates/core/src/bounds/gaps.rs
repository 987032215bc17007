use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Index `p` of the `p`-mean in the denominator of [`rel_gap_p`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum PNorm {
    #[serde(rename = "1")]
    One,
    #[serde(rename = "2")]
    Two,
    #[default]
    #[serde(rename = "inf")]
    Inf,
}

impl PNorm {
    pub const ALL: [PNorm; 3] = [PNorm::One, PNorm::Two, PNorm::Inf];

    /// `(aᵖ + bᵖ)^{1/p}`, or `max(a, b)` for `p = ∞`.
    pub fn mean(self, a: f64, b: f64) -> f64 {
        match self {
            PNorm::One => a + b,
            PNorm::Two => a.hypot(b),
            PNorm::Inf => a.max(b),
        }
    }
}

impl FromStr for PNorm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "1" => Ok(PNorm::One),
            "2" => Ok(PNorm::Two),
            "inf" | "infinity" | "∞" => Ok(PNorm::Inf),
            _ => Err(Error::BadP(s.to_string())),
        }
    }
}

impl fmt::Display for PNorm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PNorm::One => "1",
            PNorm::Two => "2",
            PNorm::Inf => "inf",
        })
    }
}

fn check_spectra(a: &[f64], b: &[f64]) -> Result<()> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySpectrum);
    }
    if let Some(v) = a.iter().chain(b).find(|v| !(v.is_finite() && **v != 0.0)) {
        return Err(Error::InvalidArgument(format!("eigenvalue {v} must be finite and nonzero")));
    }
    Ok(())
}

fn min_over_pairs(a: &[f64], b: &[f64], f: impl Fn(f64, f64) -> f64) -> f64 {
    let mut best = f64::INFINITY;
    for &x in a {
        for &y in b {
            best = best.min(f(x, y));
        }
    }
    best
}

/// `min |λ − λ̂| / √(|λ||λ̂|)` over `λ ∈ Λ₂`, `λ̂ ∈ Λ̂₁`. Invariant under
/// inverting both spectra.
pub fn rel_gap(lambda2: &[f64], lambda1_hat: &[f64]) -> Result<f64> {
    check_spectra(lambda2, lambda1_hat)?;
    Ok(min_over_pairs(lambda2, lambda1_hat, |a, b| (a - b).abs() / (a.abs() * b.abs()).sqrt()))
}

/// `min |λ̂ − λ̃| / (|λ̂|ᵖ + |λ̃|ᵖ)^{1/p}` over `λ̂ ∈ Λ̂₂`, `λ̃ ∈ Λ̃₁`.
pub fn rel_gap_p(lambda2_hat: &[f64], lambda1_tilde: &[f64], p: PNorm) -> Result<f64> {
    check_spectra(lambda2_hat, lambda1_tilde)?;
    Ok(min_over_pairs(lambda2_hat, lambda1_tilde, |a, b| (a - b).abs() / p.mean(a.abs(), b.abs())))
}

/// `min |λ̂ − λ̃| / |λ̃|` over `λ̂ ∈ Λ̂₂`, `λ̃ ∈ Λ̃₁`.
pub fn rel_gap_comp(lambda2_hat: &[f64], lambda1_tilde: &[f64]) -> Result<f64> {
    check_spectra(lambda2_hat, lambda1_tilde)?;
    Ok(min_over_pairs(lambda2_hat, lambda1_tilde, |a, b| (a - b).abs() / b.abs()))
}

/// Relative position of the complementary spectrum `Λ̂₂` and the selected
/// perturbed spectrum `Λ̃₁`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Dichotomy {
    /// `Λ̂₂` lies below `Λ̃₁`.
    CondA,
    /// `Λ̃₁` lies below `Λ̂₂`.
    CondB,
    /// The spectra interlace.
    #[serde(rename = "None")]
    Interlaced,
}

/// Dichotomy with the lower spectrum's maximum `alpha` and the separation
/// `delta_sep` to the upper spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DichotomyReport {
    pub dichotomy: Dichotomy,
    pub alpha: Option<f64>,
    pub delta_sep: Option<f64>,
}

impl DichotomyReport {
    /// `δ/(α+δ)`, a lower bound for every `RelGap_p` under the dichotomy.
    pub fn separation_ratio(&self) -> Option<f64> {
        match (self.alpha, self.delta_sep) {
            (Some(a), Some(d)) => Some(d / (a + d)),
            _ => None,
        }
    }
}

pub fn check_dichotomy(lambda2_hat: &[f64], lambda1_tilde: &[f64]) -> Result<DichotomyReport> {
    if lambda2_hat.is_empty() || lambda1_tilde.is_empty() {
        return Err(Error::EmptySpectrum);
    }
    let min = |v: &[f64]| v.iter().copied().fold(f64::INFINITY, f64::min);
    let max = |v: &[f64]| v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (hat_lo, hat_hi) = (min(lambda2_hat), max(lambda2_hat));
    let (til_lo, til_hi) = (min(lambda1_tilde), max(lambda1_tilde));
    Ok(if hat_hi <= til_lo {
        DichotomyReport { dichotomy: Dichotomy::CondA, alpha: Some(hat_hi), delta_sep: Some(til_lo - hat_hi) }
    } else if til_hi <= hat_lo {
        DichotomyReport { dichotomy: Dichotomy::CondB, alpha: Some(til_hi), delta_sep: Some(hat_lo - til_hi) }
    } else {
        DichotomyReport { dichotomy: Dichotomy::Interlaced, alpha: None, delta_sep: None }
    })
}

/// `RelGap_p` for each supported `p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RelGapP {
    #[serde(rename = "1")]
    pub one: f64,
    #[serde(rename = "2")]
    pub two: f64,
    #[serde(rename = "inf")]
    pub inf: f64,
}

impl RelGapP {
    pub fn get(&self, p: PNorm) -> f64 {
        match p {
            PNorm::One => self.one,
            PNorm::Two => self.two,
            PNorm::Inf => self.inf,
        }
    }
}

/// Every gap quantity entering the bounds.
///
/// `relgap` separates the unperturbed complement `Λ₂` from the intermediate
/// selected `Λ̂₁`; the others separate `Λ̂₂` from the perturbed `Λ̃₁`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    pub relgap: f64,
    pub relgap_p: RelGapP,
    pub relgap_comp: f64,
    #[serde(flatten)]
    pub dichotomy: DichotomyReport,
}

impl GapReport {
    pub fn compute(
        lambda2: &[f64],
        lambda1_hat: &[f64],
        lambda2_hat: &[f64],
        lambda1_tilde: &[f64],
    ) -> Result<Self> {
        Ok(Self {
            relgap: rel_gap(lambda2, lambda1_hat)?,
            relgap_p: RelGapP {
                one: rel_gap_p(lambda2_hat, lambda1_tilde, PNorm::One)?,
                two: rel_gap_p(lambda2_hat, lambda1_tilde, PNorm::Two)?,
                inf: rel_gap_p(lambda2_hat, lambda1_tilde, PNorm::Inf)?,
            },
            relgap_comp: rel_gap_comp(lambda2_hat, lambda1_tilde)?,
            dichotomy: check_dichotomy(lambda2_hat, lambda1_tilde)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-15 * b.abs().max(1.0)
    }

    #[test]
    fn rel_gap_examples() {
        assert!(close(rel_gap(&[3.0], &[1.0]).unwrap(), 2.0 / 3f64.sqrt()));
        assert_eq!(rel_gap(&[2.5], &[2.5]).unwrap(), 0.0);
        assert!(close(rel_gap(&[1.0 / 3.0], &[1.0]).unwrap(), rel_gap(&[3.0], &[1.0]).unwrap()));
        assert_eq!(rel_gap(&[], &[1.0]), Err(Error::EmptySpectrum));
    }

    #[test]
    fn rel_gap_p_examples() {
        assert!(close(rel_gap_p(&[3.0], &[1.0], PNorm::One).unwrap(), 0.5));
        assert!(close(rel_gap_p(&[3.0], &[1.0], PNorm::Inf).unwrap(), 2.0 / 3.0));
        assert!(close(rel_gap_p(&[3.0], &[1.0], PNorm::Two).unwrap(), 2.0 / 10f64.sqrt()));
        assert_eq!(rel_gap_p(&[2.0], &[2.0], PNorm::Two).unwrap(), 0.0);
    }

    #[test]
    fn rel_gap_comp_examples() {
        assert!(close(rel_gap_comp(&[3.0], &[1.0]).unwrap(), 2.0));
        assert!(close(rel_gap_comp(&[1.0], &[2.0]).unwrap(), 0.5));
        assert_eq!(rel_gap_comp(&[1.0], &[1.0]).unwrap(), 0.0);
    }

    #[test]
    fn p_parsing() {
        assert_eq!("inf".parse::<PNorm>().unwrap(), PNorm::Inf);
        assert_eq!("2".parse::<PNorm>().unwrap(), PNorm::Two);
        assert_eq!("3".parse::<PNorm>(), Err(Error::BadP("3".into())));
        assert_eq!(PNorm::default(), PNorm::Inf);
    }

    #[test]
    fn dichotomy_examples() {
        let r = check_dichotomy(&[5.0, 6.0], &[1.0, 2.0]).unwrap();
        assert_eq!(r.dichotomy, Dichotomy::CondB);
        assert_eq!((r.alpha, r.delta_sep), (Some(2.0), Some(3.0)));
        assert!(close(r.separation_ratio().unwrap(), 0.6));

        let r = check_dichotomy(&[1.0], &[5.0]).unwrap();
        assert_eq!(r.dichotomy, Dichotomy::CondA);
        assert_eq!((r.alpha, r.delta_sep), (Some(1.0), Some(4.0)));

        let r = check_dichotomy(&[1.0, 5.0], &[3.0]).unwrap();
        assert_eq!(r.dichotomy, Dichotomy::Interlaced);
        assert_eq!(r.separation_ratio(), None);
    }
}
