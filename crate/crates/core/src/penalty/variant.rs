use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matpair::{spd_inverse, PairEigen, Selection, SymEigen, SymMatrix};

/// The five definite pairs built from one SPD matrix `H`. All share the
/// eigenvectors of `H`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PairVariant {
    /// `(H, I)`
    #[serde(rename = "H,I")]
    HI,
    /// `(I, H)`
    #[serde(rename = "I,H")]
    IH,
    /// `(H⁻¹, H)`
    #[serde(rename = "Hinv,H")]
    HinvH,
    /// `(H⁻¹, I)`
    #[serde(rename = "Hinv,I")]
    HinvI,
    /// `(I, H⁻¹)`
    #[serde(rename = "I,Hinv")]
    IHinv,
}

/// Inner product in which a variant measures angles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VariantClass {
    /// `B = I`
    Euclidean,
    /// `B = H`
    Energy,
    /// `B = H⁻¹`
    Dual,
}

/// Which slot of a pair holds which function of `H`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Slot {
    Identity,
    Matrix,
    Inverse,
}

impl PairVariant {
    pub const ALL: [PairVariant; 5] =
        [PairVariant::HI, PairVariant::IH, PairVariant::HinvH, PairVariant::HinvI, PairVariant::IHinv];

    pub fn tag(self) -> &'static str {
        match self {
            PairVariant::HI => "H,I",
            PairVariant::IH => "I,H",
            PairVariant::HinvH => "Hinv,H",
            PairVariant::HinvI => "Hinv,I",
            PairVariant::IHinv => "I,Hinv",
        }
    }

    pub fn slots(self) -> (Slot, Slot) {
        match self {
            PairVariant::HI => (Slot::Matrix, Slot::Identity),
            PairVariant::IH => (Slot::Identity, Slot::Matrix),
            PairVariant::HinvH => (Slot::Inverse, Slot::Matrix),
            PairVariant::HinvI => (Slot::Inverse, Slot::Identity),
            PairVariant::IHinv => (Slot::Identity, Slot::Inverse),
        }
    }

    pub fn class(self) -> VariantClass {
        match self.slots().1 {
            Slot::Identity => VariantClass::Euclidean,
            Slot::Matrix => VariantClass::Energy,
            Slot::Inverse => VariantClass::Dual,
        }
    }

    /// End of the spectrum holding the eigenvalues that stay bounded when
    /// the large eigenvalues of `H` escape to infinity.
    pub fn bounded_branch(self) -> Selection {
        match self {
            PairVariant::HI | PairVariant::IHinv => Selection::Lowest,
            PairVariant::IH | PairVariant::HinvH | PairVariant::HinvI => Selection::Highest,
        }
    }

    /// Eigenvalue of the pair belonging to the eigenvalue `lambda` of `H`.
    pub fn map_eigenvalue(self, lambda: f64) -> f64 {
        match self {
            PairVariant::HI | PairVariant::IHinv => lambda,
            PairVariant::IH | PairVariant::HinvI => 1.0 / lambda,
            PairVariant::HinvH => 1.0 / (lambda * lambda),
        }
    }

    /// Factor turning a unit eigenvector of `H` into a `B`-normalized one.
    fn vector_scale(self, lambda: f64) -> f64 {
        match self.class() {
            VariantClass::Euclidean => 1.0,
            VariantClass::Energy => 1.0 / lambda.sqrt(),
            VariantClass::Dual => lambda.sqrt(),
        }
    }
}

impl FromStr for PairVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .chars()
            .filter(|c| !c.is_whitespace() && !matches!(c, '(' | ')' | '_' | '^'))
            .collect::<String>()
            .to_ascii_lowercase()
            .replace("-1", "inv")
            .replace("⁻¹", "inv");
        match key.as_str() {
            "h,i" | "hi" => Ok(PairVariant::HI),
            "i,h" | "ih" => Ok(PairVariant::IH),
            "hinv,h" | "hinvh" => Ok(PairVariant::HinvH),
            "hinv,i" | "hinvi" => Ok(PairVariant::HinvI),
            "i,hinv" | "ihinv" => Ok(PairVariant::IHinv),
            _ => Err(Error::UnknownVariant(s.to_string())),
        }
    }
}

impl fmt::Display for PairVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Builds the pair `(A, B)` named by `variant`; inverses go through the
/// eigendecomposition of `h`.
pub fn pair_variant(h: &SymMatrix, variant: PairVariant) -> Result<(SymMatrix, SymMatrix)> {
    let n = h.dim();
    let inverse = match variant {
        PairVariant::HinvH | PairVariant::HinvI | PairVariant::IHinv => Some(spd_inverse(h)?),
        _ => {
            crate::matpair::cholesky(h)?;
            None
        }
    };
    let pick = |slot: Slot| match slot {
        Slot::Identity => SymMatrix::identity(n),
        Slot::Matrix => h.clone(),
        Slot::Inverse => inverse.clone().expect("inverse computed for inverse slots"),
    };
    let (a, b) = variant.slots();
    Ok((pick(a), pick(b)))
}

/// Decomposition of the pair named by `variant` from the eigendecomposition
/// of `H`, without forming inverses.
pub fn variant_eigen(eig: &SymEigen, variant: PairVariant) -> Result<PairEigen> {
    if eig.values.iter().any(|v| !(*v > 0.0)) {
        return Err(Error::NotPositiveDefinite { what: "H", pivot: None });
    }
    let mut x = eig.vectors.clone();
    for (j, &lambda) in eig.values.iter().enumerate() {
        x.column_mut(j).scale_mut(variant.vector_scale(lambda));
    }
    let values = eig.values.iter().map(|&l| variant.map_eigenvalue(l)).collect();
    Ok(PairEigen::from_unsorted(x, values, f64::NAN))
}
