//! Penalty families `H_κ = H_b + κ H_e`, their block structure, the five
//! pair variants built from `H_κ`, and effectivity-quotient sweeps.

mod family;
mod sweep;
mod variant;

pub use family::{builtin_example, tridiagonal_family, BlockForm, PenaltyFamily, KERNEL_TOL};
pub use sweep::{
    effectivity_sweep, loglog_slope, BoundKind, KappaGrid, Reference, SweepConfig, SweepPoint, SweepResult,
    QUOTIENT_SLACK,
};
pub use variant::{pair_variant, variant_eigen, PairVariant, Slot, VariantClass};
