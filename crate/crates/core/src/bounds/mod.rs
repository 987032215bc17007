//! Relative gaps, eigenspace bounds for simultaneous perturbations of `H`
//! and `M`, and a classical bound for comparison.

mod comparison;
mod gaps;
mod theorems;

pub use comparison::{
    chordal_gap, crawford, crawford_with, sun_bound, sun_bound_with, CrawfordOptions, CrawfordResult,
    SunBound, SunInputs,
};
pub use gaps::{
    check_dichotomy, rel_gap, rel_gap_comp, rel_gap_p, Dichotomy, DichotomyReport, GapReport, PNorm, RelGapP,
};
pub use theorems::{
    bound_frobenius, bound_main, bound_main_phi, bound_step1, sylvester_diag_solve, BoundReport, NormKind,
};
