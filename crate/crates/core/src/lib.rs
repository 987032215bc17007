//! Relative perturbation bounds for eigenspaces of definite matrix pairs.

pub mod analysis;
pub mod angles;
pub mod bounds;
pub mod error;
pub mod io;
pub mod matpair;
mod nan_serde;
pub mod penalty;
pub mod perturb;

pub use error::{Error, Result};
