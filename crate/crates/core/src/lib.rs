//! Dirac structures, dual pairs and spray-built realizations on coordinate
//! patches of ℝⁿ.

pub mod cli;
pub mod dirac;
pub mod domain;
pub mod error;
pub mod expr;
pub mod fields;
pub mod lindirac;
pub(crate) mod linalg;
pub mod realization;
pub mod verify;

pub use error::{Error, Result};
