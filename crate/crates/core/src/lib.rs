//! Exact computations with the Hecke operator on compactly induced
//! symmetric-power representations of GL₂ over an unramified extension of
//! Q_p, together with the binomial congruences and mod-p module structure
//! needed to re-derive witness computations at small parameters.

pub mod error;
pub mod padic;
pub mod sympoly;
pub mod tree;
pub mod hecke;
pub mod linalg;
pub mod congr;
pub mod structure;
pub mod nonvanish;
pub mod harness;

pub use error::{Error, Result};
