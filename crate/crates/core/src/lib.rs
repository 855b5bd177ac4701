//! Finite-field tools for polynomial strength, analytic rank and partition rank.
//!
//! Start at [`gf::field_create`] and [`parse::parse`], then use [`expsum`] for
//! biases, [`family`] for spans of polynomials, [`rank`] for partition-rank
//! bounds and [`variety`] for point counts and singular loci.

pub mod cli;
pub mod error;
pub mod expsum;
pub mod family;
pub mod generators;
pub mod gf;
pub mod kernel;
pub mod linalg;
pub mod parse;
pub mod poly;
pub mod rank;
pub mod suite;
pub mod variety;

pub use error::{Error, Result};
