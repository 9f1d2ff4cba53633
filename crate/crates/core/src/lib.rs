//! Operational analysis of PT-symmetric and quasi-Hermitian quantum systems.
//!
//! The crate provides, on top of a small dense complex linear-algebra layer:
//!
//! - antiunitary operators `K: x -> U conj(x)` with involution checks,
//!   real forms, and metric-twisted (`eta`-antiunitary) generalizations;
//! - PT-phase classification of `K`-symmetric operators (unbroken, broken,
//!   exceptional point) together with `K`-invariant eigenbases and
//!   `K`-symmetric spectral projectors;
//! - metric operators: quasi-Hermiticity checks, construction of a positive
//!   metric from an unbroken spectrum, charge operators, and the associated
//!   inner products, including the closed-form 2x2 family;
//! - generalized-probabilistic-theory state-space analysis for effect
//!   theories built from `K`-symmetric projectors and/or `eta`-Hermitian
//!   effects: state-space dimension probing, equivalence maps onto Hermitian
//!   quantum theory, and a constructive certifier that the purely
//!   `K`-symmetric effect theory admits exactly one state.
//!
//! A command-line interface (`ptqh`) exposes the same operations on matrices
//! stored as structured JSON files.

pub mod antilinear;
pub mod classify;
pub mod cli;
pub mod error;
pub mod gpt;
pub mod io;
pub mod linalg;
pub mod metric;
pub mod random;

pub use error::{Error, Result};
