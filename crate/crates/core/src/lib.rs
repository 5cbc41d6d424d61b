//! Repetitiveness measures for two-dimensional (and d-dimensional) strings.
//!
//! The crate covers the counting measures (`delta`, `delta_square`, exact
//! attractors), grammar compression with 2D straight-line programs, heavy-path
//! random access on grammar-compressed matrices, 2D bidirectional macro
//! schemes, row-major 2D Block Trees and row / Peano-Hilbert linearizations.
//!
//! All positions in the public API are 1-based and inclusive.

pub mod access;
pub mod blocktree;
pub mod budget;
pub mod error;
pub mod experiments;
pub mod factors;
pub mod families;
pub mod grammar;
pub mod linearize;
pub mod macroscheme;
pub mod matrix;
pub mod measures;
pub mod multidim;
pub mod random;
pub mod selftest;

pub use budget::Budget;
pub use error::{Error, Result};
pub use factors::{distinct_factors, factor_count, FactorGroup, FactorShape};
pub use grammar::{Grammar2D, Rule2D, VarId};
pub use macroscheme::MacroScheme2D;
pub use matrix::{Alphabet, Matrix2D, Symbol};
pub use measures::{AttractorSet, DeltaResult};
pub use multidim::{GrammarNd, NdString};

/// Exact non-negative rational used for `delta` values.
pub type Ratio = num_rational::Ratio<u64>;
