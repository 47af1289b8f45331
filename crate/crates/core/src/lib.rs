//! Axisymmetric Boussinesq-type flow in a bounded cylinder: discretization,
//! time integration, norm diagnostics and a priori estimate checks.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod dynamics;
pub mod elliptic;
pub mod error;
pub mod estimates;
pub mod field;
pub mod flux;
pub mod grid;
pub mod norms;
pub mod ops;
pub mod scenarios;

pub use error::{Error, Result};
pub use field::{CylVectorField, Parity, ScalarField};
pub use grid::Grid;
