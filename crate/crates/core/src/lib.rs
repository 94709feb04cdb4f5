//! Exact-arithmetic toolkit for power-cost clustering with penalties.

pub mod error;
pub mod geometry;
pub mod instances;
pub mod oracles;
pub mod reductions;
pub mod solvers;

pub use error::{Error, Result};
