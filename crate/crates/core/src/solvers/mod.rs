//! Exact optimizers: exhaustive search and the planar separating-curve recursion.

mod brute;
pub mod curves;
pub mod perturb;
pub mod planar;
mod table;

use crate::instances::{CostValue, Solution};

pub use brute::{brute_force_solve, brute_force_solve_metric, brute_force_solve_with_cap};
pub use curves::{enumerate_separating_curves, equidistant_points, CurveRule, SeparatingCurve};
pub use perturb::perturb_if_degenerate;
pub use planar::{curve_length_bound, exact_planar_solve, PlanarOptions};

/// Result of a solver run: the open centers (forced ones included) and their exact cost.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveReport {
    pub solution: Solution,
    pub cost: CostValue,
    pub nodes_explored: u64,
    pub curves_enumerated: u64,
    /// Longest separating curve the recursion used.
    pub max_curve_len: usize,
}
