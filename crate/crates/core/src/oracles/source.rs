//! Exhaustive solvers for the source problems of the reductions.

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::reductions::{Graph, GridTilingInstance};

/// Whether some `k` vertices together touch at least `s` edges.
pub fn solve_pvc(g: &Graph, k: usize, s: usize) -> Result<bool> {
    let n = g.vertex_count();
    if k > n {
        return Err(Error::InvalidParameter(format!("k = {k} exceeds the {n} vertices")));
    }
    if s > g.edge_count() {
        return Err(Error::InvalidParameter(format!("s = {s} exceeds the {} edges", g.edge_count())));
    }
    Ok((0..n).combinations(k).any(|set| {
        let mut chosen = vec![false; n];
        for v in set {
            chosen[v] = true;
        }
        g.edges().iter().filter(|&&(u, v)| chosen[u] || chosen[v]).count() >= s
    }))
}

/// Whether one pair per cell can be chosen so that first coordinates never decrease along `i`
/// and second coordinates never decrease along `j`.
pub fn solve_gridtiling_inequality(gt: &GridTilingInstance) -> bool {
    let k = gt.k as usize;
    let mut pick: Vec<(u32, u32)> = vec![(0, 0); k * k];
    fn place(gt: &GridTilingInstance, k: usize, cell: usize, pick: &mut [(u32, u32)]) -> bool {
        if cell == k * k {
            return true;
        }
        let (i, j) = (cell / k, cell % k);
        for &(a, b) in gt.set(i, j) {
            if i > 0 && pick[cell - k].0 > a {
                continue;
            }
            if j > 0 && pick[cell - 1].1 > b {
                continue;
            }
            pick[cell] = (a, b);
            if place(gt, k, cell + 1, pick) {
                return true;
            }
        }
        false
    }
    place(gt, k, 0, &mut pick)
}
