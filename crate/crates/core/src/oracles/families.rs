//! Deterministic generators of verification cases.

use std::collections::BTreeSet;

use itertools::Itertools;
use rand::seq::index::sample;
use rand::Rng;

use crate::error::Result;
use crate::geometry::{Point, RadicalSum};
use crate::instances::{Client, ClusteringInstance};
use crate::reductions::{Graph, GridTilingInstance};

fn pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).tuple_combinations().collect()
}

fn graph_of(n: usize, mask: u64, all: &[(usize, usize)]) -> Graph {
    Graph::new(n, all.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, &e)| e))
        .expect("pairs are distinct and in range")
}

/// Smallest edge mask over all relabellings; equal for isomorphic graphs.
fn canonical_mask(n: usize, mask: u64, all: &[(usize, usize)]) -> u64 {
    let index = |u: usize, v: usize| {
        let (a, b) = (u.min(v), u.max(v));
        all.iter().position(|&e| e == (a, b)).expect("pair present")
    };
    (0..n)
        .permutations(n)
        .map(|p| {
            all.iter()
                .enumerate()
                .filter(|(b, _)| mask >> b & 1 == 1)
                .fold(0u64, |acc, (_, &(u, v))| acc | 1 << index(p[u], p[v]))
        })
        .min()
        .unwrap_or(mask)
}

/// One representative per isomorphism class of graphs on exactly `n` vertices with at least one edge.
pub fn nonisomorphic_graphs(n: usize) -> Vec<Graph> {
    let all = pairs(n);
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for mask in 1u64..(1u64 << all.len()) {
        if seen.insert(canonical_mask(n, mask, &all)) {
            out.push(graph_of(n, mask, &all));
        }
    }
    out
}

/// Each edge present with probability 1/2, redrawn until nonempty.
pub fn random_graph<R: Rng>(n: usize, rng: &mut R) -> Graph {
    let all = pairs(n);
    loop {
        let mask = (0..all.len()).filter(|_| rng.random_bool(0.5)).fold(0u64, |m, b| m | 1 << b);
        if mask != 0 {
            return graph_of(n, mask, &all);
        }
    }
}

/// Every `k x k` instance whose cells each hold one pair of `[n] x [n]`, in lexicographic order.
pub fn singleton_grids(n: u32, k: u32) -> Vec<GridTilingInstance> {
    let cell: Vec<(u32, u32)> = (1..=n).cartesian_product(1..=n).collect();
    (0..(k * k))
        .map(|_| cell.iter().copied())
        .multi_cartesian_product()
        .map(|choice| {
            let sets = choice.chunks(k as usize).map(|row| row.iter().map(|&p| vec![p]).collect()).collect();
            GridTilingInstance::new(n, k, sets).expect("pairs in range")
        })
        .collect()
}

/// Cells of `1..=max_set` distinct uniform pairs.
pub fn random_grid<R: Rng>(n: u32, k: u32, max_set: usize, rng: &mut R) -> GridTilingInstance {
    let total = (n * n) as usize;
    let sets = (0..k)
        .map(|_| {
            (0..k)
                .map(|_| {
                    let size = rng.random_range(1..=max_set.min(total));
                    sample(rng, total, size).into_iter().map(|x| (x as u32 / n + 1, x as u32 % n + 1)).collect()
                })
                .collect()
        })
        .collect();
    GridTilingInstance::new(n, k, sets).expect("pairs in range")
}

/// Shape of the random planar instances used to cross-check the planar solver.
#[derive(Clone, Debug)]
pub struct PlanarCaseShape {
    pub k: usize,
    pub max_candidates: usize,
    pub max_clients: usize,
    /// Coordinates are integers in `[0, coord_max]`.
    pub coord_max: i64,
    pub power: u32,
    pub penalties: bool,
}

/// Distinct integer candidates (at least `k`), integer clients with weights in 1..=3, and
/// integer penalties in `1..=coord_max^p / 2` when enabled.
pub fn random_planar_instance<R: Rng>(shape: &PlanarCaseShape, rng: &mut R) -> Result<ClusteringInstance> {
    let point = |rng: &mut R| {
        Point::from_ints(&[rng.random_range(0..=shape.coord_max), rng.random_range(0..=shape.coord_max)])
            .expect("two coordinates")
    };
    let n = rng.random_range(shape.k.max(1)..=shape.max_candidates.max(shape.k));
    let mut candidates: Vec<Point> = Vec::with_capacity(n);
    while candidates.len() < n {
        let p = point(rng);
        if !candidates.contains(&p) {
            candidates.push(p);
        }
    }
    let m = rng.random_range(1..=shape.max_clients.max(1));
    let top = (shape.coord_max.pow(shape.power) / 2).max(1);
    let clients = (0..m)
        .map(|_| {
            let loc = point(rng);
            let weight = rng.random_range(1..=3);
            let penalty = shape.penalties.then(|| RadicalSum::from_int(rng.random_range(1..=top)));
            Client::new(loc, weight, penalty)
        })
        .collect::<Result<Vec<_>>>()?;
    ClusteringInstance::new(2, shape.power, candidates, clients)
}
