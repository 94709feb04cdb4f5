//! Problem data: geometric and metric clustering instances, solutions, and exact cost evaluation.

mod io;

use std::cmp::Ordering;
use std::collections::BTreeSet;

use num_traits::{Signed, Zero};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::geometry::radical::{compare_radical_sums, RadicalSum, DEFAULT_PRECISION_CAP};
use crate::geometry::rational::{pow, Rational};
use crate::geometry::Point;

pub use io::{parse_instance, radical_to_pairs, read_instance, serialize_instance, write_instance, Instance};

/// Exact value of a clustering cost: a rational for even powers, a sum of square roots otherwise.
pub type CostValue = RadicalSum;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Client {
    pub location: Point,
    pub weight: u128,
    pub penalty: Option<RadicalSum>,
}

impl Client {
    pub fn new(location: Point, weight: u128, penalty: Option<RadicalSum>) -> Result<Self> {
        if weight == 0 {
            return Err(Error::InvalidParameter("client weight must be at least 1".into()));
        }
        if let Some(p) = &penalty {
            if p.signum(DEFAULT_PRECISION_CAP)? != Ordering::Greater {
                return Err(Error::InvalidParameter(format!("penalty must be positive, got {p}")));
            }
        }
        Ok(Self { location, weight, penalty })
    }

    pub fn unit(location: Point) -> Self {
        Self { location, weight: 1, penalty: None }
    }
}

/// Candidate centers and weighted clients in dimension 2, 3 or 4 under cost `distance^power`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClusteringInstance {
    dimension: usize,
    power: u32,
    candidates: Vec<Point>,
    clients: Vec<Client>,
    threshold: Option<RadicalSum>,
    meta: Map<String, Value>,
}

impl ClusteringInstance {
    pub fn new(dimension: usize, power: u32, candidates: Vec<Point>, clients: Vec<Client>) -> Result<Self> {
        if !(2..=4).contains(&dimension) {
            return Err(Error::Dimension { got: dimension, expected: "2, 3 or 4".into() });
        }
        if power == 0 {
            return Err(Error::InvalidParameter("power must be at least 1".into()));
        }
        for p in candidates.iter().chain(clients.iter().map(|c| &c.location)) {
            if p.dim() != dimension {
                return Err(Error::DimensionMismatch(p.dim(), dimension));
            }
        }
        Ok(Self { dimension, power, candidates, clients, threshold: None, meta: Map::new() })
    }

    pub fn with_threshold(mut self, threshold: RadicalSum) -> Self {
        self.threshold = Some(threshold);
        self
    }

    pub fn with_meta(mut self, meta: Map<String, Value>) -> Self {
        self.meta = meta;
        self
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn power(&self) -> u32 {
        self.power
    }

    pub fn candidates(&self) -> &[Point] {
        &self.candidates
    }

    pub fn clients(&self) -> &[Client] {
        &self.clients
    }

    pub fn threshold(&self) -> Option<&RadicalSum> {
        self.threshold.as_ref()
    }

    pub fn meta(&self) -> &Map<String, Value> {
        &self.meta
    }

    pub fn meta_mut(&mut self) -> &mut Map<String, Value> {
        &mut self.meta
    }

    /// The `k` recorded by a generator, if any.
    pub fn meta_k(&self) -> Option<usize> {
        self.meta.get("k").and_then(Value::as_u64).map(|k| k as usize)
    }

    /// A copy with the candidate coordinates replaced (same count and dimension).
    pub fn with_candidates(&self, candidates: Vec<Point>) -> Result<Self> {
        if candidates.len() != self.candidates.len() {
            return Err(Error::InvalidParameter("candidate count changed".into()));
        }
        let mut out = Self::new(self.dimension, self.power, candidates, self.clients.clone())?;
        out.threshold = self.threshold.clone();
        out.meta = self.meta.clone();
        Ok(out)
    }

    pub(crate) fn check_indices<'a>(&self, idx: impl IntoIterator<Item = &'a usize>) -> Result<()> {
        for &i in idx {
            if i >= self.candidates.len() {
                return Err(Error::InvalidParameter(format!(
                    "candidate index {i} out of range (have {})",
                    self.candidates.len()
                )));
            }
        }
        Ok(())
    }
}

/// Explicit finite metric: a distance matrix over candidate and client indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MetricInstance {
    matrix: Vec<Vec<Rational>>,
    candidates: Vec<usize>,
    clients: Vec<usize>,
    threshold: Rational,
    meta: Map<String, Value>,
}

impl MetricInstance {
    pub fn new(
        matrix: Vec<Vec<Rational>>,
        candidates: Vec<usize>,
        clients: Vec<usize>,
        threshold: Rational,
    ) -> Result<Self> {
        let n = matrix.len();
        for (i, row) in matrix.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidParameter(format!("matrix row {i} has length {}", row.len())));
            }
            if !row[i].is_zero() {
                return Err(Error::InvalidParameter(format!("nonzero diagonal entry at {i}")));
            }
            for (j, v) in row.iter().enumerate() {
                if v.is_negative() {
                    return Err(Error::InvalidParameter(format!("negative distance at ({i},{j})")));
                }
                if *v != matrix[j][i] {
                    return Err(Error::InvalidParameter(format!("matrix not symmetric at ({i},{j})")));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if matrix[i][k] > &matrix[i][j] + &matrix[j][k] {
                        return Err(Error::InvalidParameter(format!(
                            "triangle inequality fails for ({i},{j},{k})"
                        )));
                    }
                }
            }
        }
        for &i in candidates.iter().chain(&clients) {
            if i >= n {
                return Err(Error::InvalidParameter(format!("point index {i} out of range")));
            }
        }
        Ok(Self { matrix, candidates, clients, threshold, meta: Map::new() })
    }

    pub fn with_meta(mut self, meta: Map<String, Value>) -> Self {
        self.meta = meta;
        self
    }

    pub fn matrix(&self) -> &[Vec<Rational>] {
        &self.matrix
    }

    pub fn candidates(&self) -> &[usize] {
        &self.candidates
    }

    pub fn clients(&self) -> &[usize] {
        &self.clients
    }

    pub fn threshold(&self) -> &Rational {
        &self.threshold
    }

    pub fn meta(&self) -> &Map<String, Value> {
        &self.meta
    }

    pub fn meta_k(&self) -> Option<usize> {
        self.meta.get("k").and_then(Value::as_u64).map(|k| k as usize)
    }

    /// Distance between candidate number `c` and client number `a` (positions in their lists).
    pub fn distance(&self, c: usize, a: usize) -> &Rational {
        &self.matrix[self.candidates[c]][self.clients[a]]
    }
}

/// Indices of the candidates opened by a solver, kept sorted and distinct.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Solution {
    pub open: Vec<usize>,
}

impl Solution {
    pub fn new(open: impl IntoIterator<Item = usize>) -> Self {
        let set: BTreeSet<usize> = open.into_iter().collect();
        Self { open: set.into_iter().collect() }
    }

    pub fn union(&self, other: &[usize]) -> Self {
        Self::new(self.open.iter().copied().chain(other.iter().copied()))
    }
}

/// `d^p` where `d2 = d^2`.
pub fn distance_power(d2: &Rational, p: u32) -> Result<RadicalSum> {
    let half = pow(d2, p / 2);
    if p.is_multiple_of(2) {
        Ok(RadicalSum::from_rational(half))
    } else {
        RadicalSum::scaled_sqrt(&half, d2)
    }
}

/// Weighted cost of one client against the open centers, capped by its penalty.
pub(crate) fn client_cost(
    inst: &ClusteringInstance,
    a: usize,
    open: &[usize],
    cap: u32,
) -> Result<Option<RadicalSum>> {
    let client = &inst.clients[a];
    let best = open
        .iter()
        .map(|&c| client.location.squared_distance_unchecked(&inst.candidates[c]))
        .min();
    let served = best.map(|d2| distance_power(&d2, inst.power)).transpose()?;
    let value = match (served, &client.penalty) {
        (Some(d), Some(p)) => {
            if compare_radical_sums(&d, p, cap)? == Ordering::Greater {
                p.clone()
            } else {
                d
            }
        }
        (Some(d), None) => d,
        (None, Some(p)) => p.clone(),
        (None, None) => return Ok(None),
    };
    Ok(Some(value.scale_int(client.weight)))
}

/// Total cost when `sol.open` together with `forced_open` are the open centers.
pub fn solution_cost(inst: &ClusteringInstance, sol: &Solution, forced_open: &[usize]) -> Result<CostValue> {
    solution_cost_with_cap(inst, sol, forced_open, DEFAULT_PRECISION_CAP)
}

pub fn solution_cost_with_cap(
    inst: &ClusteringInstance,
    sol: &Solution,
    forced_open: &[usize],
    cap: u32,
) -> Result<CostValue> {
    inst.check_indices(sol.open.iter().chain(forced_open))?;
    let open = sol.union(forced_open).open;
    let mut total = RadicalSum::zero();
    for a in 0..inst.clients.len() {
        match client_cost(inst, a, &open, cap)? {
            Some(v) => total += &v,
            None => return Err(Error::Unservable { client: a }),
        }
    }
    Ok(total)
}

pub fn metric_solution_cost(inst: &MetricInstance, sol: &Solution) -> Result<Rational> {
    if sol.open.is_empty() {
        return Err(Error::InvalidParameter("no open center".into()));
    }
    for &c in &sol.open {
        if c >= inst.candidates.len() {
            return Err(Error::InvalidParameter(format!("candidate index {c} out of range")));
        }
    }
    let mut total = Rational::zero();
    for a in 0..inst.clients.len() {
        let best = sol.open.iter().map(|&c| inst.distance(c, a)).min().expect("nonempty");
        total += best;
    }
    Ok(total)
}

/// Which exact optimizer answers a decision query.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolverKind {
    Brute,
    Planar,
}

/// Whether some choice of `k` candidates has cost at most the instance threshold.
pub fn decide(inst: &ClusteringInstance, k: usize, solver: SolverKind) -> Result<bool> {
    let nu = inst.threshold.as_ref().ok_or(Error::MissingThreshold)?;
    let report = match solver {
        SolverKind::Brute => crate::solvers::brute_force_solve(inst, k, &[])?,
        SolverKind::Planar => {
            crate::solvers::exact_planar_solve(inst, k, &[], &crate::solvers::PlanarOptions::default())?
        }
    };
    Ok(compare_radical_sums(&report.cost, nu, DEFAULT_PRECISION_CAP)? != Ordering::Greater)
}

pub fn decide_metric(inst: &MetricInstance, k: usize) -> Result<bool> {
    let report = crate::solvers::brute_force_solve_metric(inst, k)?;
    Ok(report.cost.as_rational().expect("metric costs are rational") <= inst.threshold)
}
