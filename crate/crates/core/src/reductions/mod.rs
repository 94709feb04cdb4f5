//! Instance generators that encode Partial Vertex Cover and Grid Tiling Inequality as clustering problems.

mod gridtiling;
mod metric;
mod pvc3d;
mod pvc4d;

use std::collections::BTreeSet;
use std::fmt;

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::geometry::radical::RadicalSum;
use crate::geometry::rational::Rational;
use crate::geometry::Point;
use crate::instances::{radical_to_pairs, ClusteringInstance};

pub use gridtiling::{reduce_gridtiling_2d, reduce_gridtiling_2d_with_cap, GridCertificate, DEFAULT_CLIENT_CAP};
pub use metric::{reduce_pvc_metric, MetricReduction};
pub use pvc3d::{reduce_pvc_3d_penalties, replication_counts, Replication};
pub use pvc4d::{check_perturbed_centers, perturb_center, reduce_pvc_4d, PerturbedCenter};

/// Simple undirected graph on vertices `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    /// Edges are normalised to `(min, max)` and kept in input order.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for (u, v) in edges {
            if u == v {
                return Err(Error::InvalidParameter(format!("self-loop at vertex {}", u + 1)));
            }
            if u >= n || v >= n {
                return Err(Error::InvalidParameter(format!("edge ({}, {}) outside 1..={n}", u + 1, v + 1)));
            }
            let e = (u.min(v), u.max(v));
            if !seen.insert(e) {
                return Err(Error::InvalidParameter(format!("duplicate edge ({}, {})", e.0 + 1, e.1 + 1)));
            }
            out.push(e);
        }
        Ok(Self { n, edges: out })
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let mut seen = vec![false; self.n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            for &(a, b) in &self.edges {
                let w = if a == u { b } else if b == u { a } else { continue };
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Parses the edge-list format: a header `n m`, then `m` lines `i j` with 1-based vertices.
    /// Blank lines and lines starting with `#` are ignored.
    pub fn parse_edge_list(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (hl, header) = lines.next().ok_or_else(|| Error::Parse("empty graph file".into()))?;
        let nums = |line: usize, s: &str| -> Result<(usize, usize)> {
            let parts: Vec<&str> = s.split_whitespace().collect();
            if parts.len() != 2 {
                return Err(Error::Parse(format!("line {line}: expected two integers, got {s:?}")));
            }
            let p = |x: &str| x.parse::<usize>().map_err(|e| Error::Parse(format!("line {line}: {x:?}: {e}")));
            Ok((p(parts[0])?, p(parts[1])?))
        };
        let (n, m) = nums(hl, header)?;
        let mut edges = Vec::with_capacity(m);
        for (line, s) in lines {
            let (u, v) = nums(line, s)?;
            if u == 0 || v == 0 {
                return Err(Error::Parse(format!("line {line}: vertices are numbered from 1")));
            }
            edges.push((u - 1, v - 1));
        }
        if edges.len() != m {
            return Err(Error::Parse(format!("header announces {m} edges, found {}", edges.len())));
        }
        Self::new(n, edges)
    }

    pub fn to_edge_list(&self) -> String {
        let mut out = format!("{} {}\n", self.n, self.edges.len());
        for &(u, v) in &self.edges {
            out.push_str(&format!("{} {}\n", u + 1, v + 1));
        }
        out
    }
}

impl fmt::Display for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={} E={{", self.n)?;
        for (i, (u, v)) in self.edges.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}-{}", u + 1, v + 1)?;
        }
        write!(f, "}}")
    }
}

/// `k x k` cells of allowed 1-based pairs in `[n] x [n]`; `sets[i][j]` is cell `(i+1, j+1)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridTilingInstance {
    pub n: u32,
    pub k: u32,
    pub sets: Vec<Vec<Vec<(u32, u32)>>>,
}

impl GridTilingInstance {
    /// Validates shape and ranges; pairs within a cell are sorted and deduplicated.
    pub fn new(n: u32, k: u32, sets: Vec<Vec<Vec<(u32, u32)>>>) -> Result<Self> {
        if n == 0 || k == 0 {
            return Err(Error::InvalidParameter("grid tiling needs n >= 1 and k >= 1".into()));
        }
        if sets.len() != k as usize || sets.iter().any(|row| row.len() != k as usize) {
            return Err(Error::InvalidParameter(format!("sets must be a {k} x {k} array")));
        }
        let mut sets = sets;
        for (i, row) in sets.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                if cell.is_empty() {
                    return Err(Error::InvalidParameter(format!("set ({}, {}) is empty", i + 1, j + 1)));
                }
                if let Some(&(u, v)) = cell.iter().find(|&&(u, v)| u == 0 || v == 0 || u > n || v > n) {
                    return Err(Error::InvalidParameter(format!(
                        "pair ({u}, {v}) in set ({}, {}) is outside [1, {n}]^2",
                        i + 1,
                        j + 1
                    )));
                }
                cell.sort_unstable();
                cell.dedup();
            }
        }
        Ok(Self { n, k, sets })
    }

    pub fn set(&self, i: usize, j: usize) -> &[(u32, u32)] {
        &self.sets[i][j]
    }

    pub fn parse_json(text: &str) -> Result<Self> {
        let raw: GridTilingInstance = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::new(raw.n, raw.k, raw.sets)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("grid tiling serializes") + "\n"
    }
}

/// Exact intermediate quantities of a vertex-cover reduction for one edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeRecord {
    pub edge: (usize, usize),
    /// Client location: the circumcenter, or its perturbation in four dimensions.
    pub center: Point,
    pub squared_radius: Rational,
    pub multiplicity: u128,
    pub penalty: Option<RadicalSum>,
}

/// The calibration of a vertex-cover reduction, checkable after the fact.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionCertificate {
    pub edges: Vec<EdgeRecord>,
    pub epsilon: Rational,
    /// Upper end of the band `d(c', z*) / r' - 1` is confined to (four dimensions only).
    pub epsilon_high: Option<Rational>,
    pub delta: Rational,
    pub n_q: u128,
    /// Index into `edges` of the largest radius.
    pub q: usize,
    pub mu: RadicalSum,
    /// Largest cost of a yes-instance and smallest cost of a no-instance.
    pub yes_bound: RadicalSum,
    pub no_bound: RadicalSum,
    pub nu: Rational,
    pub k: usize,
    pub s: usize,
}

impl ReductionCertificate {
    /// `mu <= n_e r_e <= (1 + delta) mu` for every edge, compared exactly on squares.
    pub fn check_cost_bounds(&self) -> bool {
        let q = &self.edges[self.q];
        let mu2 = sq_weight(self.n_q) * &q.squared_radius;
        let one_delta = Rational::from_integer(1.into()) + &self.delta;
        let hi2 = &one_delta * &one_delta * &mu2;
        self.edges.iter().all(|e| {
            let c2 = sq_weight(e.multiplicity) * &e.squared_radius;
            mu2 <= c2 && c2 <= hi2
        })
    }
}

fn sq_weight(n: u128) -> Rational {
    let r = Rational::from_integer(n.into());
    &r * &r
}

/// A geometric instance together with its decision parameters.
#[derive(Clone, Debug)]
pub struct GeometricReduction {
    pub instance: ClusteringInstance,
    pub k: usize,
    pub threshold: Rational,
    pub certificate: Option<ReductionCertificate>,
    pub grid: Option<GridCertificate>,
}

/// A rational `q` with `lo < q < hi`, located by refining enclosures of both sums.
/// Returns `(q, l, h)` where `lo <= l < q < h <= hi` are certified endpoints.
pub fn rational_between(lo: &RadicalSum, hi: &RadicalSum, cap_bits: u32) -> Result<(Rational, Rational, Rational)> {
    if crate::geometry::compare_radical_sums(lo, hi, cap_bits)? != std::cmp::Ordering::Less {
        return Err(Error::InvalidParameter("empty interval: lower end is not below upper end".into()));
    }
    let mut bits = crate::geometry::radical::START_PRECISION_BITS;
    loop {
        let (_, l) = lo.bounds(bits);
        let (h, _) = hi.bounds(bits);
        if l < h {
            let mid = (&l + &h) / Rational::from_integer(2.into());
            return Ok((mid, l, h));
        }
        if bits >= cap_bits {
            return Err(Error::Indeterminate { bits });
        }
        bits = (bits * 2).min(cap_bits);
    }
}

pub(crate) fn to_weight(n: &num_bigint::BigInt) -> Result<u128> {
    n.to_u128()
        .ok_or_else(|| Error::InvalidParameter(format!("multiplicity {n} does not fit in 128 bits")))
}

pub(crate) fn rat_str(q: &Rational) -> Value {
    Value::String(q.to_string())
}

pub(crate) fn radical_json(r: &RadicalSum) -> Value {
    json!(radical_to_pairs(r))
}

pub(crate) fn check_pvc_params(g: &Graph, k: usize, s: usize) -> Result<()> {
    if g.edge_count() == 0 {
        return Err(Error::InvalidParameter("graph has no edges".into()));
    }
    if k > g.vertex_count() {
        return Err(Error::InvalidParameter(format!("k = {k} exceeds the {} vertices", g.vertex_count())));
    }
    if s > g.edge_count() {
        return Err(Error::InvalidParameter(format!("s = {s} exceeds the {} edges", g.edge_count())));
    }
    Ok(())
}

pub(crate) fn certificate_meta(name: &str, g: &Graph, cert: &ReductionCertificate) -> Map<String, Value> {
    let mut meta = Map::new();
    meta.insert("reduction".into(), json!(name));
    meta.insert("n".into(), json!(g.vertex_count()));
    meta.insert("m".into(), json!(g.edge_count()));
    meta.insert("edges".into(), json!(g.edges().iter().map(|&(u, v)| [u + 1, v + 1]).collect::<Vec<_>>()));
    meta.insert("s".into(), json!(cert.s));
    meta.insert("epsilon".into(), rat_str(&cert.epsilon));
    if let Some(e) = &cert.epsilon_high {
        meta.insert("epsilon_high".into(), rat_str(e));
    }
    meta.insert("delta".into(), rat_str(&cert.delta));
    meta.insert("n_q".into(), json!(cert.n_q));
    meta.insert("mu".into(), radical_json(&cert.mu));
    meta.insert("yes_bound".into(), radical_json(&cert.yes_bound));
    meta.insert("no_bound".into(), radical_json(&cert.no_bound));
    meta.insert("nu".into(), rat_str(&cert.nu));
    meta.insert(
        "squared_radii".into(),
        json!(cert.edges.iter().map(|e| e.squared_radius.to_string()).collect::<Vec<_>>()),
    );
    meta.insert("multiplicities".into(), json!(cert.edges.iter().map(|e| e.multiplicity).collect::<Vec<_>>()));
    meta
}
