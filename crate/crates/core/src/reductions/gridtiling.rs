//! Grid Tiling Inequality as planar k-median with unit penalties.
//!
//! Clients sit on a square lattice of spacing `h = 1/(2 n^3)`, half the candidate offset step
//! `1/n^3`. All arithmetic on positions is done in lattice units, where a unit disk has radius
//! `R = 2 n^3` and every candidate is a lattice point.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::One;
use serde_json::{json, Map};

use super::{radical_json, rat_str, rational_between, GeometricReduction, GridTilingInstance};
use crate::error::{Error, Result};
use crate::geometry::radical::{compare_radical_sums, RadicalSum, DEFAULT_PRECISION_CAP};
use crate::geometry::rational::Rational;
use crate::geometry::Point;
use crate::instances::{Client, ClusteringInstance};

/// Largest client count generated unless a different cap is passed.
pub const DEFAULT_CLIENT_CAP: u64 = 250_000;
/// Rough heap footprint of one client with its cost-table row.
const BYTES_PER_CLIENT: u64 = 512;

/// Exact quantities behind the threshold of a grid-tiling reduction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridCertificate {
    /// Candidate offset step `1/n^3`.
    pub epsilon: Rational,
    /// Client spacing.
    pub spacing: Rational,
    pub clients_per_side: u64,
    /// `sum (1 - d)` over clients strictly inside one unit disk around a candidate.
    pub disk_gain: RadicalSum,
    /// Cost of any solution whose unit disks are pairwise disjoint.
    pub disjoint_cost: RadicalSum,
    /// Smallest extra cost caused by one overlapping pair, if any pair of candidates can overlap.
    pub min_overlap_loss: Option<RadicalSum>,
    /// Lower bound on the cost of every solution with overlapping disks.
    pub overlap_cost: RadicalSum,
    pub nu: Rational,
    /// Certified rational endpoints with `disjoint_cost <= nu_low < nu < nu_high <= overlap_cost`.
    pub nu_low: Rational,
    pub nu_high: Rational,
    /// Candidate labels `(i, j, u, v)`, 1-based, in candidate order.
    pub labels: Vec<(u32, u32, u32, u32)>,
}

/// Lattice points strictly inside the disk of squared radius `r2` around the origin, grouped by squared norm.
fn disk_norms(r: i64) -> BTreeMap<i64, u64> {
    let mut out = BTreeMap::new();
    for x in -r..=r {
        for y in -r..=r {
            let q = x * x + y * y;
            if q < r * r {
                *out.entry(q).or_insert(0) += 1;
            }
        }
    }
    out
}

/// `sum count * (1 - h sqrt(q))`.
fn gain(norms: &BTreeMap<i64, u64>, h: &Rational) -> Result<RadicalSum> {
    let mut total = RadicalSum::zero();
    let mut count = 0u64;
    for (&q, &c) in norms {
        count += c;
        let coeff = -(h * Rational::from_integer(BigInt::from(c)));
        total += &RadicalSum::scaled_sqrt(&coeff, &Rational::from_integer(BigInt::from(q)))?;
    }
    Ok(total + RadicalSum::from_int(count as i64))
}

/// Cost lost when disks around the origin and around `o` both open: for each lattice point inside
/// both, only the nearer center's gain counts, so the farther one's `1 - h d` is lost.
fn overlap_loss(r: i64, o: (i64, i64), h: &Rational) -> Result<RadicalSum> {
    let mut norms = BTreeMap::new();
    for x in -r..=r {
        for y in -r..=r {
            let q1 = x * x + y * y;
            let (dx, dy) = (x - o.0, y - o.1);
            let q2 = dx * dx + dy * dy;
            if q1 < r * r && q2 < r * r {
                *norms.entry(q1.max(q2)).or_insert(0) += 1;
            }
        }
    }
    gain(&norms, h)
}

pub fn reduce_gridtiling_2d(gt: &GridTilingInstance) -> Result<GeometricReduction> {
    reduce_gridtiling_2d_with_cap(gt, DEFAULT_CLIENT_CAP)
}

/// Builds the instance with `k^2` centers to open; fails with [`Error::TooLarge`] above `client_cap` clients.
pub fn reduce_gridtiling_2d_with_cap(gt: &GridTilingInstance, client_cap: u64) -> Result<GeometricReduction> {
    let gt = GridTilingInstance::new(gt.n, gt.k, gt.sets.clone())?;
    let n = gt.n as i64;
    let k = gt.k as i64;
    let n3 = n
        .checked_pow(3)
        .ok_or_else(|| Error::InvalidParameter(format!("n = {n} is too large")))?;
    let r = 2 * n3;
    // side length 2k + eps(n-1) in lattice units, inclusive of both ends
    let per_side = (2 * k * r + 2 * (n - 1) + 1) as u64;
    let clients = per_side.saturating_mul(per_side);
    if clients > client_cap {
        return Err(Error::TooLarge { clients, cap: client_cap, bytes: clients.saturating_mul(BYTES_PER_CLIENT) });
    }
    let epsilon = Rational::new(BigInt::one(), BigInt::from(n3));
    let h = Rational::new(BigInt::one(), BigInt::from(r));

    let mut lattice = Vec::new();
    let mut labels = Vec::new();
    for i in 1..=gt.k {
        for j in 1..=gt.k {
            for &(u, v) in gt.set(i as usize - 1, j as usize - 1) {
                lattice.push(((2 * i as i64 - 1) * r + 2 * (u as i64 - 1), (2 * j as i64 - 1) * r + 2 * (v as i64 - 1)));
                labels.push((i, j, u, v));
            }
        }
    }

    let top = per_side as i64 - 1;
    for (c, &(x, y)) in lattice.iter().enumerate() {
        if x - r < 0 || y - r < 0 || x + r > top || y + r > top {
            return Err(Error::InvalidParameter(format!("unit disk around candidate {c} leaves the client square")));
        }
    }
    let mut offsets = BTreeSet::new();
    for a in 0..lattice.len() {
        for b in a + 1..lattice.len() {
            let (dx, dy) = ((lattice[a].0 - lattice[b].0).abs(), (lattice[a].1 - lattice[b].1).abs());
            let (la, lb) = (labels[a], labels[b]);
            let cell_gap = la.0.abs_diff(lb.0) + la.1.abs_diff(lb.1);
            let d2 = dx * dx + dy * dy;
            if cell_gap >= 2 && d2 < 4 * r * r {
                return Err(Error::InvalidParameter(format!("candidates {a} and {b} from non-adjacent cells are closer than 2")));
            }
            if d2 < 4 * r * r {
                offsets.insert((dx.min(dy), dx.max(dy)));
            }
        }
    }

    let disk_gain = gain(&disk_norms(r), &h)?;
    let total = RadicalSum::from_int(clients as i64);
    let disjoint_cost = &total - &disk_gain.scale(&Rational::from_integer(BigInt::from(k * k)));
    let mut min_loss: Option<RadicalSum> = None;
    for &o in &offsets {
        let loss = overlap_loss(r, o, &h)?;
        if loss.signum(DEFAULT_PRECISION_CAP)? != std::cmp::Ordering::Greater {
            return Err(Error::InvalidParameter(format!("overlap at lattice offset {o:?} costs nothing")));
        }
        let smaller = match &min_loss {
            None => true,
            Some(m) => compare_radical_sums(&loss, m, DEFAULT_PRECISION_CAP)? == std::cmp::Ordering::Less,
        };
        if smaller {
            min_loss = Some(loss);
        }
    }
    let overlap_cost = &disjoint_cost + min_loss.as_ref().unwrap_or(&RadicalSum::from_int(1));
    let (nu, nu_low, nu_high) = rational_between(&disjoint_cost, &overlap_cost, DEFAULT_PRECISION_CAP)?;

    let unit = RadicalSum::from_int(1);
    let mut client_list = Vec::with_capacity(clients as usize);
    for a in 0..per_side as i64 {
        for b in 0..per_side as i64 {
            let p = Point::xy(&h * Rational::from_integer(a.into()), &h * Rational::from_integer(b.into()));
            client_list.push(Client::new(p, 1, Some(unit.clone()))?);
        }
    }
    let candidates: Vec<Point> = lattice
        .iter()
        .map(|&(x, y)| Point::xy(&h * Rational::from_integer(x.into()), &h * Rational::from_integer(y.into())))
        .collect();

    let k2 = (k * k) as usize;
    let mut meta = Map::new();
    meta.insert("reduction".into(), json!("gridtiling"));
    meta.insert("n".into(), json!(gt.n));
    meta.insert("source_k".into(), json!(gt.k));
    meta.insert("k".into(), json!(k2));
    meta.insert("sets".into(), serde_json::to_value(&gt.sets).expect("sets serialize"));
    meta.insert("epsilon".into(), rat_str(&epsilon));
    meta.insert("spacing".into(), rat_str(&h));
    meta.insert("clients_per_side".into(), json!(per_side));
    meta.insert("disjoint_cost".into(), radical_json(&disjoint_cost));
    meta.insert("overlap_cost".into(), radical_json(&overlap_cost));
    meta.insert("nu_low".into(), rat_str(&nu_low));
    meta.insert("nu_high".into(), rat_str(&nu_high));
    meta.insert("nu".into(), rat_str(&nu));
    meta.insert("labels".into(), json!(labels.iter().map(|l| [l.0, l.1, l.2, l.3]).collect::<Vec<_>>()));
    let instance = ClusteringInstance::new(2, 1, candidates, client_list)?
        .with_threshold(RadicalSum::from_rational(nu.clone()))
        .with_meta(meta);
    let grid = GridCertificate {
        epsilon,
        spacing: h,
        clients_per_side: per_side,
        disk_gain,
        disjoint_cost,
        min_overlap_loss: min_loss,
        overlap_cost,
        nu: nu.clone(),
        nu_low,
        nu_high,
        labels,
    };
    Ok(GeometricReduction { instance, k: k2, threshold: nu, certificate: None, grid: Some(grid) })
}

impl GridCertificate {
    /// `disjoint_cost < nu < overlap_cost`, decided exactly.
    pub fn separates(&self) -> Result<bool> {
        let nu = RadicalSum::from_rational(self.nu.clone());
        Ok(compare_radical_sums(&self.disjoint_cost, &nu, DEFAULT_PRECISION_CAP)? == std::cmp::Ordering::Less
            && compare_radical_sums(&nu, &self.overlap_cost, DEFAULT_PRECISION_CAP)? == std::cmp::Ordering::Less
            && self.nu_low < self.nu
            && self.nu < self.nu_high
            && !self.disk_gain.is_zero())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{solution_cost, Solution};

    fn gt(n: u32, k: u32, sets: Vec<Vec<Vec<(u32, u32)>>>) -> GridTilingInstance {
        GridTilingInstance::new(n, k, sets).unwrap()
    }

    #[test]
    fn client_count_and_spacing() {
        let r = reduce_gridtiling_2d(&gt(2, 1, vec![vec![vec![(1, 1)]]])).unwrap();
        let g = r.grid.unwrap();
        assert_eq!(g.clients_per_side, 4 * 8 + 3);
        assert_eq!(r.instance.clients().len() as u64, 35 * 35);
        assert_eq!(g.spacing, Rational::new(1.into(), 16.into()));
        assert_eq!(r.k, 1);
        assert_eq!(r.instance.candidates()[0], Point::from_ints(&[1, 1]).unwrap());
        assert!(g.separates().unwrap());
    }

    #[test]
    fn disjoint_cost_matches_direct_evaluation() {
        let inst = gt(2, 2, vec![vec![vec![(1, 1)], vec![(1, 1)]], vec![vec![(1, 1)], vec![(1, 1)]]]);
        let r = reduce_gridtiling_2d(&inst).unwrap();
        let cost = solution_cost(&r.instance, &Solution::new(0..4), &[]).unwrap();
        let g = r.grid.unwrap();
        assert_eq!(cost, g.disjoint_cost);
        assert!(g.min_overlap_loss.is_none());
        assert!(g.separates().unwrap());
    }

    #[test]
    fn overlapping_pair_costs_at_least_the_bound() {
        let inst = gt(2, 2, vec![vec![vec![(2, 2)], vec![(1, 1)]], vec![vec![(1, 1)], vec![(1, 1)]]]);
        let r = reduce_gridtiling_2d(&inst).unwrap();
        let g = r.grid.clone().unwrap();
        assert!(g.min_overlap_loss.is_some());
        let cost = solution_cost(&r.instance, &Solution::new(0..4), &[]).unwrap();
        // two lenses of the same shape, one per neighbour of the moved center
        let twice = &g.overlap_cost + g.min_overlap_loss.as_ref().unwrap();
        assert_eq!(compare_radical_sums(&cost, &twice, 4096).unwrap(), std::cmp::Ordering::Equal);
        assert!(g.separates().unwrap());
    }

    #[test]
    fn trivial_side_works() {
        let r = reduce_gridtiling_2d(&gt(1, 2, vec![vec![vec![(1, 1)]; 2]; 2])).unwrap();
        assert_eq!(r.grid.unwrap().clients_per_side, 9);
    }

    #[test]
    fn cap_reports_size() {
        let inst = gt(3, 2, vec![vec![vec![(1, 1)]; 2]; 2]);
        match reduce_gridtiling_2d_with_cap(&inst, 1000) {
            Err(Error::TooLarge { clients, cap, bytes }) => {
                assert_eq!(clients, 221 * 221);
                assert_eq!(cap, 1000);
                assert!(bytes > clients);
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
