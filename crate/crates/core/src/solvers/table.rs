//! Per-client cost rows with cached integer enclosures, so most comparisons never touch square roots.

use std::cmp::Ordering;
use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::Result;
use crate::geometry::radical::{compare_radical_sums, RadicalSum};
use crate::geometry::rational::{pow, Rational};
use crate::instances::{distance_power, ClusteringInstance, MetricInstance};

/// Precision (in bits) of the cached enclosures.
pub(crate) const ENCLOSURE_BITS: u32 = 64;

/// An exact value plus an integer enclosure `[lo, hi]` of `value * 2^ENCLOSURE_BITS`.
#[derive(Clone, Debug)]
pub(crate) struct Entry {
    pub value: RadicalSum,
    pub lo: BigInt,
    pub hi: BigInt,
}

impl Entry {
    fn new(value: RadicalSum) -> Self {
        let (lo, hi) = value.enclosure(ENCLOSURE_BITS);
        Self { value, lo, hi }
    }

    fn weighted(&self, w: u128) -> Self {
        if w == 1 {
            return self.clone();
        }
        Self { value: self.value.scale_int(w), lo: &self.lo * w, hi: &self.hi * w }
    }
}

pub(crate) struct Row {
    /// Candidates strictly cheaper than the penalty, nearest first (ties by index).
    pub order: Vec<usize>,
    /// Weighted costs aligned with `order`.
    pub costs: Vec<Entry>,
    pub penalty: Option<Entry>,
}

pub(crate) struct CostTable {
    pub rows: Vec<Row>,
    pub n_candidates: usize,
    pub cap: u32,
}

/// An interval-bounded total; the exact value is materialised only when intervals overlap.
#[derive(Clone, Debug)]
pub(crate) struct Bound {
    pub lo: BigInt,
    pub hi: BigInt,
}

impl CostTable {
    pub fn geometric(inst: &ClusteringInstance, cap: u32) -> Result<Self> {
        let power = inst.power();
        let mut cache: HashMap<Rational, Entry> = HashMap::new();
        let mut rows = Vec::with_capacity(inst.clients().len());
        for client in inst.clients() {
            let mut near: Vec<(Rational, usize)> = inst
                .candidates()
                .iter()
                .enumerate()
                .map(|(c, p)| (client.location.squared_distance_unchecked(p), c))
                .collect();
            near.sort();
            let penalty = client.penalty.as_ref().map(|p| Entry::new(p.clone()));
            let mut order = Vec::with_capacity(near.len());
            let mut costs = Vec::with_capacity(near.len());
            for (d2, c) in near {
                if let Some(p) = &client.penalty {
                    if !strictly_below_penalty(&d2, power, p, cap)? {
                        break;
                    }
                }
                let entry = match cache.get(&d2) {
                    Some(e) => e.clone(),
                    None => {
                        let e = Entry::new(distance_power(&d2, power)?);
                        cache.insert(d2, e.clone());
                        e
                    }
                };
                order.push(c);
                costs.push(entry.weighted(client.weight));
            }
            rows.push(Row { order, costs, penalty: penalty.map(|p| p.weighted(client.weight)) });
        }
        Ok(Self { rows, n_candidates: inst.candidates().len(), cap })
    }

    pub fn metric(inst: &MetricInstance, cap: u32) -> Self {
        let rows = (0..inst.clients().len())
            .map(|a| {
                let mut near: Vec<(&Rational, usize)> =
                    (0..inst.candidates().len()).map(|c| (inst.distance(c, a), c)).collect();
                near.sort();
                Row {
                    order: near.iter().map(|&(_, c)| c).collect(),
                    costs: near.iter().map(|&(d, _)| Entry::new(RadicalSum::from_rational(d.clone()))).collect(),
                    penalty: None,
                }
            })
            .collect();
        Self { rows, n_candidates: inst.candidates().len(), cap }
    }

    /// The entry paying for client `a` when `open` marks the open centers.
    pub fn client_entry(&self, a: usize, open: &[bool]) -> Option<&Entry> {
        let row = &self.rows[a];
        row.order
            .iter()
            .position(|&c| open[c])
            .map(|i| &row.costs[i])
            .or(row.penalty.as_ref())
    }

    pub fn bound(&self, clients: &[usize], open: &[bool]) -> Option<Bound> {
        let mut lo = BigInt::zero();
        let mut hi = BigInt::zero();
        for &a in clients {
            let e = self.client_entry(a, open)?;
            lo += &e.lo;
            hi += &e.hi;
        }
        Some(Bound { lo, hi })
    }

    pub fn exact(&self, clients: &[usize], open: &[bool]) -> Option<RadicalSum> {
        let mut total = RadicalSum::zero();
        for &a in clients {
            total += &self.client_entry(a, open)?.value;
        }
        Some(total)
    }

    pub fn mask(&self, open: impl IntoIterator<Item = usize>) -> Vec<bool> {
        let mut m = vec![false; self.n_candidates];
        for c in open {
            m[c] = true;
        }
        m
    }

    /// Exact total for an explicit open set.
    pub fn cost_of(&self, clients: &[usize], open: &[usize]) -> Option<RadicalSum> {
        self.exact(clients, &self.mask(open.iter().copied()))
    }
}

fn strictly_below_penalty(d2: &Rational, power: u32, penalty: &RadicalSum, cap: u32) -> Result<bool> {
    if let Some(q) = penalty.as_rational() {
        // d^p < q  <=>  (d^2)^p < q^2 for nonnegative values
        return Ok(pow(d2, power) < &q * &q);
    }
    Ok(compare_radical_sums(&distance_power(d2, power)?, penalty, cap)? == Ordering::Less)
}

/// Orders two totals using their enclosures, falling back to exact comparison on overlap.
pub(crate) fn compare_bounded(
    a: &Bound,
    b: &Bound,
    exact_a: impl FnOnce() -> RadicalSum,
    exact_b: impl FnOnce() -> RadicalSum,
    cap: u32,
) -> Result<Ordering> {
    if a.hi < b.lo {
        return Ok(Ordering::Less);
    }
    if a.lo > b.hi {
        return Ok(Ordering::Greater);
    }
    compare_radical_sums(&exact_a(), &exact_b(), cap)
}

impl std::ops::Add<&Bound> for &Bound {
    type Output = Bound;

    fn add(self, rhs: &Bound) -> Bound {
        Bound { lo: &self.lo + &rhs.lo, hi: &self.hi + &rhs.hi }
    }
}
