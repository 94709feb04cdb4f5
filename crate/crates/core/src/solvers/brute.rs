//! Exhaustive search over candidate subsets, and the greedy fallback used by the planar recursion.

use std::cmp::Ordering;

use itertools::Itertools;

use super::table::{compare_bounded, Bound, CostTable};
use super::SolveReport;
use crate::error::{Error, Result};
use crate::geometry::radical::{compare_radical_sums, RadicalSum, DEFAULT_PRECISION_CAP};
use crate::instances::{ClusteringInstance, MetricInstance, Solution};

/// A subproblem answer: the centers opened beyond the forced ones, and the exact cost they achieve.
#[derive(Clone, Debug)]
pub(crate) struct Outcome {
    pub open: Vec<usize>,
    pub cost: RadicalSum,
    pub bound: Bound,
}

impl Outcome {
    pub fn new(open: Vec<usize>, cost: RadicalSum) -> Self {
        let (lo, hi) = cost.enclosure(super::table::ENCLOSURE_BITS);
        Self { open, cost, bound: Bound { lo, hi } }
    }

    pub fn cmp(&self, other: &Outcome, cap: u32) -> Result<Ordering> {
        if self.bound.hi < other.bound.lo {
            return Ok(Ordering::Less);
        }
        if self.bound.lo > other.bound.hi {
            return Ok(Ordering::Greater);
        }
        compare_radical_sums(&self.cost, &other.cost, cap)
    }

    /// Union of two disjoint-client answers; costs add.
    pub fn combine(&self, other: &Outcome, extra: &[usize]) -> Outcome {
        let open = self.open.iter().chain(&other.open).chain(extra).copied().sorted().dedup().collect();
        Outcome { open, cost: &self.cost + &other.cost, bound: &self.bound + &other.bound }
    }
}

/// Splits `clients` into those whose cost is fixed by the forced centers and those a free candidate can improve.
fn split_clients(table: &CostTable, clients: &[usize], free: &[bool], forced: &[bool]) -> (Vec<usize>, Vec<usize>) {
    let mut fixed = Vec::new();
    let mut active = Vec::new();
    for &a in clients {
        let first = table.rows[a].order.iter().find(|&&c| free[c] || forced[c]);
        match first {
            Some(&c) if free[c] => active.push(a),
            _ => fixed.push(a),
        }
    }
    (fixed, active)
}

/// Minimum-cost choice of `min(k, |free|)` candidates from `cands` (excluding forced ones),
/// with `forced` always open. Ties go to the lexicographically smallest index set.
/// Returns `None` when every choice leaves some client unservable.
pub(crate) fn brute_over(
    table: &CostTable,
    cands: &[usize],
    clients: &[usize],
    k: usize,
    forced: &[usize],
    nodes: &mut u64,
) -> Result<Option<Outcome>> {
    let forced_mask = table.mask(forced.iter().copied());
    let free: Vec<usize> = cands.iter().copied().filter(|&c| !forced_mask[c]).sorted().dedup().collect();
    let free_mask = table.mask(free.iter().copied());
    let size = k.min(free.len());
    let (fixed, active) = split_clients(table, clients, &free_mask, &forced_mask);

    if table.bound(&fixed, &forced_mask).is_none() {
        return Ok(None);
    }
    let mut mask = forced_mask.clone();
    let mut best: Option<(Vec<usize>, Bound, Option<RadicalSum>)> = None;
    for subset in free.iter().copied().combinations(size) {
        *nodes += 1;
        for &c in &subset {
            mask[c] = true;
        }
        let bound = table.bound(&active, &mask);
        for &c in &subset {
            mask[c] = false;
        }
        let Some(bound) = bound else { continue };
        let better = match &mut best {
            None => true,
            Some((best_set, best_bound, best_exact)) => {
                let exact_of = |set: &[usize]| {
                    let m = table.mask(forced.iter().chain(set).copied());
                    table.exact(&active, &m).expect("feasible subset")
                };
                let best_value = best_exact.get_or_insert_with(|| exact_of(best_set)).clone();
                compare_bounded(&bound, best_bound, || exact_of(&subset), || best_value, table.cap)?
                    == Ordering::Less
            }
        };
        if better {
            best = Some((subset, bound, None));
        }
    }
    let Some((set, _, _)) = best else { return Ok(None) };
    let open_mask = table.mask(forced.iter().chain(&set).copied());
    let cost = table.exact(&fixed, &forced_mask).expect("fixed part is feasible")
        + table.exact(&active, &open_mask).expect("best subset is feasible");
    Ok(Some(Outcome::new(set, cost)))
}

/// Opens candidates one at a time, each time the one lowering the cost most (lowest index on ties).
pub(crate) fn greedy(
    table: &CostTable,
    cands: &[usize],
    clients: &[usize],
    k: usize,
    forced: &[usize],
) -> Result<Option<Outcome>> {
    let mut mask = table.mask(forced.iter().copied());
    let free: Vec<usize> = cands.iter().copied().filter(|&c| !mask[c]).sorted().dedup().collect();
    let mut chosen: Vec<usize> = Vec::new();
    for _ in 0..k.min(free.len()) {
        let mut best: Option<(usize, Bound)> = None;
        for &c in &free {
            if mask[c] {
                continue;
            }
            mask[c] = true;
            let bound = table.bound(clients, &mask);
            mask[c] = false;
            let Some(bound) = bound else { continue };
            let better = match &best {
                None => true,
                Some((b, bb)) => {
                    let exact_with = |x: usize| {
                        let mut m = mask.clone();
                        m[x] = true;
                        table.exact(clients, &m).expect("feasible")
                    };
                    compare_bounded(&bound, bb, || exact_with(c), || exact_with(*b), table.cap)?
                        == Ordering::Less
                }
            };
            if better {
                best = Some((c, bound));
            }
        }
        let pick = match best {
            Some((c, _)) => c,
            None => *free.iter().find(|&&c| !mask[c]).expect("free candidate left"),
        };
        mask[pick] = true;
        chosen.push(pick);
    }
    chosen.sort_unstable();
    Ok(table.exact(clients, &mask).map(|cost| Outcome::new(chosen, cost)))
}

fn first_unservable(table: &CostTable, clients: &[usize]) -> usize {
    let all = vec![true; table.n_candidates];
    clients.iter().copied().find(|&a| table.client_entry(a, &all).is_none()).unwrap_or(0)
}

pub(crate) fn report_from(outcome: Outcome, forced: &[usize], nodes: u64) -> SolveReport {
    SolveReport {
        solution: Solution::new(outcome.open.into_iter().chain(forced.iter().copied())),
        cost: outcome.cost,
        nodes_explored: nodes,
        curves_enumerated: 0,
        max_curve_len: 0,
    }
}

/// Exhaustive optimum over all `k`-subsets of candidates, with `forced_open` always open.
pub fn brute_force_solve(inst: &ClusteringInstance, k: usize, forced_open: &[usize]) -> Result<SolveReport> {
    brute_force_solve_with_cap(inst, k, forced_open, DEFAULT_PRECISION_CAP)
}

pub fn brute_force_solve_with_cap(
    inst: &ClusteringInstance,
    k: usize,
    forced_open: &[usize],
    cap: u32,
) -> Result<SolveReport> {
    let n = inst.candidates().len();
    if k > n {
        return Err(Error::InvalidParameter(format!("k = {k} exceeds the {n} candidates")));
    }
    inst.check_indices(forced_open)?;
    let table = CostTable::geometric(inst, cap)?;
    let cands: Vec<usize> = (0..n).collect();
    let clients: Vec<usize> = (0..inst.clients().len()).collect();
    let mut nodes = 0;
    match brute_over(&table, &cands, &clients, k, forced_open, &mut nodes)? {
        Some(o) => Ok(report_from(o, forced_open, nodes)),
        None => Err(Error::Unservable { client: first_unservable(&table, &clients) }),
    }
}

pub fn brute_force_solve_metric(inst: &MetricInstance, k: usize) -> Result<SolveReport> {
    let n = inst.candidates().len();
    if k > n {
        return Err(Error::InvalidParameter(format!("k = {k} exceeds the {n} candidates")));
    }
    if k == 0 && !inst.clients().is_empty() {
        return Err(Error::Unservable { client: 0 });
    }
    let table = CostTable::metric(inst, DEFAULT_PRECISION_CAP);
    let cands: Vec<usize> = (0..n).collect();
    let clients: Vec<usize> = (0..inst.clients().len()).collect();
    let mut nodes = 0;
    let o = brute_over(&table, &cands, &clients, k, &[], &mut nodes)?
        .ok_or(Error::Unservable { client: 0 })?;
    Ok(report_from(o, &[], nodes))
}
