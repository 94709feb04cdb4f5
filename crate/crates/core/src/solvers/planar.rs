//! Exact planar k-clustering by recursing over balanced separating curves.

use std::cmp::Ordering;
use std::collections::{HashMap, HashSet};
use std::sync::mpsc;

use itertools::Itertools;
use rayon::prelude::*;

use super::brute::{brute_over, greedy, Outcome};
use super::curves::{equidistant_points, visit_in_frame, CurveRule, Visit};
use super::perturb::perturb_if_degenerate;
use super::table::CostTable;
use super::SolveReport;
use crate::error::{Error, Result};
use crate::geometry::frame::Frame;
use crate::geometry::polygon::{locate_unchecked, orientation};
use crate::geometry::sphere::circumsphere;
use crate::geometry::radical::DEFAULT_PRECISION_CAP;
use crate::geometry::{Point, Side};
use crate::instances::{ClusteringInstance, Solution};

#[derive(Clone, Debug)]
pub struct PlanarOptions {
    /// Subproblems with at most this many centers are solved by brute force.
    pub base_k: usize,
    pub precision_cap: u32,
    /// Seed for the cocircularity perturbation.
    pub seed: u64,
    /// Worker threads for the top-level curve loop.
    pub jobs: usize,
    pub rule: CurveRule,
}

impl Default for PlanarOptions {
    fn default() -> Self {
        Self { base_k: 2, precision_cap: DEFAULT_PRECISION_CAP, seed: 0, jobs: 1, rule: CurveRule::Any }
    }
}

/// Largest curve length `l` with `l <= sqrt(4.5 k)`, i.e. `2 l^2 <= 9 k`.
pub fn curve_length_bound(k: usize) -> usize {
    let mut l = 0;
    while 2 * (l + 1) * (l + 1) <= 9 * k {
        l += 1;
    }
    l
}

/// Splits `points` into those inside or on the closed simple polygon, and those strictly outside.
pub fn split_by_curve(vertices: &[Point], points: &[Point]) -> (Vec<usize>, Vec<usize>) {
    (0..points.len()).partition(|&i| locate_unchecked(vertices, &points[i]) != Side::Outside)
}

/// A separating curve in global indices: candidate ids and frame vertices.
struct Curve {
    candidates: Vec<usize>,
    vertices: Vec<usize>,
}

struct Ctx<'a> {
    table: CostTable,
    /// Perturbed candidates, then every equidistant point, then the clients.
    frame: Frame,
    client_offset: usize,
    /// Frame index of the equidistant point of each non-collinear candidate triple.
    triple_point: HashMap<(usize, usize, usize), usize>,
    opts: &'a PlanarOptions,
}

type Bits = Box<[u64]>;
type Key = (Bits, Bits, usize, Bits);

fn bits(ids: &[usize]) -> Bits {
    let mut out = vec![0u64; ids.iter().max().map_or(0, |&m| m / 64 + 1)];
    for &i in ids {
        out[i / 64] |= 1 << (i % 64);
    }
    out.into_boxed_slice()
}

#[derive(Default)]
struct State {
    memo: HashMap<Key, Option<Outcome>>,
    nodes: u64,
    curves: u64,
    max_len: usize,
}

impl<'a> Ctx<'a> {
    fn new(inst: &ClusteringInstance, perturbed: &ClusteringInstance, opts: &'a PlanarOptions) -> Result<Self> {
        let geo = perturbed.candidates();
        let points = equidistant_points(geo)?;
        let n = geo.len();
        let index: HashMap<&Point, usize> = points.iter().enumerate().map(|(i, p)| (p, n + i)).collect();
        let mut triple_point = HashMap::new();
        for (a, b, c) in (0..n).tuple_combinations() {
            if orientation(&geo[a], &geo[b], &geo[c]) == Ordering::Equal {
                continue;
            }
            let center = circumsphere(&[geo[a].clone(), geo[b].clone(), geo[c].clone()])?.center;
            triple_point.insert((a, b, c), index[&center]);
        }
        let client_offset = n + points.len();
        let all: Vec<Point> = geo
            .iter()
            .cloned()
            .chain(points)
            .chain(inst.clients().iter().map(|c| c.location.clone()))
            .collect();
        Ok(Self {
            table: CostTable::geometric(inst, opts.precision_cap)?,
            frame: Frame::new(all),
            client_offset,
            triple_point,
            opts,
        })
    }

    /// Streams every curve over `cands` to `f`, stopping at the first error.
    fn for_each_curve(&self, cands: &[usize], k: usize, f: &mut dyn FnMut(Curve) -> Result<()>) -> Result<()> {
        let points: Vec<usize> = cands
            .iter()
            .copied()
            .tuple_combinations()
            .filter_map(|t| self.triple_point.get(&t).copied())
            .sorted()
            .dedup()
            .collect();
        let max_len = curve_length_bound(k).min(k);
        let mut failure = None;
        visit_in_frame(&self.frame, cands, &points, max_len, self.opts.rule, &mut |c| {
            let curve = Curve {
                candidates: c.candidates.iter().map(|&i| cands[i]).collect(),
                vertices: c.vertices.to_vec(),
            };
            let full = curve.candidates.len() == k;
            if let Err(e) = f(curve) {
                failure = Some(e);
                return Visit::Stop;
            }
            // a curve through k centers leaves nothing to place: any one curve per set will do
            if full {
                Visit::NextCandidateSet
            } else {
                Visit::Continue
            }
        });
        failure.map_or(Ok(()), Err)
    }

    fn solve(&self, st: &mut State, cands: Vec<usize>, clients: Vec<usize>, k: usize, forced: Vec<usize>) -> Result<Option<Outcome>> {
        let key = (bits(&cands), bits(&clients), k, bits(&forced));
        if let Some(hit) = st.memo.get(&key) {
            return Ok(hit.clone());
        }
        st.nodes += 1;
        let result = if k <= self.opts.base_k || k >= cands.len() || clients.is_empty() {
            let mut n = 0;
            brute_over(&self.table, &cands, &clients, k, &forced, &mut n)?
        } else {
            let mut best = greedy(&self.table, &cands, &clients, k, &forced)?;
            let mut seen = HashSet::new();
            self.for_each_curve(&cands, k, &mut |curve| {
                let found = self.evaluate_curve(st, &mut seen, &curve, &cands, &clients, k, &forced)?;
                best = pick(best.take(), found, self.opts.precision_cap)?;
                Ok(())
            })?;
            best
        };
        st.memo.insert(key, result.clone());
        Ok(result)
    }

    /// Best combined answer over all splits of the remaining centers across the curve.
    /// Curves inducing a partition already in `seen` are skipped.
    #[allow(clippy::too_many_arguments)]
    fn evaluate_curve(
        &self,
        st: &mut State,
        seen: &mut HashSet<[Bits; 4]>,
        curve: &Curve,
        cands: &[usize],
        clients: &[usize],
        k: usize,
        forced: &[usize],
    ) -> Result<Option<Outcome>> {
        let l = curve.candidates.len();
        st.curves += 1;
        st.max_len = st.max_len.max(l);
        let on_curve = &curve.candidates;
        let forced2: Vec<usize> = forced.iter().chain(on_curve).copied().sorted().collect();
        if l == k {
            let rest = self.solve(st, Vec::new(), clients.to_vec(), 0, forced2)?;
            return Ok(rest.map(|o| Outcome { open: on_curve.iter().copied().sorted().collect(), ..o }));
        }
        let mut c_in = Vec::new();
        let mut c_out = Vec::new();
        for &c in cands.iter().filter(|c| !on_curve.contains(c)) {
            match self.frame.locate(&curve.vertices, c) {
                Side::Inside => c_in.push(c),
                Side::Outside => c_out.push(c),
                Side::On => {
                    c_in.push(c);
                    c_out.push(c);
                }
            }
        }
        let (a_in, a_out): (Vec<usize>, Vec<usize>) = clients
            .iter()
            .partition(|&&a| self.frame.locate(&curve.vertices, self.client_offset + a) != Side::Outside);
        if !seen.insert([bits(&forced2), bits(&c_in), bits(&c_out), bits(&a_in)]) {
            return Ok(None);
        }
        let lo = k.div_ceil(3).saturating_sub(l);
        let hi = (2 * k / 3).min(k - l);
        let mut best: Option<Outcome> = None;
        for k_in in lo..=hi {
            let Some(inner) = self.solve(st, c_in.clone(), a_in.clone(), k_in, forced2.clone())? else {
                continue;
            };
            let Some(outer) = self.solve(st, c_out.clone(), a_out.clone(), k - l - k_in, forced2.clone())? else {
                continue;
            };
            best = pick(best, Some(inner.combine(&outer, on_curve)), self.opts.precision_cap)?;
        }
        Ok(best)
    }
}

/// Best answer over a run of top-level curves; ties go to the earliest curve.
struct Ranked {
    index: u64,
    found: Option<Outcome>,
    nodes: u64,
    curves: u64,
    max_len: usize,
}

impl Ranked {
    fn empty() -> Self {
        Self { index: u64::MAX, found: None, nodes: 0, curves: 0, max_len: 0 }
    }

    fn merge(self, other: Ranked, cap: u32) -> Result<Ranked> {
        let (first, second) = if self.index <= other.index { (self, other) } else { (other, self) };
        let (index, found) = match (first.found, second.found) {
            (None, None) => (u64::MAX, None),
            (Some(a), None) => (first.index, Some(a)),
            (None, Some(b)) => (second.index, Some(b)),
            (Some(a), Some(b)) => {
                if b.cmp(&a, cap)? == Ordering::Less {
                    (second.index, Some(b))
                } else {
                    (first.index, Some(a))
                }
            }
        };
        Ok(Ranked {
            index,
            found,
            nodes: first.nodes + second.nodes,
            curves: first.curves + second.curves,
            max_len: first.max_len.max(second.max_len),
        })
    }
}

/// Keeps `current` unless `found` is strictly cheaper.
fn pick(current: Option<Outcome>, found: Option<Outcome>, cap: u32) -> Result<Option<Outcome>> {
    Ok(match (current, found) {
        (None, f) => f,
        (c, None) => c,
        (Some(c), Some(f)) => {
            if f.cmp(&c, cap)? == Ordering::Less {
                Some(f)
            } else {
                Some(c)
            }
        }
    })
}

/// Exact optimum of a planar instance with `k` centers (plus `forced_open`).
///
/// Curves and in/out tests use the perturbed candidate positions when the candidates are
/// degenerate; all costs are evaluated on the original coordinates.
pub fn exact_planar_solve(
    inst: &ClusteringInstance,
    k: usize,
    forced_open: &[usize],
    opts: &PlanarOptions,
) -> Result<SolveReport> {
    if inst.dimension() != 2 {
        return Err(Error::Dimension { got: inst.dimension(), expected: "2".into() });
    }
    let n = inst.candidates().len();
    if k > n {
        return Err(Error::InvalidParameter(format!("k = {k} exceeds the {n} candidates")));
    }
    inst.check_indices(forced_open)?;
    let (perturbed, _) = perturb_if_degenerate(inst, opts.seed)?;
    let ctx = Ctx::new(inst, &perturbed, opts)?;
    let forced: Vec<usize> = forced_open.iter().copied().sorted().dedup().collect();
    let cands: Vec<usize> = (0..n).filter(|c| !forced.contains(c)).collect();
    let clients: Vec<usize> = (0..inst.clients().len()).collect();

    let mut st = State::default();
    let recursive = k > opts.base_k && k < cands.len() && !clients.is_empty();
    let outcome = if recursive && opts.jobs > 1 {
        st.nodes += 1;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(opts.jobs)
            .build()
            .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
        let cap = opts.precision_cap;
        let (tx, rx) = mpsc::sync_channel::<(u64, Curve)>(4 * opts.jobs);
        let merged = std::thread::scope(|scope| {
            let ctx = &ctx;
            let cands = &cands;
            let producer = scope.spawn(move || {
                let mut index = 0;
                ctx.for_each_curve(cands, k, &mut |curve| {
                    index += 1;
                    // the receiver only hangs up after an error, which is reported from its side
                    tx.send((index, curve)).map_err(|_| Error::InvalidParameter("curve consumer stopped".into()))
                })
            });
            let merged = pool.install(|| {
                rx.into_iter()
                    .par_bridge()
                    .map(|(index, curve)| {
                        let mut local = State::default();
                        let found = ctx.evaluate_curve(&mut local, &mut HashSet::new(), &curve, cands, &clients, k, &forced)?;
                        Ok(Ranked { index, found, nodes: local.nodes, curves: local.curves, max_len: local.max_len })
                    })
                    .try_reduce(Ranked::empty, |a, b| a.merge(b, cap))
            });
            let produced = producer.join().expect("curve producer panicked");
            merged.and_then(|m| produced.map(|_| m))
        })?;
        st.nodes += merged.nodes;
        st.curves += merged.curves;
        st.max_len = st.max_len.max(merged.max_len);
        // the greedy fallback ranks before every curve
        let greedy = greedy(&ctx.table, &cands, &clients, k, &forced)?;
        pick(greedy, merged.found, opts.precision_cap)?
    } else {
        ctx.solve(&mut st, cands.clone(), clients.clone(), k, forced.clone())?
    };
    let Some(outcome) = outcome else {
        let all = vec![true; n];
        let client = clients.iter().copied().find(|&a| ctx.table.client_entry(a, &all).is_none()).unwrap_or(0);
        return Err(Error::Unservable { client });
    };
    // open exactly k free centers; extra centers never raise the cost
    let mut open = outcome.open.clone();
    for &c in &cands {
        if open.len() >= k {
            break;
        }
        if !open.contains(&c) {
            open.push(c);
        }
    }
    let solution = Solution::new(open.into_iter().chain(forced.iter().copied()));
    let cost = ctx.table.cost_of(&clients, &solution.open).ok_or(Error::Unservable { client: 0 })?;
    Ok(SolveReport {
        solution,
        cost,
        nodes_explored: st.nodes,
        curves_enumerated: st.curves,
        max_curve_len: st.max_len,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::Client;
    use crate::solvers::brute_force_solve;

    fn pt(x: i64, y: i64) -> Point {
        Point::from_ints(&[x, y]).unwrap()
    }

    #[test]
    fn curve_length_bounds() {
        assert_eq!(curve_length_bound(1), 2);
        assert_eq!(curve_length_bound(2), 3);
        assert_eq!(curve_length_bound(3), 3);
        assert_eq!(curve_length_bound(4), 4);
        assert_eq!(curve_length_bound(8), 6);
    }

    #[test]
    fn base_case_matches_brute_force() {
        let inst = ClusteringInstance::new(
            2,
            1,
            vec![pt(0, 0), pt(4, 0), pt(2, 0)],
            vec![Client::unit(pt(0, 0)), Client::unit(pt(4, 0))],
        )
        .unwrap();
        let a = exact_planar_solve(&inst, 1, &[], &PlanarOptions::default()).unwrap();
        let b = brute_force_solve(&inst, 1, &[]).unwrap();
        assert_eq!(a.cost, b.cost);
        assert_eq!(a.solution, b.solution);
    }

    #[test]
    fn recursion_runs_for_k_three() {
        let cands = vec![pt(0, 0), pt(10, 1), pt(3, 9), pt(12, 11), pt(6, 5), pt(1, 14)];
        let clients = [(1, 1), (9, 2), (4, 8), (11, 10), (6, 6), (2, 13), (7, 3)]
            .iter()
            .map(|&(x, y)| Client::unit(pt(x, y)))
            .collect();
        let inst = ClusteringInstance::new(2, 2, cands, clients).unwrap();
        let a = exact_planar_solve(&inst, 3, &[], &PlanarOptions::default()).unwrap();
        let b = brute_force_solve(&inst, 3, &[]).unwrap();
        assert_eq!(a.cost, b.cost);
        assert!(a.curves_enumerated > 0);
        assert!(a.max_curve_len <= curve_length_bound(3));
        assert_eq!(a.solution.open.len(), 3);
    }

    #[test]
    fn non_planar_input_rejected() {
        let inst = ClusteringInstance::new(
            3,
            1,
            vec![Point::from_ints(&[0, 0, 0]).unwrap()],
            vec![Client::unit(Point::from_ints(&[1, 0, 0]).unwrap())],
        )
        .unwrap();
        assert!(matches!(
            exact_planar_solve(&inst, 1, &[], &PlanarOptions::default()),
            Err(Error::Dimension { .. })
        ));
    }
}
