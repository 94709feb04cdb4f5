//! Agreement between the source oracles and brute-force decisions on reduced instances.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::families::{nonisomorphic_graphs, random_graph, random_grid, singleton_grids};
use super::source::{solve_gridtiling_inequality, solve_pvc};
use super::{CaseResult, VerificationReport};
use crate::error::{Error, Result};
use crate::geometry::radical::{compare_radical_sums, DEFAULT_PRECISION_CAP};
use crate::instances::{decide, decide_metric, SolverKind};
use crate::reductions::{
    check_perturbed_centers, reduce_gridtiling_2d, reduce_pvc_3d_penalties, reduce_pvc_4d, reduce_pvc_metric, Graph,
    GridTilingInstance,
};
use crate::solvers::brute_force_solve;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReductionKind {
    Metric,
    Pvc3d,
    Pvc4d,
    GridTiling,
}

impl fmt::Display for ReductionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ReductionKind::Metric => "metric",
            ReductionKind::Pvc3d => "pvc3d",
            ReductionKind::Pvc4d => "pvc4d",
            ReductionKind::GridTiling => "gridtiling",
        })
    }
}

impl FromStr for ReductionKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "metric" => Ok(ReductionKind::Metric),
            "pvc3d" => Ok(ReductionKind::Pvc3d),
            "pvc4d" => Ok(ReductionKind::Pvc4d),
            "gridtiling" => Ok(ReductionKind::GridTiling),
            _ => Err(Error::InvalidParameter(format!("unknown reduction {s:?}"))),
        }
    }
}

/// A generator of verification cases. Graph families expand to every `k <= max_k` (and `k <= n`)
/// and every `s` from 0 to the edge count.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CaseFamily {
    /// One graph per isomorphism class on 2 to `max_vertices` vertices, with at least one edge.
    AllGraphs { max_vertices: usize, connected: bool, max_k: usize },
    RandomGraphs { count: usize, vertices: usize, max_k: usize, seed: u64 },
    /// Every instance whose cells each hold a single pair.
    GridSingletons { n: u32, k: u32 },
    /// Cells of 1 to `max_set` random pairs.
    GridRandom { count: usize, n: u32, k: u32, max_set: usize, seed: u64 },
}

/// The families the default verification runs use for each reduction.
pub fn default_families(kind: ReductionKind) -> Vec<CaseFamily> {
    match kind {
        ReductionKind::Metric => vec![CaseFamily::AllGraphs { max_vertices: 5, connected: true, max_k: 2 }],
        ReductionKind::Pvc3d => vec![
            CaseFamily::AllGraphs { max_vertices: 5, connected: false, max_k: 3 },
            CaseFamily::RandomGraphs { count: 50, vertices: 6, max_k: 3, seed: 1 },
        ],
        ReductionKind::Pvc4d => vec![CaseFamily::AllGraphs { max_vertices: 5, connected: false, max_k: 2 }],
        ReductionKind::GridTiling => vec![
            CaseFamily::GridSingletons { n: 2, k: 2 },
            CaseFamily::GridRandom { count: 20, n: 3, k: 2, max_set: 3, seed: 1 },
        ],
    }
}

#[derive(Clone, Debug)]
enum Case {
    Pvc { g: Graph, k: usize, s: usize },
    Grid(GridTilingInstance),
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Case::Pvc { g, k, s } => write!(f, "{g} k={k} s={s}"),
            Case::Grid(gt) => write!(f, "{}", gt.to_json().trim_end()),
        }
    }
}

fn pvc_cases(graphs: Vec<Graph>, max_k: usize) -> Vec<Case> {
    let mut out = Vec::new();
    for g in graphs {
        for k in 1..=max_k.min(g.vertex_count()) {
            for s in 0..=g.edge_count() {
                out.push(Case::Pvc { g: g.clone(), k, s });
            }
        }
    }
    out
}

fn expand(kind: ReductionKind, family: &CaseFamily) -> Result<Vec<Case>> {
    let grid_kind = kind == ReductionKind::GridTiling;
    match (family, grid_kind) {
        (CaseFamily::AllGraphs { max_vertices, connected, max_k }, false) => {
            let graphs = (2..=*max_vertices)
                .flat_map(nonisomorphic_graphs)
                .filter(|g| !connected || g.is_connected())
                .collect();
            Ok(pvc_cases(graphs, *max_k))
        }
        (CaseFamily::RandomGraphs { count, vertices, max_k, seed }, false) => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let graphs = (0..*count)
                .map(|_| random_graph(*vertices, &mut rng))
                .filter(|g| kind != ReductionKind::Metric || g.is_connected())
                .collect();
            Ok(pvc_cases(graphs, *max_k))
        }
        (CaseFamily::GridSingletons { n, k }, true) => Ok(singleton_grids(*n, *k).into_iter().map(Case::Grid).collect()),
        (CaseFamily::GridRandom { count, n, k, max_set, seed }, true) => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            Ok((0..*count).map(|_| Case::Grid(random_grid(*n, *k, *max_set, &mut rng))).collect())
        }
        _ => Err(Error::InvalidParameter(format!("family {family:?} does not apply to the {kind} reduction"))),
    }
}

fn yes_no(b: bool) -> String {
    if b { "yes" } else { "no" }.into()
}

/// Runs one case, returning its result and the extra checks it made.
fn run_case(kind: ReductionKind, case: &Case) -> Result<(CaseResult, VerificationReport)> {
    let mut checks = VerificationReport::new(kind.to_string());
    let label = case.to_string();
    let (source, reduced) = match (kind, case) {
        (ReductionKind::Metric, Case::Pvc { g, k, s }) => {
            let r = reduce_pvc_metric(g, *k, *s)?;
            (solve_pvc(g, *k, *s)?, decide_metric(&r.instance, r.k)?)
        }
        (ReductionKind::Pvc3d, Case::Pvc { g, k, s }) => {
            let r = reduce_pvc_3d_penalties(g, *k, *s)?;
            let cert = r.certificate.as_ref().expect("vertex-cover reductions carry a certificate");
            checks.samples += 1;
            if !cert.check_cost_bounds() {
                checks.violation(format!("{label}: multiplicity bounds fail"));
            }
            (solve_pvc(g, *k, *s)?, decide(&r.instance, r.k, SolverKind::Brute)?)
        }
        (ReductionKind::Pvc4d, Case::Pvc { g, k, s }) => {
            let r = reduce_pvc_4d(g, *k, *s)?;
            let cert = r.certificate.as_ref().expect("vertex-cover reductions carry a certificate");
            checks.samples += 2;
            if !cert.check_cost_bounds() {
                checks.violation(format!("{label}: multiplicity bounds fail"));
            }
            if !check_perturbed_centers(cert, r.instance.candidates()) {
                checks.violation(format!("{label}: a perturbed center leaves its band"));
            }
            let yes = decide(&r.instance, r.k, SolverKind::Brute)?;
            if yes {
                // some optimal solution opens the hub
                let best = brute_force_solve(&r.instance, r.k, &[])?;
                let with_hub = brute_force_solve(&r.instance, r.k - 1, &[0])?;
                checks.samples += 1;
                if compare_radical_sums(&with_hub.cost, &best.cost, DEFAULT_PRECISION_CAP)? != Ordering::Equal {
                    checks.violation(format!("{label}: no optimal solution opens the hub"));
                }
            }
            (solve_pvc(g, *k, *s)?, yes)
        }
        (ReductionKind::GridTiling, Case::Grid(gt)) => {
            let r = reduce_gridtiling_2d(gt)?;
            let grid = r.grid.as_ref().expect("grid reductions carry a grid certificate");
            checks.samples += 1;
            if !grid.separates()? {
                checks.violation(format!("{label}: threshold does not separate the cost bounds"));
            }
            (solve_gridtiling_inequality(gt), decide(&r.instance, r.k, SolverKind::Brute)?)
        }
        _ => return Err(Error::InvalidParameter(format!("case {label} does not apply to the {kind} reduction"))),
    };
    let result = CaseResult { case: label, source: yes_no(source), reduced: yes_no(reduced), matched: source == reduced };
    Ok((result, checks))
}

/// Runs every case of `families` on `jobs` threads; results keep the generation order.
/// Any error aborts the run and names the offending case.
pub fn verify_reduction(kind: ReductionKind, families: &[CaseFamily], jobs: usize) -> Result<VerificationReport> {
    let start = Instant::now();
    let mut cases = Vec::new();
    for f in families {
        cases.extend(expand(kind, f)?);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
    let outcomes: Vec<Result<(CaseResult, VerificationReport)>> = pool.install(|| {
        cases
            .par_iter()
            .map(|c| run_case(kind, c).map_err(|e| Error::CaseAborted { case: c.to_string(), source: Box::new(e) }))
            .collect()
    });
    let mut report = VerificationReport::new(kind.to_string());
    for o in outcomes {
        let (result, checks) = o?;
        report.cases.push(result);
        report.merge(checks);
    }
    report.wall_time_secs = start.elapsed().as_secs_f64();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_families_agree() {
        let fam = [CaseFamily::AllGraphs { max_vertices: 3, connected: false, max_k: 1 }];
        for kind in [ReductionKind::Metric, ReductionKind::Pvc3d, ReductionKind::Pvc4d] {
            let r = verify_reduction(kind, &fam, 1).unwrap();
            assert!(r.passed(), "{kind}: {:?} {:?}", r.notes, r.cases.iter().filter(|c| !c.matched).collect::<Vec<_>>());
            assert!(!r.cases.is_empty());
        }
    }

    #[test]
    fn family_kind_mismatch_is_rejected() {
        assert!(verify_reduction(ReductionKind::Metric, &[CaseFamily::GridSingletons { n: 2, k: 1 }], 1).is_err());
        assert!(verify_reduction(
            ReductionKind::GridTiling,
            &[CaseFamily::AllGraphs { max_vertices: 2, connected: true, max_k: 1 }],
            1
        )
        .is_err());
    }

    #[test]
    fn case_expansion_counts() {
        let cases = expand(ReductionKind::Metric, &CaseFamily::AllGraphs { max_vertices: 3, connected: true, max_k: 1 }).unwrap();
        // connected: K2, P3, K3 with s ranges 2 + 3 + 4
        assert_eq!(cases.len(), 9);
    }

    #[test]
    fn kind_names_round_trip() {
        for k in [ReductionKind::Metric, ReductionKind::Pvc3d, ReductionKind::Pvc4d, ReductionKind::GridTiling] {
            assert_eq!(k.to_string().parse::<ReductionKind>().unwrap(), k);
        }
        assert!("nope".parse::<ReductionKind>().is_err());
    }

    #[test]
    fn grid_singletons_with_one_cell() {
        let r = verify_reduction(ReductionKind::GridTiling, &[CaseFamily::GridSingletons { n: 2, k: 1 }], 1).unwrap();
        assert_eq!(r.cases.len(), 4);
        assert!(r.passed());
        assert!(r.cases.iter().all(|c| c.source == "yes"));
    }
}
