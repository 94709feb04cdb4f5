//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any fails.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use clusterlab::geometry::{circumsphere, compare_radical_sums, Point, RadicalSum, Rational};
use clusterlab::instances::{decide_metric, metric_solution_cost, Solution};
use clusterlab::oracles::{
    default_families, verify_descartes, verify_oracle_equivalence, verify_reduction, EquivalenceConfig, ReductionKind,
    VerificationReport,
};
use clusterlab::reductions::{reduce_pvc_metric, Graph};
use clusterlab::solvers::brute_force_solve_metric;
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const PLANAR_LIMIT: Duration = Duration::from_secs(15 * 60);
const DESCARTES_LIMIT: Duration = Duration::from_secs(60);
const REDUCTION_LIMIT: Duration = Duration::from_secs(30 * 60);
const CIRCUMSPHERE_CASES: usize = 1000;
const COMPARISONS: usize = 10_000;
const ORACLE_BITS: u32 = 256;
const PRECISION_CAP: u32 = 4096;

struct Outcome {
    name: &'static str,
    pass: bool,
    detail: String,
}

fn report_line(r: &VerificationReport) -> String {
    format!(
        "{} cases, {} mismatches, {} checks, {} violations, {:.1}s",
        r.cases.len(),
        r.mismatches(),
        r.samples,
        r.violations,
        r.wall_time_secs
    )
}

fn within(elapsed: Duration, limit: Duration) -> bool {
    elapsed <= limit
}

fn planar_equivalence() -> Outcome {
    let start = Instant::now();
    let r = verify_oracle_equivalence(&EquivalenceConfig::default());
    let elapsed = start.elapsed();
    match r {
        Ok(r) => Outcome {
            name: "planar solver matches brute force on 200 random instances",
            pass: r.cases.len() == 200 && r.passed() && within(elapsed, PLANAR_LIMIT),
            detail: report_line(&r),
        },
        Err(e) => Outcome { name: "planar solver matches brute force on 200 random instances", pass: false, detail: e.to_string() },
    }
}

fn descartes() -> Outcome {
    let name = "moment-curve sign patterns hold in dimensions 3 and 4";
    let start = Instant::now();
    let mut lines = Vec::new();
    let mut pass = true;
    for dim in [3, 4] {
        match verify_descartes(dim, 100, 10, 2024) {
            Ok(r) => {
                pass &= r.passed() && r.samples > 0;
                lines.push(format!("dim {dim}: {} samples, {} violations", r.samples, r.violations));
            }
            Err(e) => {
                pass = false;
                lines.push(format!("dim {dim}: {e}"));
            }
        }
    }
    let elapsed = start.elapsed();
    pass &= within(elapsed, DESCARTES_LIMIT);
    Outcome { name, pass, detail: format!("{}; {:.1}s", lines.join("; "), elapsed.as_secs_f64()) }
}

fn run_reduction(kind: ReductionKind) -> Result<(VerificationReport, Duration), String> {
    let start = Instant::now();
    let r = verify_reduction(kind, &default_families(kind), 1).map_err(|e| e.to_string())?;
    Ok((r, start.elapsed()))
}

fn metric() -> Outcome {
    let name = "metric reduction agrees with partial vertex cover; triangle threshold and cost are 5";
    let triangle = || -> Result<bool, String> {
        let g = Graph::new(3, [(0, 1), (1, 2), (0, 2)]).map_err(|e| e.to_string())?;
        let r = reduce_pvc_metric(&g, 1, 2).map_err(|e| e.to_string())?;
        let best = brute_force_solve_metric(&r.instance, 1).map_err(|e| e.to_string())?;
        let five = Rational::from_integer(BigInt::from(5));
        let cost = metric_solution_cost(&r.instance, &Solution::new(best.solution.open.clone())).map_err(|e| e.to_string())?;
        Ok(r.threshold == five && cost == five && decide_metric(&r.instance, 1).map_err(|e| e.to_string())?)
    };
    match (run_reduction(ReductionKind::Metric), triangle()) {
        (Ok((r, _)), Ok(t)) => Outcome {
            name,
            pass: r.passed() && !r.cases.is_empty() && t,
            detail: format!("{}; triangle {}", report_line(&r), if t { "ok" } else { "wrong" }),
        },
        (Err(e), _) | (_, Err(e)) => Outcome { name, pass: false, detail: e },
    }
}

fn timed_reduction(kind: ReductionKind, name: &'static str, limit: Duration) -> Outcome {
    match run_reduction(kind) {
        Ok((r, elapsed)) => Outcome {
            name,
            pass: r.passed() && !r.cases.is_empty() && r.samples > 0 && within(elapsed, limit),
            detail: report_line(&r),
        },
        Err(e) => Outcome { name, pass: false, detail: e },
    }
}

fn random_rational<R: Rng>(rng: &mut R, span: i64) -> Rational {
    Rational::new(BigInt::from(rng.random_range(-span..=span)), BigInt::from(rng.random_range(1..=span)))
}

fn circumspheres() -> Outcome {
    let name = "circumcenters are exactly equidistant on 1000 random inputs";
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut exact = 0;
    let mut bad = 0;
    while exact + bad < CIRCUMSPHERE_CASES {
        let dim = 2 + (exact + bad) % 3;
        let pts: Vec<Point> = (0..=dim)
            .map(|_| Point::new((0..dim).map(|_| random_rational(&mut rng, 50)).collect()).unwrap())
            .collect();
        let Ok(s) = circumsphere(&pts) else { continue };
        if pts.iter().all(|p| p.squared_distance(&s.center).unwrap() - &s.squared_radius == Rational::zero()) {
            exact += 1;
        } else {
            bad += 1;
        }
    }
    Outcome { name, pass: bad == 0, detail: format!("{exact} exact, {bad} with nonzero residual") }
}

/// Integer bounds on `value * 2^bits`, computed from integer square roots.
fn fixed_point(terms: &[(Rational, u64)], bits: u32) -> (BigInt, BigInt) {
    let mut lo = BigInt::zero();
    let mut hi = BigInt::zero();
    for (c, q) in terms {
        let root = BigInt::from((BigUint::from(*q) << (2 * bits)).sqrt());
        let (n, d) = (c.numer(), c.denom());
        let (a, b) = (n * &root, n * (&root + 1));
        let (small, large) = if n.is_negative() { (b, a) } else { (a, b) };
        lo += small.div_floor(d);
        hi -= (-large).div_floor(d);
    }
    (lo, hi)
}

fn random_terms<R: Rng>(rng: &mut R) -> Vec<(Rational, u64)> {
    (0..rng.random_range(1..=4)).map(|_| (random_rational(rng, 20), rng.random_range(1..=30))).collect()
}

fn to_sum(terms: &[(Rational, u64)]) -> RadicalSum {
    terms
        .iter()
        .map(|(c, q)| RadicalSum::scaled_sqrt(c, &Rational::from_integer(BigInt::from(*q))).unwrap())
        .sum()
}

fn radical_comparisons() -> Outcome {
    let name = "radical-sum comparison agrees with 256-bit evaluation on 10^4 pairs";
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut tally: BTreeMap<&str, usize> = BTreeMap::new();
    let mut wrong = 0;
    for i in 0..COMPARISONS {
        let x = random_terms(&mut rng);
        let y = if i % 10 == 0 {
            // same value written differently: c sqrt(q) = (c/2) sqrt(4q), terms reversed
            x.iter().rev().map(|(c, q)| (c / Rational::from_integer(BigInt::from(2)), 4 * q)).collect()
        } else {
            random_terms(&mut rng)
        };
        let got = match compare_radical_sums(&to_sum(&x), &to_sum(&y), PRECISION_CAP) {
            Ok(o) => o,
            Err(_) => {
                wrong += 1;
                continue;
            }
        };
        let (xl, xh) = fixed_point(&x, ORACLE_BITS);
        let (yl, yh) = fixed_point(&y, ORACLE_BITS);
        let oracle = if xh < yl {
            Some(Ordering::Less)
        } else if xl > yh {
            Some(Ordering::Greater)
        } else {
            None
        };
        match (oracle, got) {
            (Some(o), g) if o == g => *tally.entry(if o == Ordering::Less { "less" } else { "greater" }).or_default() += 1,
            (None, Ordering::Equal) => *tally.entry("equal").or_default() += 1,
            _ => wrong += 1,
        }
    }
    Outcome { name, pass: wrong == 0, detail: format!("{tally:?}, {wrong} disagreements") }
}

fn scaling() -> Outcome {
    let name = "bench: curve counts grow with k and never exceed the length bound";
    let dir = std::env::temp_dir().join(format!("clusterlab-bench-{}", std::process::id()));
    let code = clusterlab_cli::run([
        "clusterlab", "bench", "--sizes", "6", "--ks", "3,4,5", "--instances", "3", "--seed", "5", "--out",
        dir.to_str().unwrap(),
    ]);
    if code != 0 {
        return Outcome { name, pass: false, detail: format!("bench exited with {code}") };
    }
    let mut rd = csv::Reader::from_path(&dir).unwrap();
    let mut curves: BTreeMap<usize, u64> = BTreeMap::new();
    let mut within_bound = true;
    for rec in rd.records() {
        let rec = rec.unwrap();
        if &rec[2] != "planar" {
            continue;
        }
        let k: usize = rec[1].parse().unwrap();
        *curves.entry(k).or_default() += rec[4].parse::<u64>().unwrap();
        within_bound &= rec[5].parse::<usize>().unwrap() <= rec[6].parse::<usize>().unwrap();
    }
    let _ = std::fs::remove_file(&dir);
    let counts: Vec<u64> = curves.values().copied().collect();
    let growing = counts.windows(2).all(|w| w[0] <= w[1]) && counts.first() < counts.last();
    Outcome { name, pass: within_bound && growing, detail: format!("curves by k {curves:?}, lengths within bound: {within_bound}") }
}

fn main() {
    // `cargo test -- --list` and similar harness probes pass flags; only run on a plain invocation
    if std::env::args().skip(1).any(|a| a == "--list") {
        return;
    }
    let checks: Vec<(&str, fn() -> Outcome)> = vec![
        ("planar", planar_equivalence),
        ("descartes", descartes),
        ("metric", metric),
        ("pvc3d", || {
            timed_reduction(
                ReductionKind::Pvc3d,
                "3D penalty reduction agrees with partial vertex cover; multiplicity bounds hold",
                REDUCTION_LIMIT,
            )
        }),
        ("pvc4d", || {
            timed_reduction(
                ReductionKind::Pvc4d,
                "4D reduction agrees; yes-cases open the hub; perturbed centers stay in their band",
                REDUCTION_LIMIT,
            )
        }),
        ("gridtiling", || {
            timed_reduction(
                ReductionKind::GridTiling,
                "grid tiling reduction agrees; threshold separates disjoint and overlapping costs",
                REDUCTION_LIMIT,
            )
        }),
        ("exactness", || {
            let a = circumspheres();
            let b = radical_comparisons();
            Outcome {
                name: "exact circumspheres and radical-sum comparisons",
                pass: a.pass && b.pass,
                detail: format!("{}; {}", a.detail, b.detail),
            }
        }),
        ("scaling", scaling),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (key, check) in checks {
        if !filter.is_empty() && !filter.iter().any(|f| key.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let o = check();
        if !o.pass {
            failed += 1;
        }
        println!(
            "{} [{key}] {} ({}; {:.1}s)",
            if o.pass { "PASS" } else { "FAIL" },
            o.name,
            o.detail,
            start.elapsed().as_secs_f64()
        );
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
