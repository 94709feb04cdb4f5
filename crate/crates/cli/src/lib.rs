//! Command-line front end: instance generation, solving, verification suites and benchmarks.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use clusterlab::geometry::{compare_radical_sums, RadicalSum};
use clusterlab::instances::{radical_to_pairs, read_instance, serialize_instance, ClusteringInstance, Instance};
use clusterlab::oracles::families::{random_planar_instance, PlanarCaseShape};
use clusterlab::oracles::{
    default_families, verify_descartes, verify_oracle_equivalence, verify_reduction, EquivalenceConfig,
    ReductionKind, VerificationReport,
};
use clusterlab::reductions::{
    reduce_gridtiling_2d_with_cap, reduce_pvc_3d_penalties, reduce_pvc_4d, reduce_pvc_metric, Graph,
    GridTilingInstance, DEFAULT_CLIENT_CAP,
};
use clusterlab::solvers::{
    brute_force_solve_metric, brute_force_solve_with_cap, curve_length_bound, exact_planar_solve, CurveRule,
    PlanarOptions, SolveReport,
};
use clusterlab::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INDETERMINATE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "clusterlab", version, about = "Exact planar clustering and hardness instance generators")]
pub struct CommandConfig {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a reduction instance.
    #[command(subcommand)]
    Gen(GenCommand),
    /// Solve an instance exactly.
    #[command(subcommand)]
    Solve(SolveCommand),
    /// Run a verification suite.
    #[command(subcommand)]
    Verify(VerifyCommand),
    /// Time the solvers on random planar instances and write a CSV table.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct GraphArgs {
    /// Edge-list file: header "n m", then one "i j" line per edge (1-based).
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub s: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum GenCommand {
    /// Partial vertex cover as a metric k-median instance
    Metric(GraphArgs),
    /// Partial vertex cover as 3D k-median with penalties
    Pvc3d(GraphArgs),
    /// Partial vertex cover as 4D k-median with a hub center
    Pvc4d(GraphArgs),
    /// Grid tiling with inequality as 2D k-median with unit penalties
    Gridtiling {
        /// JSON file with `n`, `k` and a k x k array `sets` of pair lists.
        #[arg(long)]
        grid: PathBuf,
        #[arg(long, default_value_t = DEFAULT_CLIENT_CAP)]
        client_cap: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub inst: PathBuf,
    /// Number of centers; defaults to the instance's `meta.k`.
    #[arg(long)]
    pub k: Option<usize>,
    /// Comma-separated candidate indices that must be open.
    #[arg(long, value_delimiter = ',')]
    pub forced: Vec<usize>,
    #[arg(long, default_value_t = clusterlab::geometry::DEFAULT_PRECISION_CAP)]
    pub precision_bits: u32,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum RuleArg {
    Any,
    Bisector,
}

impl From<RuleArg> for CurveRule {
    fn from(r: RuleArg) -> Self {
        match r {
            RuleArg::Any => CurveRule::Any,
            RuleArg::Bisector => CurveRule::Bisector,
        }
    }
}

#[derive(Debug, Args)]
pub struct PlanarArgs {
    #[arg(long, default_value_t = 2)]
    pub base_k: usize,
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = RuleArg::Any)]
    pub curve_rule: RuleArg,
}

#[derive(Debug, Subcommand)]
pub enum SolveCommand {
    Brute(SolveArgs),
    Planar {
        #[command(flatten)]
        common: SolveArgs,
        #[command(flatten)]
        planar: PlanarArgs,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum KindArg {
    Metric,
    Pvc3d,
    Pvc4d,
    Gridtiling,
}

impl From<KindArg> for ReductionKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Metric => ReductionKind::Metric,
            KindArg::Pvc3d => ReductionKind::Pvc3d,
            KindArg::Pvc4d => ReductionKind::Pvc4d,
            KindArg::Gridtiling => ReductionKind::GridTiling,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum VerifyCommand {
    Descartes {
        #[arg(long)]
        dim: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 10)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    Reduction {
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    OracleEquivalence {
        #[arg(long, default_value_t = 200)]
        instances: usize,
        #[arg(long, default_value_t = 3)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 2)]
        base_k: usize,
        #[arg(long, default_value_t = clusterlab::geometry::DEFAULT_PRECISION_CAP)]
        precision_bits: u32,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long, value_enum, default_value_t = RuleArg::Any)]
        curve_rule: RuleArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Candidate counts; each instance gets twice as many clients.
    #[arg(long, value_delimiter = ',', default_value = "6,7")]
    pub sizes: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,5")]
    pub ks: Vec<usize>,
    #[arg(long, default_value_t = 2)]
    pub instances: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 2)]
    pub base_k: usize,
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    #[arg(long, value_enum, default_value_t = RuleArg::Any)]
    pub curve_rule: RuleArg,
    /// Skip the brute-force rows.
    #[arg(long)]
    pub planar_only: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// A failure carrying its exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self { code: EXIT_USAGE, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if e.is_indeterminate() { EXIT_INDETERMINATE } else { EXIT_USAGE };
        Self { code, message: e.to_string() }
    }
}

type CliResult<T> = Result<T, Failure>;

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let config = match CommandConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(config) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

fn execute(config: CommandConfig) -> CliResult<i32> {
    match config.command {
        Command::Gen(g) => generate(g).map(|_| EXIT_OK),
        Command::Solve(s) => solve(s).map(|_| EXIT_OK),
        Command::Verify(v) => verify(v),
        Command::Bench(b) => bench(b).map(|_| EXIT_OK),
    }
}

fn check_input(path: &Path, flag: &str) -> CliResult<()> {
    if !path.is_file() {
        return Err(Failure::usage(format!("{flag}: {} is not a readable file", path.display())));
    }
    Ok(())
}

fn check_output(path: Option<&PathBuf>) -> CliResult<()> {
    if let Some(p) = path {
        let dir = p.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
        if !dir.is_dir() {
            return Err(Failure::usage(format!("--out: directory {} does not exist", dir.display())));
        }
    }
    Ok(())
}

fn read_text(path: &Path, flag: &str) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| Failure::usage(format!("{flag}: {}: {e}", path.display())))
}

fn emit(out: Option<&PathBuf>, text: &str) -> CliResult<()> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Failure::usage(format!("--out: {}: {e}", p.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| Failure::usage(format!("stdout: {e}")))
        }
    }
}

fn read_graph(a: &GraphArgs) -> CliResult<Graph> {
    check_input(&a.graph, "--graph")?;
    check_output(a.out.as_ref())?;
    Graph::parse_edge_list(&read_text(&a.graph, "--graph")?).map_err(|e| Failure::usage(format!("--graph: {e}")))
}

fn generate(cmd: GenCommand) -> CliResult<()> {
    let (inst, out) = match cmd {
        GenCommand::Gridtiling { grid, client_cap, out } => {
            check_input(&grid, "--grid")?;
            check_output(out.as_ref())?;
            let gt = GridTilingInstance::parse_json(&read_text(&grid, "--grid")?)?;
            (Instance::Geometric(reduce_gridtiling_2d_with_cap(&gt, client_cap)?.instance), out)
        }
        GenCommand::Metric(a) => (Instance::Metric(reduce_pvc_metric(&read_graph(&a)?, a.k, a.s)?.instance), a.out),
        GenCommand::Pvc3d(a) => {
            (Instance::Geometric(reduce_pvc_3d_penalties(&read_graph(&a)?, a.k, a.s)?.instance), a.out)
        }
        GenCommand::Pvc4d(a) => (Instance::Geometric(reduce_pvc_4d(&read_graph(&a)?, a.k, a.s)?.instance), a.out),
    };
    emit(out.as_ref(), &serialize_instance(&inst))
}

fn resolve_k(explicit: Option<usize>, inst: &Instance) -> CliResult<usize> {
    let from_meta = match inst {
        Instance::Geometric(i) => i.meta_k(),
        Instance::Metric(i) => i.meta_k(),
    };
    explicit.or(from_meta).ok_or_else(|| Failure::usage("--k is required when the instance has no meta.k"))
}

fn cost_json(cost: &RadicalSum) -> Value {
    json!(radical_to_pairs(cost))
}

fn solve_output(solver: &str, k: usize, report: &SolveReport, inst: &Instance) -> CliResult<Value> {
    let threshold_met = match inst {
        Instance::Geometric(i) => match i.threshold() {
            Some(nu) => Some(compare_radical_sums(&report.cost, nu, clusterlab::geometry::DEFAULT_PRECISION_CAP)?.is_le()),
            None => None,
        },
        Instance::Metric(i) => {
            Some(report.cost.as_rational().is_some_and(|c| &c <= i.threshold()))
        }
    };
    Ok(json!({
        "solver": solver,
        "k": k,
        "open": report.solution.open,
        "cost": cost_json(&report.cost),
        "cost_approx": report.cost.to_f64(),
        "nodes": report.nodes_explored,
        "curves": report.curves_enumerated,
        "max_curve_len": report.max_curve_len,
        "threshold_met": threshold_met,
    }))
}

fn geometric(inst: &Instance, solver: &str) -> CliResult<ClusteringInstance> {
    match inst {
        Instance::Geometric(i) => Ok(i.clone()),
        Instance::Metric(_) => Err(Failure::usage(format!("solve {solver}: metric instances are only supported by brute"))),
    }
}

fn solve(cmd: SolveCommand) -> CliResult<()> {
    let (common, planar) = match cmd {
        SolveCommand::Brute(c) => (c, None),
        SolveCommand::Planar { common, planar } => (common, Some(planar)),
    };
    check_input(&common.inst, "--inst")?;
    check_output(common.out.as_ref())?;
    let inst = read_instance(&common.inst).map_err(|e| Failure::usage(format!("--inst: {e}")))?;
    let k = resolve_k(common.k, &inst)?;
    let (name, report) = match planar {
        None => {
            let report = match &inst {
                Instance::Geometric(i) => brute_force_solve_with_cap(i, k, &common.forced, common.precision_bits)?,
                Instance::Metric(i) => {
                    if !common.forced.is_empty() {
                        return Err(Failure::usage("--forced is not supported for metric instances"));
                    }
                    brute_force_solve_metric(i, k)?
                }
            };
            ("brute", report)
        }
        Some(p) => {
            let i = geometric(&inst, "planar")?;
            let opts = PlanarOptions {
                base_k: p.base_k,
                precision_cap: common.precision_bits,
                seed: p.seed,
                jobs: p.jobs.max(1),
                rule: p.curve_rule.into(),
            };
            ("planar", exact_planar_solve(&i, k, &common.forced, &opts)?)
        }
    };
    let out = solve_output(name, k, &report, &inst)?;
    emit(common.out.as_ref(), &(serde_json::to_string_pretty(&out).expect("json") + "\n"))
}

fn finish_report(report: &VerificationReport, out: Option<&PathBuf>) -> CliResult<i32> {
    emit(out, &report.to_json())?;
    if report.passed() {
        Ok(EXIT_OK)
    } else {
        eprintln!(
            "verification failed: {} mismatching cases, {} violations",
            report.mismatches(),
            report.violations
        );
        Ok(EXIT_FAILED)
    }
}

fn verify(cmd: VerifyCommand) -> CliResult<i32> {
    match cmd {
        VerifyCommand::Descartes { dim, trials, samples, seed, out } => {
            check_output(out.as_ref())?;
            if dim != 3 && dim != 4 {
                return Err(Failure::usage(format!("--dim: expected 3 or 4, got {dim}")));
            }
            finish_report(&verify_descartes(dim, trials, samples, seed)?, out.as_ref())
        }
        VerifyCommand::Reduction { kind, jobs, out } => {
            check_output(out.as_ref())?;
            let kind: ReductionKind = kind.into();
            finish_report(&verify_reduction(kind, &default_families(kind), jobs)?, out.as_ref())
        }
        VerifyCommand::OracleEquivalence { instances, k, seed, base_k, precision_bits, jobs, curve_rule, out } => {
            check_output(out.as_ref())?;
            let cfg = EquivalenceConfig {
                instances,
                k,
                seed,
                planar: PlanarOptions { base_k, precision_cap: precision_bits, seed, jobs: jobs.max(1), rule: curve_rule.into() },
                ..Default::default()
            };
            finish_report(&verify_oracle_equivalence(&cfg)?, out.as_ref())
        }
    }
}

fn bench(args: BenchArgs) -> CliResult<()> {
    check_output(args.out.as_ref())?;
    if args.sizes.is_empty() || args.ks.is_empty() {
        return Err(Failure::usage("--sizes and --ks need at least one value"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let mut csv = csv::Writer::from_writer(Vec::new());
    let header = ["size", "k", "solver", "nodes", "curves", "max_curve_len", "bound", "wall_time_secs"];
    csv.write_record(header).map_err(|e| Failure::usage(e.to_string()))?;
    let opts = PlanarOptions {
        base_k: args.base_k,
        jobs: args.jobs.max(1),
        seed: args.seed,
        rule: args.curve_rule.into(),
        ..Default::default()
    };
    for &size in &args.sizes {
        for &k in args.ks.iter().filter(|&&k| k >= 1 && k <= size) {
            let shape = PlanarCaseShape {
                k: size,
                max_candidates: size,
                max_clients: 2 * size,
                coord_max: 100,
                power: 1,
                penalties: false,
            };
            for _ in 0..args.instances {
                let inst = random_planar_instance(&shape, &mut rng)?;
                let mut rows = Vec::new();
                if !args.planar_only {
                    let t = Instant::now();
                    let r = brute_force_solve_with_cap(&inst, k, &[], opts.precision_cap)?;
                    rows.push(("brute", r, t.elapsed().as_secs_f64()));
                }
                let t = Instant::now();
                let r = exact_planar_solve(&inst, k, &[], &opts)?;
                rows.push(("planar", r, t.elapsed().as_secs_f64()));
                for (solver, r, secs) in rows {
                    let bound = if solver == "planar" { curve_length_bound(k).to_string() } else { String::new() };
                    csv.write_record([
                        size.to_string(),
                        k.to_string(),
                        solver.to_string(),
                        r.nodes_explored.to_string(),
                        r.curves_enumerated.to_string(),
                        r.max_curve_len.to_string(),
                        bound,
                        format!("{secs:.6}"),
                    ])
                    .map_err(|e| Failure::usage(e.to_string()))?;
                }
            }
        }
    }
    let bytes = csv.into_inner().map_err(|e| Failure::usage(e.to_string()))?;
    emit(args.out.as_ref(), &String::from_utf8(bytes).expect("csv is utf-8"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn error_kinds_map_to_exit_codes() {
        assert_eq!(Failure::from(Error::Indeterminate { bits: 64 }).code, EXIT_INDETERMINATE);
        let wrapped = Error::CaseAborted { case: "x".into(), source: Box::new(Error::Indeterminate { bits: 8 }) };
        assert_eq!(Failure::from(wrapped).code, EXIT_INDETERMINATE);
        assert_eq!(Failure::from(Error::Parse("bad".into())).code, EXIT_USAGE);
    }

    #[test]
    fn failing_reports_exit_with_one() {
        let dir = std::env::temp_dir().join(format!("clusterlab-report-{}", std::process::id()));
        let mut r = VerificationReport::new("x");
        assert_eq!(finish_report(&r, Some(&dir)).unwrap(), EXIT_OK);
        r.violation("broken".into());
        assert_eq!(finish_report(&r, Some(&dir)).unwrap(), EXIT_FAILED);
        fs::remove_file(&dir).unwrap();
    }

    #[test]
    fn command_line_shape_is_consistent() {
        use clap::CommandFactory;
        CommandConfig::command().debug_assert();
    }
}
