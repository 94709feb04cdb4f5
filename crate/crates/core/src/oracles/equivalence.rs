//! Cross-check of the planar solver against exhaustive search on random instances.

use std::cmp::Ordering;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::families::{random_planar_instance, PlanarCaseShape};
use super::{CaseResult, VerificationReport};
use crate::error::{Error, Result};
use crate::geometry::radical::compare_radical_sums;
use crate::instances::{serialize_instance, ClusteringInstance, Instance};
use crate::solvers::{brute_force_solve_with_cap, curve_length_bound, exact_planar_solve, PlanarOptions};

#[derive(Clone, Debug)]
pub struct EquivalenceConfig {
    pub instances: usize,
    pub k: usize,
    pub max_candidates: usize,
    pub max_clients: usize,
    pub coord_max: i64,
    pub seed: u64,
    pub planar: PlanarOptions,
}

impl Default for EquivalenceConfig {
    fn default() -> Self {
        Self {
            instances: 200,
            k: 3,
            max_candidates: 8,
            max_clients: 20,
            coord_max: 100,
            seed: 0,
            planar: PlanarOptions::default(),
        }
    }
}

/// Instance `i` uses power `1 + i % 2` and penalties when `(i / 2) % 2 == 1`, so every block of
/// four covers all combinations.
pub fn verify_oracle_equivalence(cfg: &EquivalenceConfig) -> Result<VerificationReport> {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut report = VerificationReport::new("oracle-equivalence");
    let bound = curve_length_bound(cfg.k);
    for i in 0..cfg.instances {
        let shape = PlanarCaseShape {
            k: cfg.k,
            max_candidates: cfg.max_candidates,
            max_clients: cfg.max_clients,
            coord_max: cfg.coord_max,
            power: 1 + (i % 2) as u32,
            penalties: (i / 2) % 2 == 1,
        };
        let inst = random_planar_instance(&shape, &mut rng)?;
        let abort = |e: Error, inst: &ClusteringInstance| Error::CaseAborted {
            case: format!("#{i}: {}", serialize_instance(&Instance::Geometric(inst.clone())).trim_end()),
            source: Box::new(e),
        };
        let brute = brute_force_solve_with_cap(&inst, cfg.k, &[], cfg.planar.precision_cap).map_err(|e| abort(e, &inst))?;
        let planar = exact_planar_solve(&inst, cfg.k, &[], &cfg.planar).map_err(|e| abort(e, &inst))?;
        let same = compare_radical_sums(&brute.cost, &planar.cost, cfg.planar.precision_cap).map_err(|e| abort(e, &inst))?
            == Ordering::Equal;
        report.samples += 1;
        if planar.max_curve_len > bound {
            report.violation(format!("#{i}: curve of length {} exceeds the bound {bound}", planar.max_curve_len));
        }
        report.cases.push(CaseResult {
            case: format!(
                "#{i} p={} penalties={} candidates={} clients={}",
                shape.power,
                shape.penalties,
                inst.candidates().len(),
                inst.clients().len()
            ),
            source: brute.cost.to_string(),
            reduced: planar.cost.to_string(),
            matched: same,
        });
    }
    report.wall_time_secs = start.elapsed().as_secs_f64();
    Ok(report)
}
