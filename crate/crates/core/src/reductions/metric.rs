//! Vertex cover as k-median over an explicit metric: distance 1 from an edge to its endpoints, 3 otherwise.

use serde_json::{json, Map};

use super::{check_pvc_params, Graph};
use crate::error::Result;
use crate::geometry::rational::{rat, Rational};
use crate::instances::MetricInstance;

#[derive(Clone, Debug)]
pub struct MetricReduction {
    pub instance: MetricInstance,
    pub k: usize,
    pub threshold: Rational,
}

/// Points `0..n` are vertex candidates, `n..n+m` edge clients; other distances are shortest paths.
pub fn reduce_pvc_metric(g: &Graph, k: usize, s: usize) -> Result<MetricReduction> {
    check_pvc_params(g, k, s)?;
    let n = g.vertex_count();
    let m = g.edge_count();
    let size = n + m;
    let inf = u64::MAX / 4;
    let mut d = vec![vec![inf; size]; size];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0;
    }
    for (e, &(u, v)) in g.edges().iter().enumerate() {
        for z in 0..n {
            let w = if z == u || z == v { 1 } else { 3 };
            d[z][n + e] = w;
            d[n + e][z] = w;
        }
    }
    for via in 0..size {
        for i in 0..size {
            for j in 0..size {
                let through = d[i][via] + d[via][j];
                if through < d[i][j] {
                    d[i][j] = through;
                }
            }
        }
    }
    let matrix = d.into_iter().map(|row| row.into_iter().map(|x| rat(x as i64)).collect()).collect();
    let threshold = rat((s + 3 * (m - s)) as i64);
    let mut meta = Map::new();
    meta.insert("reduction".into(), json!("metric"));
    meta.insert("n".into(), json!(n));
    meta.insert("m".into(), json!(m));
    meta.insert("edges".into(), json!(g.edges().iter().map(|&(u, v)| [u + 1, v + 1]).collect::<Vec<_>>()));
    meta.insert("k".into(), json!(k));
    meta.insert("s".into(), json!(s));
    let instance = MetricInstance::new(matrix, (0..n).collect(), (n..size).collect(), threshold.clone())?.with_meta(meta);
    Ok(MetricReduction { instance, k, threshold })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{decide_metric, metric_solution_cost, Solution};

    fn triangle() -> Graph {
        Graph::new(3, [(0, 1), (1, 2), (0, 2)]).unwrap()
    }

    #[test]
    fn triangle_threshold_and_cost() {
        let r = reduce_pvc_metric(&triangle(), 1, 2).unwrap();
        assert_eq!(r.threshold, rat(5));
        assert_eq!(metric_solution_cost(&r.instance, &Solution::new([0])).unwrap(), rat(5));
        assert_eq!(metric_solution_cost(&r.instance, &Solution::new([0, 1, 2])).unwrap(), rat(3));
        assert!(decide_metric(&r.instance, 1).unwrap());
    }

    #[test]
    fn vertex_distances_follow_shortest_paths() {
        let r = reduce_pvc_metric(&triangle(), 1, 2).unwrap();
        assert_eq!(r.instance.matrix()[0][1], rat(2));
        let p = reduce_pvc_metric(&Graph::new(4, [(0, 1), (2, 3)]).unwrap(), 1, 1).unwrap();
        assert_eq!(p.instance.matrix()[0][2], rat(4));
    }

    #[test]
    fn single_edge_threshold_one() {
        let r = reduce_pvc_metric(&Graph::new(2, [(0, 1)]).unwrap(), 1, 1).unwrap();
        assert_eq!(r.threshold, rat(1));
    }

    #[test]
    fn path_middle_vertex_covers_both_edges() {
        let r = reduce_pvc_metric(&Graph::new(3, [(0, 1), (1, 2)]).unwrap(), 1, 2).unwrap();
        assert!(decide_metric(&r.instance, 1).unwrap());
    }

    #[test]
    fn invalid_parameters() {
        assert!(reduce_pvc_metric(&triangle(), 4, 1).is_err());
        assert!(reduce_pvc_metric(&triangle(), 1, 4).is_err());
        assert!(reduce_pvc_metric(&Graph::new(3, []).unwrap(), 1, 0).is_err());
    }
}
