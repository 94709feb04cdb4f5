//! Vertex cover as three-dimensional k-median with penalties, using spheres through moment-curve points.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde_json::json;

use super::{certificate_meta, check_pvc_params, rational_between, to_weight, EdgeRecord, GeometricReduction, Graph, ReductionCertificate};
use crate::error::{Error, Result};
use crate::geometry::radical::{RadicalSum, DEFAULT_PRECISION_CAP};
use crate::geometry::rational::{ceil_div, ceil_sqrt, rat, Rational};
use crate::geometry::{circumsphere, moment_point, Point};
use crate::instances::{Client, ClusteringInstance};

/// Client multiplicities that make every `n_e * r_e` nearly equal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Replication {
    pub n_q: u128,
    /// Index of the largest radius (first on ties).
    pub q: usize,
    pub counts: Vec<u128>,
    /// `n_q * r_q`.
    pub mu: RadicalSum,
}

/// `n_q = ceil(1/delta)` and `n_e = ceil(n_q r_q / r_e)`, the latter as the least `t` with `t^2 r_e^2 >= n_q^2 r_q^2`.
pub fn replication_counts(squared_radii: &[Rational], delta: &Rational) -> Result<Replication> {
    if !delta.is_positive() {
        return Err(Error::InvalidParameter("delta must be positive".into()));
    }
    if squared_radii.is_empty() || squared_radii.iter().any(|r| !r.is_positive()) {
        return Err(Error::InvalidParameter("squared radii must be positive".into()));
    }
    let n_q_big = ceil_div(delta.denom(), delta.numer());
    let n_q = to_weight(&n_q_big)?;
    let q = squared_radii
        .iter()
        .enumerate()
        .fold(0, |best, (i, r)| if *r > squared_radii[best] { i } else { best });
    let target = Rational::from_integer(&n_q_big * &n_q_big) * &squared_radii[q];
    let counts = squared_radii
        .iter()
        .map(|r2| to_weight(&ceil_sqrt(&(&target / r2))?))
        .collect::<Result<Vec<_>>>()?;
    let mu = RadicalSum::sqrt(&squared_radii[q])?.scale_int(n_q);
    Ok(Replication { n_q, q, counts, mu })
}

/// Largest power of two not exceeding `x > 0`.
pub(crate) fn power_of_two_below(x: &Rational) -> Rational {
    let two = rat(2);
    let mut p = Rational::one();
    while &p > x {
        p /= &two;
    }
    while &(&p * &two) <= x {
        p *= &two;
    }
    p
}

/// Smallest power of two at least `x > 0`.
pub(crate) fn power_of_two_above(x: &Rational) -> Rational {
    let p = power_of_two_below(x);
    if &p < x {
        p * rat(2)
    } else {
        p
    }
}

/// Rational lower bound on a positive sum, refined until positive.
fn positive_lower_bound(r: &RadicalSum) -> Result<Rational> {
    let mut bits = 64;
    loop {
        let (lo, _) = r.bounds(bits);
        if lo.is_positive() {
            return Ok(lo);
        }
        if bits >= DEFAULT_PRECISION_CAP {
            return Err(Error::Indeterminate { bits });
        }
        bits *= 2;
    }
}

/// Vertex `i` sits on the moment curve at `t = 2(i+1)`, its dummy at `t = 2(i+1)+1`.
/// Each edge gets a client cluster at the center of the sphere through both vertices and both dummies.
pub fn reduce_pvc_3d_penalties(g: &Graph, k: usize, s: usize) -> Result<GeometricReduction> {
    check_pvc_params(g, k, s)?;
    let n = g.vertex_count();
    let m = g.edge_count();
    let at = |t: usize| moment_point(&rat(t as i64), 3);
    let cands: Vec<Point> = (0..n).map(|i| at(2 * (i + 1))).collect::<Result<_>>()?;
    let dummies: Vec<Point> = (0..n).map(|i| at(2 * (i + 1) + 1)).collect::<Result<_>>()?;

    let mut centers = Vec::with_capacity(m);
    let mut radii = Vec::with_capacity(m);
    // per edge, a rational lower bound on the gap between the radius and the nearest other candidate
    let mut margins: Vec<Option<Rational>> = Vec::with_capacity(m);
    for &(u, v) in g.edges() {
        let sphere = circumsphere(&[cands[u].clone(), dummies[u].clone(), cands[v].clone(), dummies[v].clone()])?;
        let r = RadicalSum::sqrt(&sphere.squared_radius)?;
        let mut margin: Option<Rational> = None;
        for (w, c) in cands.iter().enumerate() {
            if w == u || w == v {
                continue;
            }
            let d2 = sphere.center.squared_distance(c)?;
            if d2 <= sphere.squared_radius {
                return Err(Error::InvalidParameter(format!(
                    "candidate {} is not strictly outside the sphere of edge ({}, {})",
                    w + 1,
                    u + 1,
                    v + 1
                )));
            }
            let gap = positive_lower_bound(&(RadicalSum::sqrt(&d2)? - &r))?;
            if margin.as_ref().is_none_or(|x| gap < *x) {
                margin = Some(gap);
            }
        }
        centers.push(sphere.center);
        radii.push(sphere.squared_radius);
        margins.push(margin);
    }

    let two_m = rat(2 * m as i64);
    let mut big_n = BigInt::one();
    let (delta, rep, epsilon) = loop {
        if big_n.bits() > 62 {
            return Err(Error::InvalidParameter("no calibration of delta found below 2^-62".into()));
        }
        let delta = Rational::new(BigInt::one(), big_n.clone());
        big_n *= 2;
        let slack = Rational::one() - &two_m * &delta;
        if !slack.is_positive() {
            continue;
        }
        let rep = replication_counts(&radii, &delta)?;
        // Fact 1 needs epsilon / n_e below each edge's margin; half of it is used
        let cap = margins
            .iter()
            .zip(&rep.counts)
            .filter_map(|(mg, &c)| mg.as_ref().map(|x| x * rat(c as i64) / rat(2)))
            .min();
        // the yes/no gap needs epsilon (1 - 2 m delta) >= 2 m delta mu
        let need = rep.mu.scale(&(&two_m * &delta));
        let epsilon = match cap {
            Some(x) => power_of_two_below(&x),
            None => power_of_two_above(&(rep.mu.bounds(64).1 * &two_m * &delta / &slack)),
        };
        let ok = RadicalSum::from_rational(&epsilon * &slack) - &need;
        if ok.signum(DEFAULT_PRECISION_CAP)? != Ordering::Less {
            break (delta, rep, epsilon);
        }
    };

    let mut clients = Vec::with_capacity(m);
    let mut edges = Vec::with_capacity(m);
    for (e, &(u, v)) in g.edges().iter().enumerate() {
        let n_e = rep.counts[e];
        let penalty = RadicalSum::sqrt(&radii[e])? + RadicalSum::from_rational(&epsilon / rat(n_e as i64));
        clients.push(Client::new(centers[e].clone(), n_e, Some(penalty.clone()))?);
        edges.push(EdgeRecord {
            edge: (u, v),
            center: centers[e].clone(),
            squared_radius: radii[e].clone(),
            multiplicity: n_e,
            penalty: Some(penalty),
        });
    }

    let mu = rep.mu.clone();
    let ms = rat((m - s) as i64);
    let one_delta = Rational::one() + &delta;
    let yes_bound = (mu.scale(&rat(s as i64)) + (mu.clone() + RadicalSum::from_rational(epsilon.clone())).scale(&ms))
        .scale(&one_delta);
    let no_bound = mu.scale(&rat(m as i64)) + RadicalSum::from_rational(&epsilon * rat((m - s + 1) as i64));
    let (nu, _, _) = rational_between(&yes_bound, &no_bound, DEFAULT_PRECISION_CAP)?;

    let cert = ReductionCertificate {
        edges,
        epsilon,
        epsilon_high: None,
        delta,
        n_q: rep.n_q,
        q: rep.q,
        mu,
        yes_bound,
        no_bound,
        nu: nu.clone(),
        k,
        s,
    };
    let mut meta = certificate_meta("pvc3d", g, &cert);
    meta.insert("k".into(), json!(k));
    let instance = ClusteringInstance::new(3, 1, cands, clients)?
        .with_threshold(RadicalSum::from_rational(nu.clone()))
        .with_meta(meta);
    debug_assert!(!nu.is_zero() || m == 0);
    Ok(GeometricReduction { instance, k, threshold: nu, certificate: Some(cert), grid: None })
}
