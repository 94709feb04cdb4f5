//! Vertex cover as four-dimensional k-median without penalties, with a hub candidate z* at t = 1.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde_json::json;

use super::pvc3d::power_of_two_below;
use super::{certificate_meta, check_pvc_params, rational_between, replication_counts, to_weight, EdgeRecord, GeometricReduction, Graph, ReductionCertificate};
use crate::error::{Error, Result};
use crate::geometry::radical::{RadicalSum, DEFAULT_PRECISION_CAP};
use crate::geometry::rational::{ceil_sqrt, rat, Rational};
use crate::geometry::{circumsphere, moment_point, Point};
use crate::instances::{Client, ClusteringInstance};

const BISECTION_STEPS: usize = 400;
const EPSILON_RETRIES: usize = 40;

/// A center moved within the bisector of two candidates, away from the hub.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PerturbedCenter {
    pub center: Point,
    /// Squared distance to both edge candidates.
    pub squared_radius: Rational,
    /// `d(c', z*) / r' - 1` lies in `[epsilon_low, epsilon_high]`.
    pub epsilon_low: Rational,
    pub epsilon_high: Rational,
}

/// Upper end of the hub-distance band for target `eps` and `m` edges: `eps (1 + 1/(4m))`.
fn band_high(eps: &Rational, m: usize) -> Rational {
    eps * (Rational::one() + Rational::new(BigInt::one(), BigInt::from(4 * m.max(1))))
}

/// Moves the circumcenter `c` along the bisector hyperplane of `vi` and `vj` so that
/// `(1 + eps) r' <= d(c', z) <= (1 + eps (1 + 1/(4m))) r'` and every point of `others` is at
/// distance at least `(1 + eps) r'`. All conditions are checked exactly on squared distances.
pub fn perturb_center(
    c: &Point,
    vi: &Point,
    vj: &Point,
    z: &Point,
    others: &[Point],
    eps: &Rational,
    m: usize,
) -> Result<PerturbedCenter> {
    let r2 = c.squared_distance(vi)?;
    if c.squared_distance(vj)? != r2 || c.squared_distance(z)? != r2 {
        return Err(Error::Perturbation("center is not equidistant to the edge candidates and the hub".into()));
    }
    if eps.is_negative() {
        return Err(Error::Perturbation("negative epsilon".into()));
    }
    if eps.is_zero() {
        return Ok(PerturbedCenter {
            center: c.clone(),
            squared_radius: r2,
            epsilon_low: Rational::zero(),
            epsilon_high: Rational::zero(),
        });
    }
    let hi_eps = band_high(eps, m);
    let low2 = (Rational::one() + eps) * (Rational::one() + eps);
    let high2 = (Rational::one() + &hi_eps) * (Rational::one() + &hi_eps);
    // direction: the part of (vi - z) orthogonal to (vj - vi); moving along it keeps d(., vi) = d(., vj)
    // and grows d(., z)^2 - d(., vi)^2 linearly
    let a = vi.sub(z);
    let b = vj.sub(vi);
    let u = a.sub(&b.scale(&(a.dot(&b) / b.squared_norm())));
    let u2 = u.squared_norm();
    if u2.is_zero() {
        return Err(Error::Perturbation("hub lies on the line through the edge candidates".into()));
    }
    #[derive(PartialEq)]
    enum Place {
        Below,
        Within,
        Above,
    }
    let place = |lambda: &Rational| -> (Place, Point, Rational) {
        let p = c.add(&u.scale(lambda));
        let rp2 = p.squared_distance_unchecked(vi);
        let dz2 = p.squared_distance_unchecked(z);
        let at = if dz2 < &low2 * &rp2 {
            Place::Below
        } else if dz2 > &high2 * &rp2 {
            Place::Above
        } else {
            Place::Within
        };
        (at, p, rp2)
    };
    let finish = |p: Point, rp2: Rational| -> Result<PerturbedCenter> {
        for (i, o) in others.iter().enumerate() {
            if p.squared_distance(o)? < &low2 * &rp2 {
                return Err(Error::Perturbation(format!("other candidate {i} falls inside the enlarged ball")));
            }
        }
        debug_assert_eq!(p.squared_distance_unchecked(vj), rp2);
        Ok(PerturbedCenter { center: p, squared_radius: rp2, epsilon_low: eps.clone(), epsilon_high: hi_eps.clone() })
    };

    // first-order guess for the step, then grow until the band is reached or passed
    let mut lo = Rational::zero();
    let mut hi = eps * &r2 / &u2;
    let mut grown = 0;
    loop {
        let (at, p, rp2) = place(&hi);
        match at {
            Place::Within => return finish(p, rp2),
            Place::Above => break,
            Place::Below => {
                grown += 1;
                if grown > 64 {
                    return Err(Error::Perturbation("distance ratio never reaches the band".into()));
                }
                lo = hi.clone();
                hi *= rat(2);
            }
        }
    }
    for _ in 0..BISECTION_STEPS {
        let mid = (&lo + &hi) / rat(2);
        let (at, p, rp2) = place(&mid);
        match at {
            Place::Within => return finish(p, rp2),
            Place::Below => lo = mid,
            Place::Above => hi = mid,
        }
    }
    Err(Error::Perturbation("bisection did not land in the band".into()))
}

/// Re-checks the three perturbation conditions of every edge record against `candidates`,
/// where `candidates[0]` is the hub and `candidates[i+1]` is vertex `i`.
pub fn check_perturbed_centers(cert: &ReductionCertificate, candidates: &[Point]) -> bool {
    let Some(hi_eps) = &cert.epsilon_high else { return false };
    let low2 = (Rational::one() + &cert.epsilon) * (Rational::one() + &cert.epsilon);
    let high2 = (Rational::one() + hi_eps) * (Rational::one() + hi_eps);
    cert.edges.iter().all(|e| {
        let (i, j) = (e.edge.0 + 1, e.edge.1 + 1);
        let r2 = &e.squared_radius;
        let d = |w: usize| e.center.squared_distance_unchecked(&candidates[w]);
        let dz = d(0);
        d(i) == *r2
            && d(j) == *r2
            && &low2 * r2 <= dz
            && dz <= &high2 * r2
            && (1..candidates.len()).filter(|&w| w != i && w != j).all(|w| d(w) >= &low2 * r2)
    })
}

/// Candidate 0 is the hub `z* = (1,1,1,1)`; vertex `i` sits at `t = 2(i+1)`. Asks for `k + 1` centers.
pub fn reduce_pvc_4d(g: &Graph, k: usize, s: usize) -> Result<GeometricReduction> {
    check_pvc_params(g, k, s)?;
    let n = g.vertex_count();
    let m = g.edge_count();
    let at = |t: usize| moment_point(&rat(t as i64), 4);
    let hub = at(1)?;
    let verts: Vec<Point> = (0..n).map(|i| at(2 * (i + 1))).collect::<Result<_>>()?;
    let extra: Vec<Point> = (0..n).map(|i| at(2 * (i + 1) + 1)).collect::<Result<_>>()?;

    let mut spheres = Vec::with_capacity(m);
    // smallest ratio d^2 / r^2 from any circumcenter to a candidate off its sphere
    let mut ratio: Option<Rational> = None;
    for &(u, v) in g.edges() {
        let sphere = circumsphere(&[hub.clone(), verts[u].clone(), verts[v].clone(), extra[u].clone(), extra[v].clone()])?;
        for (w, p) in verts.iter().enumerate() {
            if w == u || w == v {
                continue;
            }
            let q = sphere.center.squared_distance(p)? / &sphere.squared_radius;
            if q <= Rational::one() {
                return Err(Error::InvalidParameter(format!(
                    "candidate {} is not strictly outside the sphere of edge ({}, {})",
                    w + 1,
                    u + 1,
                    v + 1
                )));
            }
            if ratio.as_ref().is_none_or(|r| q < *r) {
                ratio = Some(q);
            }
        }
        spheres.push(sphere);
    }

    let mut eps = ratio.as_ref().map_or(Rational::new(1.into(), 4.into()), |rho| {
        // leave room so the moved center still clears the other candidates
        let mut e = Rational::new(1.into(), 4.into());
        let grow = |e: &Rational| (Rational::one() + e * rat(3)) * (Rational::one() + e * rat(3));
        while grow(&e) >= *rho {
            e /= rat(2);
        }
        e
    });
    let mut moved = None;
    for _ in 0..EPSILON_RETRIES {
        let attempt: Result<Vec<PerturbedCenter>> = g
            .edges()
            .iter()
            .zip(&spheres)
            .map(|(&(u, v), sp)| {
                let others: Vec<Point> =
                    (0..n).filter(|&w| w != u && w != v).map(|w| verts[w].clone()).collect();
                perturb_center(&sp.center, &verts[u], &verts[v], &hub, &others, &eps, m)
            })
            .collect();
        match attempt {
            Ok(p) => {
                moved = Some(p);
                break;
            }
            Err(Error::Perturbation(_)) => eps /= rat(2),
            Err(e) => return Err(e),
        }
    }
    let moved = moved.ok_or_else(|| Error::Perturbation("no epsilon admits a valid perturbation".into()))?;
    let eps_hi = band_high(&eps, m);

    // delta = 1/N with N a power of two at least 2m(1+eps)/eps
    let need = rat(2 * m as i64) * (Rational::one() + &eps) / &eps;
    let inv = power_of_two_below(&need);
    let big_n = if inv < need { inv * rat(2) } else { inv };
    let delta = Rational::one() / &big_n;
    let radii: Vec<Rational> = moved.iter().map(|p| p.squared_radius.clone()).collect();
    let rep = replication_counts(&radii, &delta)?;
    let mu = rep.mu.clone();
    let mm = Rational::from_integer(BigInt::from(m));
    let n_q = Rational::from_integer(BigInt::from(rep.n_q));
    let hub_weight = to_weight(&ceil_sqrt(&(&mm * &mm * &n_q * &n_q * &radii[rep.q]))?)?;

    let one = Rational::one();
    let (sr, msr) = (rat(s as i64), rat((m - s) as i64));
    let yes_bound = mu.scale(&((&one + &delta) * (&sr + &msr * (&one + &eps_hi))));
    let no_bound = mu.scale(&(&mm + rat((m - s + 1) as i64) * &eps));
    let (nu, _, _) = rational_between(&yes_bound, &no_bound, DEFAULT_PRECISION_CAP)?;

    let mut clients = Vec::with_capacity(m + 1);
    let mut edges = Vec::with_capacity(m);
    for (e, (&(u, v), p)) in g.edges().iter().zip(&moved).enumerate() {
        clients.push(Client::new(p.center.clone(), rep.counts[e], None)?);
        edges.push(EdgeRecord {
            edge: (u, v),
            center: p.center.clone(),
            squared_radius: p.squared_radius.clone(),
            multiplicity: rep.counts[e],
            penalty: None,
        });
    }
    clients.push(Client::new(hub.clone(), hub_weight, None)?);

    let cert = ReductionCertificate {
        edges,
        epsilon: eps,
        epsilon_high: Some(eps_hi),
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
    let mut meta = certificate_meta("pvc4d", g, &cert);
    meta.insert("k".into(), json!(k + 1));
    meta.insert("source_k".into(), json!(k));
    meta.insert("hub_weight".into(), json!(hub_weight));
    let cands: Vec<Point> = std::iter::once(hub).chain(verts).collect();
    let instance = ClusteringInstance::new(4, 1, cands, clients)?
        .with_threshold(RadicalSum::from_rational(nu.clone()))
        .with_meta(meta);
    Ok(GeometricReduction { instance, k: k + 1, threshold: nu, certificate: Some(cert), grid: None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{sphere_side, Side, Sphere};
    use crate::instances::{decide, SolverKind};
    use crate::solvers::brute_force_solve;

    fn mp(t: i64) -> Point {
        moment_point(&rat(t), 4).unwrap()
    }

    fn edge_sphere() -> Sphere {
        circumsphere(&[mp(1), mp(2), mp(4), mp(3), mp(5)]).unwrap()
    }

    #[test]
    fn zero_epsilon_keeps_center() {
        let s = edge_sphere();
        let p = perturb_center(&s.center, &mp(2), &mp(4), &mp(1), &[mp(6)], &Rational::zero(), 1).unwrap();
        assert_eq!(p.center, s.center);
        assert_eq!(p.epsilon_low, Rational::zero());
        assert_eq!(p.epsilon_high, Rational::zero());
    }

    #[test]
    fn perturbed_center_stays_equidistant_and_in_band() {
        let s = edge_sphere();
        let mut eps = Rational::new(1.into(), 4.into());
        let p = loop {
            match perturb_center(&s.center, &mp(2), &mp(4), &mp(1), &[mp(6), mp(8)], &eps, 3) {
                Ok(p) => break p,
                Err(Error::Perturbation(_)) if eps > Rational::new(1.into(), (1u64 << 50).into()) => eps /= rat(2),
                Err(e) => panic!("{e}"),
            }
        };
        assert!(p.epsilon_low < p.epsilon_high);
        assert_eq!(p.center.squared_distance(&mp(2)).unwrap(), p.center.squared_distance(&mp(4)).unwrap());
        let low2 = (Rational::one() + &eps) * (Rational::one() + &eps);
        let ball = Sphere::new(p.center.clone(), &low2 * &p.squared_radius).unwrap();
        for far in [mp(6), mp(8)] {
            assert_eq!(sphere_side(&ball, &far).unwrap(), Side::Outside);
        }
        assert_ne!(sphere_side(&ball, &mp(1)).unwrap(), Side::Inside);
    }

    #[test]
    fn single_edge_layout() {
        let r = reduce_pvc_4d(&Graph::new(2, [(0, 1)]).unwrap(), 1, 1).unwrap();
        assert_eq!(r.k, 2);
        let c = r.instance.candidates();
        assert_eq!(c[0], Point::from_ints(&[1, 1, 1, 1]).unwrap());
        assert_eq!(c[1], Point::from_ints(&[2, 4, 8, 16]).unwrap());
        assert_eq!(c[2], Point::from_ints(&[4, 16, 64, 256]).unwrap());
        let cert = r.certificate.unwrap();
        assert!(cert.check_cost_bounds());
        assert!(check_perturbed_centers(&cert, c));
    }

    #[test]
    fn triangle_decisions_and_hub_open() {
        let g = Graph::new(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        let yes = reduce_pvc_4d(&g, 1, 2).unwrap();
        assert!(decide(&yes.instance, yes.k, SolverKind::Brute).unwrap());
        let best = brute_force_solve(&yes.instance, yes.k, &[]).unwrap();
        assert!(best.solution.open.contains(&0));
        let no = reduce_pvc_4d(&g, 1, 3).unwrap();
        assert!(!decide(&no.instance, no.k, SolverKind::Brute).unwrap());
    }
}
