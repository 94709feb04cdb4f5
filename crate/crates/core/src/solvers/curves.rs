//! Points equidistant to three candidates and closed curves alternating between candidates and such points.

use std::collections::{BTreeSet, HashSet};

use itertools::Itertools;

use crate::error::Result;
use crate::geometry::frame::Frame;
use crate::geometry::polygon::orientation;
use crate::geometry::sphere::circumsphere;
use crate::geometry::Point;

/// Circumcenters of all non-collinear candidate triples, deduplicated, in sorted order.
pub fn equidistant_points(candidates: &[Point]) -> Result<Vec<Point>> {
    let mut out = BTreeSet::new();
    for (a, b, c) in candidates.iter().tuple_combinations() {
        if orientation(a, b, c) == std::cmp::Ordering::Equal {
            continue;
        }
        out.insert(circumsphere(&[a.clone(), b.clone(), c.clone()])?.center);
    }
    Ok(out.into_iter().collect())
}

/// Which equidistant points may sit between two consecutive candidates of a curve.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum CurveRule {
    /// Any equidistant point.
    #[default]
    Any,
    /// Only points on the perpendicular bisector of the two neighbouring candidates.
    /// Faster, but can miss the optimum.
    Bisector,
}

/// A closed polygon `c_1, p_1, c_2, p_2, ..., c_r, p_r`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeparatingCurve {
    /// Indices into the candidate list, in curve order.
    pub candidates: Vec<usize>,
    /// Indices into the equidistant point list, `points[i]` sits between `candidates[i]` and the next one.
    pub points: Vec<usize>,
    pub vertices: Vec<Point>,
}

impl SeparatingCurve {
    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }
}

/// What the visitor wants next.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Visit {
    Continue,
    /// Skip the remaining curves through exactly the same set of candidates
    /// (longer curves through supersets are still visited).
    NextCandidateSet,
    /// Abandon the enumeration.
    Stop,
}

/// A curve as seen by an in-frame visitor.
pub(crate) struct CurveRef<'a> {
    /// Positions in the candidate list, in curve order.
    pub candidates: &'a [usize],
    /// Positions in the point list.
    pub points: &'a [usize],
    /// Frame indices of the polygon vertices.
    pub vertices: &'a [usize],
}

struct Search<'a> {
    frame: &'a Frame,
    cands: &'a [usize],
    points: &'a [usize],
    max_len: usize,
    allowed: Vec<Vec<Vec<usize>>>,
    used_c: Vec<bool>,
    used_p: Vec<bool>,
    seq_c: Vec<usize>,
    seq_p: Vec<usize>,
    chain: Vec<usize>,
    done: HashSet<Vec<usize>>,
    stopped: bool,
}

impl Search<'_> {
    /// Whether appending vertex `v` to the open chain keeps it free of self-intersections.
    fn can_append(&self, v: usize) -> bool {
        let f = self.frame;
        let n = self.chain.len();
        let u = self.chain[n - 1];
        if f.same(u, v) {
            return false;
        }
        if n >= 2 && f.folds_back(self.chain[n - 2], u, v) {
            return false;
        }
        // segments (chain[i], chain[i+1]) for i + 1 < n - 1 are not adjacent to (u, v)
        (0..n.saturating_sub(2)).all(|i| !f.segments_intersect(self.chain[i], self.chain[i + 1], u, v))
    }

    fn run(&mut self, visit: &mut dyn FnMut(&CurveRef) -> Visit) {
        for c1 in 0..self.cands.len() {
            if self.stopped {
                return;
            }
            self.used_c[c1] = true;
            self.seq_c.push(c1);
            self.chain.push(self.cands[c1]);
            self.extend(c1, visit);
            self.chain.pop();
            self.seq_c.pop();
            self.used_c[c1] = false;
        }
    }

    fn extend(&mut self, c1: usize, visit: &mut dyn FnMut(&CurveRef) -> Visit) {
        let last = *self.seq_c.last().expect("nonempty");
        if self.seq_c.len() >= 2 && !self.done.contains(&self.seq_c.iter().copied().sorted().collect_vec()) {
            self.close(c1, last, visit);
        }
        if self.seq_c.len() == self.max_len || self.stopped {
            return;
        }
        for next in c1 + 1..self.cands.len() {
            if self.used_c[next] {
                continue;
            }
            let options = self.allowed[last][next].clone();
            for p in options {
                if self.stopped {
                    return;
                }
                if self.used_p[p] || !self.can_append(self.points[p]) {
                    continue;
                }
                self.chain.push(self.points[p]);
                if self.can_append(self.cands[next]) {
                    self.used_p[p] = true;
                    self.used_c[next] = true;
                    self.seq_p.push(p);
                    self.seq_c.push(next);
                    self.chain.push(self.cands[next]);
                    self.extend(c1, visit);
                    self.chain.pop();
                    self.seq_c.pop();
                    self.seq_p.pop();
                    self.used_c[next] = false;
                    self.used_p[p] = false;
                }
                self.chain.pop();
            }
        }
    }

    fn close(&mut self, c1: usize, last: usize, visit: &mut dyn FnMut(&CurveRef) -> Visit) {
        let options = self.allowed[last][c1].clone();
        for p in options {
            if self.used_p[p] {
                continue;
            }
            // canonical under reflection: the sequence read backwards must not be smaller
            if !self.forward_is_canonical(p) {
                continue;
            }
            self.chain.push(self.points[p]);
            if self.frame.is_simple(&self.chain) {
                self.seq_p.push(p);
                let curve = CurveRef { candidates: &self.seq_c, points: &self.seq_p, vertices: &self.chain };
                let next = visit(&curve);
                self.seq_p.pop();
                if next == Visit::Stop {
                    self.stopped = true;
                    self.chain.pop();
                    return;
                }
                if next == Visit::NextCandidateSet {
                    self.done.insert(self.seq_c.iter().copied().sorted().collect());
                    self.chain.pop();
                    return;
                }
            }
            self.chain.pop();
        }
    }

    /// Compares `c1 p1 c2 ... c_r p` with its reversal `c1 p c_r ... c2 p1` on (kind, index) keys.
    fn forward_is_canonical(&self, closing: usize) -> bool {
        let r = self.seq_c.len();
        let mut fwd = Vec::with_capacity(2 * r);
        let mut rev = Vec::with_capacity(2 * r);
        for i in 0..r {
            fwd.push((0, self.seq_c[i]));
            fwd.push((1, if i + 1 < r { self.seq_p[i] } else { closing }));
        }
        rev.push((0, self.seq_c[0]));
        rev.push((1, closing));
        for i in (1..r).rev() {
            rev.push((0, self.seq_c[i]));
            rev.push((1, self.seq_p[i - 1]));
        }
        fwd <= rev
    }
}

/// Visits curves over frame points `cands` and `points` (frame indices), see [`visit_separating_curves`].
pub(crate) fn visit_in_frame(
    frame: &Frame,
    cands: &[usize],
    points: &[usize],
    max_len: usize,
    rule: CurveRule,
    visit: &mut dyn FnMut(&CurveRef) -> Visit,
) {
    let n = cands.len();
    let mut allowed = vec![vec![Vec::new(); n]; n];
    let d2: Vec<Vec<_>> = match rule {
        CurveRule::Any => Vec::new(),
        CurveRule::Bisector => points
            .iter()
            .map(|&p| cands.iter().map(|&c| frame.point(p).squared_distance_unchecked(frame.point(c))).collect())
            .collect(),
    };
    for (i, j) in (0..n).tuple_combinations() {
        let list: Vec<usize> = (0..points.len())
            .filter(|&p| rule == CurveRule::Any || d2[p][i] == d2[p][j])
            .collect();
        allowed[i][j] = list.clone();
        allowed[j][i] = list;
    }
    let mut search = Search {
        frame,
        cands,
        points,
        max_len,
        allowed,
        used_c: vec![false; n],
        used_p: vec![false; points.len()],
        seq_c: Vec::new(),
        seq_p: Vec::new(),
        chain: Vec::new(),
        done: HashSet::new(),
        stopped: false,
    };
    search.run(visit);
}

/// Visits every simple separating curve of length `2..=max_len`, once per rotation/reflection class.
///
/// Curves start at their smallest candidate index. The visitor may skip the remaining curves
/// through the current set of candidates.
pub fn visit_separating_curves(
    candidates: &[Point],
    points: &[Point],
    max_len: usize,
    rule: CurveRule,
    visit: &mut dyn FnMut(&SeparatingCurve) -> Visit,
) {
    let frame = Frame::new(candidates.iter().chain(points).cloned().collect());
    let cands: Vec<usize> = (0..candidates.len()).collect();
    let pts: Vec<usize> = (candidates.len()..frame.len()).collect();
    visit_in_frame(&frame, &cands, &pts, max_len, rule, &mut |c| {
        let curve = SeparatingCurve {
            candidates: c.candidates.to_vec(),
            points: c.points.to_vec(),
            vertices: c.vertices.iter().map(|&v| frame.point(v).clone()).collect(),
        };
        visit(&curve)
    });
}

/// All valid curves of length at most `max_len`, with any equidistant point allowed between candidates.
pub fn enumerate_separating_curves(candidates: &[Point], points: &[Point], max_len: usize) -> Vec<SeparatingCurve> {
    let mut out = Vec::new();
    visit_separating_curves(candidates, points, max_len, CurveRule::Any, &mut |c| {
        out.push(c.clone());
        Visit::Continue
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::polyline_is_simple;

    fn pts(c: &[(i64, i64)]) -> Vec<Point> {
        c.iter().map(|&(x, y)| Point::from_ints(&[x, y]).unwrap()).collect()
    }

    #[test]
    fn single_triple_has_one_circumcenter() {
        let p = equidistant_points(&pts(&[(0, 0), (4, 0), (0, 4)])).unwrap();
        assert_eq!(p, pts(&[(2, 2)]));
        assert!(equidistant_points(&pts(&[(0, 0), (1, 1), (2, 2)])).unwrap().is_empty());
    }

    #[test]
    fn length_one_curves_are_never_yielded() {
        let c = pts(&[(0, 0), (4, 0), (0, 4)]);
        let p = equidistant_points(&c).unwrap();
        assert!(enumerate_separating_curves(&c, &p, 1).is_empty());
        // a single equidistant point cannot close a 2-curve either
        assert!(enumerate_separating_curves(&c, &p, 2).is_empty());
    }

    #[test]
    fn square_corner_curves_are_simple_and_distinct() {
        let c = pts(&[(0, 0), (6, 0), (6, 6), (0, 5)]);
        let p = equidistant_points(&c).unwrap();
        assert_eq!(p.len(), 4);
        let curves = enumerate_separating_curves(&c, &p, 2);
        assert!(!curves.is_empty());
        let mut keys = BTreeSet::new();
        for cv in &curves {
            assert!(polyline_is_simple(&cv.vertices).unwrap());
            assert_eq!(cv.vertices.len(), 2 * cv.len());
            assert!(keys.insert((cv.candidates.clone(), cv.points.clone())));
        }
    }

    #[test]
    fn longer_bound_yields_superset() {
        let c = pts(&[(0, 0), (7, 1), (5, 6), (1, 4), (3, 9)]);
        let p = equidistant_points(&c).unwrap();
        let short = enumerate_separating_curves(&c, &p, 2);
        let long = enumerate_separating_curves(&c, &p, 3);
        for cv in &short {
            assert!(long.contains(cv));
        }
        assert!(long.len() > short.len());
    }
}
