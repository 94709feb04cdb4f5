//! Indexed planar point set with memoised orientation signs.
//!
//! Polygon predicates over the frame reduce to orientation lookups plus coordinate comparisons,
//! which lets the separating-curve search test thousands of polygons cheaply.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::sync::atomic::{AtomicI8, Ordering as MemOrder};

use super::point::Point;
use super::polygon::orientation;
use super::sphere::Side;

/// Frames larger than this compute orientations directly instead of caching them.
const MAX_CACHED_POINTS: usize = 400;
const UNKNOWN: i8 = 2;

pub struct Frame {
    pts: Vec<Point>,
    /// Index of the first point with identical coordinates.
    rep: Vec<usize>,
    cache: Vec<AtomicI8>,
}

fn to_i8(o: Ordering) -> i8 {
    match o {
        Ordering::Less => -1,
        Ordering::Equal => 0,
        Ordering::Greater => 1,
    }
}

fn from_i8(v: i8) -> Ordering {
    v.cmp(&0)
}

impl Frame {
    /// All points must be planar.
    pub fn new(pts: Vec<Point>) -> Self {
        let mut first: BTreeMap<&Point, usize> = BTreeMap::new();
        let rep = pts.iter().enumerate().map(|(i, p)| *first.entry(p).or_insert(i)).collect();
        let n = pts.len();
        let cache = if n <= MAX_CACHED_POINTS {
            (0..n * n * n).map(|_| AtomicI8::new(UNKNOWN)).collect()
        } else {
            Vec::new()
        };
        Self { pts, rep, cache }
    }

    pub fn len(&self) -> usize {
        self.pts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pts.is_empty()
    }

    pub fn point(&self, i: usize) -> &Point {
        &self.pts[i]
    }

    pub fn same(&self, a: usize, b: usize) -> bool {
        self.rep[a] == self.rep[b]
    }

    pub fn orient(&self, a: usize, b: usize, c: usize) -> Ordering {
        if self.cache.is_empty() {
            return orientation(&self.pts[a], &self.pts[b], &self.pts[c]);
        }
        // sort the triple; each transposition flips the sign
        let (mut x, mut y, mut z) = (a, b, c);
        let mut flip = false;
        if x > y {
            std::mem::swap(&mut x, &mut y);
            flip = !flip;
        }
        if y > z {
            std::mem::swap(&mut y, &mut z);
            flip = !flip;
        }
        if x > y {
            std::mem::swap(&mut x, &mut y);
            flip = !flip;
        }
        let n = self.pts.len();
        let slot = &self.cache[(x * n + y) * n + z];
        let mut v = slot.load(MemOrder::Relaxed);
        if v == UNKNOWN {
            v = to_i8(orientation(&self.pts[x], &self.pts[y], &self.pts[z]));
            slot.store(v, MemOrder::Relaxed);
        }
        let o = from_i8(v);
        if flip {
            o.reverse()
        } else {
            o
        }
    }

    fn within_box(&self, a: usize, b: usize, p: usize) -> bool {
        let (a, b, p) = (&self.pts[a], &self.pts[b], &self.pts[p]);
        let (xmin, xmax) = if a.x() <= b.x() { (a.x(), b.x()) } else { (b.x(), a.x()) };
        let (ymin, ymax) = if a.y() <= b.y() { (a.y(), b.y()) } else { (b.y(), a.y()) };
        xmin <= p.x() && p.x() <= xmax && ymin <= p.y() && p.y() <= ymax
    }

    pub fn on_segment(&self, a: usize, b: usize, p: usize) -> bool {
        self.orient(a, b, p) == Ordering::Equal && self.within_box(a, b, p)
    }

    pub fn segments_intersect(&self, a: usize, b: usize, c: usize, d: usize) -> bool {
        let o1 = self.orient(a, b, c);
        let o2 = self.orient(a, b, d);
        let o3 = self.orient(c, d, a);
        let o4 = self.orient(c, d, b);
        let eq = Ordering::Equal;
        if o1 != eq && o2 != eq && o3 != eq && o4 != eq {
            return o1 != o2 && o3 != o4;
        }
        (o1 == eq && self.within_box(a, b, c))
            || (o2 == eq && self.within_box(a, b, d))
            || (o3 == eq && self.within_box(c, d, a))
            || (o4 == eq && self.within_box(c, d, b))
    }

    /// Segments `ab` and `bc` overlap beyond their shared endpoint `b`.
    pub fn folds_back(&self, a: usize, b: usize, c: usize) -> bool {
        if self.orient(a, b, c) != Ordering::Equal {
            return false;
        }
        let ba = self.pts[a].sub(&self.pts[b]);
        let bc = self.pts[c].sub(&self.pts[b]);
        ba.dot(&bc) > num_traits::zero()
    }

    /// Simplicity of the closed polygon through `poly` (at least 3 vertices, no equal neighbours).
    pub fn is_simple(&self, poly: &[usize]) -> bool {
        let n = poly.len();
        if n < 3 {
            return false;
        }
        if (0..n).any(|i| self.same(poly[i], poly[(i + 1) % n])) {
            return false;
        }
        for i in 0..n {
            let (a, b) = (poly[i], poly[(i + 1) % n]);
            for j in i + 1..n {
                let (c, d) = (poly[j], poly[(j + 1) % n]);
                if j == i + 1 {
                    if self.folds_back(a, b, d) {
                        return false;
                    }
                } else if i == 0 && j == n - 1 {
                    if self.folds_back(c, a, b) {
                        return false;
                    }
                } else if self.segments_intersect(a, b, c, d) {
                    return false;
                }
            }
        }
        true
    }

    /// Location of point `p` against the simple polygon `poly`, by exact ray casting.
    pub fn locate(&self, poly: &[usize], p: usize) -> Side {
        let n = poly.len();
        let py = self.pts[p].y();
        let mut inside = false;
        for i in 0..n {
            let (a, b) = (poly[i], poly[(i + 1) % n]);
            if self.on_segment(a, b, p) {
                return Side::On;
            }
            let ay = self.pts[a].y();
            let by = self.pts[b].y();
            if (ay > py) != (by > py) {
                // the rightward ray crosses iff p lies left of the upward-directed edge
                let o = self.orient(a, b, p);
                let crosses = if by > ay { o == Ordering::Greater } else { o == Ordering::Less };
                if crosses {
                    inside = !inside;
                }
            }
        }
        if inside {
            Side::Inside
        } else {
            Side::Outside
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::polygon::{point_vs_polygon, polyline_is_simple};

    fn pts(c: &[(i64, i64)]) -> Vec<Point> {
        c.iter().map(|&(x, y)| Point::from_ints(&[x, y]).unwrap()).collect()
    }

    #[test]
    fn agrees_with_direct_predicates() {
        let p = pts(&[(0, 0), (4, 0), (4, 4), (2, 2), (0, 4), (1, 2), (2, 3), (3, 3), (5, 5), (2, 0)]);
        let f = Frame::new(p.clone());
        let poly = [0, 1, 2, 3, 4];
        let verts: Vec<Point> = poly.iter().map(|&i| p[i].clone()).collect();
        assert_eq!(f.is_simple(&poly), polyline_is_simple(&verts).unwrap());
        for q in 5..p.len() {
            assert_eq!(f.locate(&poly, q), point_vs_polygon(&verts, &p[q]).unwrap());
        }
        assert!(!f.is_simple(&[0, 2, 1, 4]));
    }

    #[test]
    fn orientation_cache_respects_permutations() {
        let f = Frame::new(pts(&[(0, 0), (1, 0), (0, 1)]));
        assert_eq!(f.orient(0, 1, 2), Ordering::Greater);
        assert_eq!(f.orient(1, 0, 2), Ordering::Less);
        assert_eq!(f.orient(2, 0, 1), Ordering::Greater);
        assert_eq!(f.orient(0, 2, 1), Ordering::Less);
    }

    #[test]
    fn duplicate_points_share_representative() {
        let f = Frame::new(pts(&[(1, 1), (2, 2), (1, 1)]));
        assert!(f.same(0, 2));
        assert!(!f.same(0, 1));
        assert!(!f.is_simple(&[0, 1, 2]));
    }
}
