//! Exact planar predicates: orientation, segment intersection, polygon simplicity and location.

use std::cmp::Ordering;

use num_traits::Zero;

use super::point::Point;
use super::rational::Rational;
use super::sphere::Side;
use crate::error::{Error, Result};

/// Sign of the cross product `(b - a) x (c - a)`; `Greater` means counter-clockwise.
pub fn orientation(a: &Point, b: &Point, c: &Point) -> Ordering {
    let lhs = (b.x() - a.x()) * (c.y() - a.y());
    let rhs = (b.y() - a.y()) * (c.x() - a.x());
    lhs.cmp(&rhs)
}

/// Whether `p` lies on the closed segment `ab`.
pub fn on_segment(a: &Point, b: &Point, p: &Point) -> bool {
    orientation(a, b, p) == Ordering::Equal && within_box(a, b, p)
}

fn within_box(a: &Point, b: &Point, p: &Point) -> bool {
    let (xmin, xmax) = if a.x() <= b.x() { (a.x(), b.x()) } else { (b.x(), a.x()) };
    let (ymin, ymax) = if a.y() <= b.y() { (a.y(), b.y()) } else { (b.y(), a.y()) };
    xmin <= p.x() && p.x() <= xmax && ymin <= p.y() && p.y() <= ymax
}

/// Whether the closed segments `ab` and `cd` share at least one point.
pub fn segments_intersect(a: &Point, b: &Point, c: &Point, d: &Point) -> bool {
    let o1 = orientation(a, b, c);
    let o2 = orientation(a, b, d);
    let o3 = orientation(c, d, a);
    let o4 = orientation(c, d, b);
    let eq = Ordering::Equal;
    if o1 != eq && o2 != eq && o3 != eq && o4 != eq {
        return o1 != o2 && o3 != o4;
    }
    (o1 == eq && within_box(a, b, c))
        || (o2 == eq && within_box(a, b, d))
        || (o3 == eq && within_box(c, d, a))
        || (o4 == eq && within_box(c, d, b))
}

/// Segments `ab` and `bc` meeting at `b` overlap beyond `b` (fold back on themselves).
pub(crate) fn adjacent_overlap(a: &Point, b: &Point, c: &Point) -> bool {
    if orientation(a, b, c) != Ordering::Equal {
        return false;
    }
    let ba = a.sub(b);
    let bc = c.sub(b);
    ba.dot(&bc) > Rational::zero()
}

fn check_planar(vertices: &[Point]) -> Result<()> {
    if vertices.len() < 3 {
        return Err(Error::InvalidPolygon(format!(
            "a closed polygon needs at least 3 vertices, got {}",
            vertices.len()
        )));
    }
    for v in vertices {
        if v.dim() != 2 {
            return Err(Error::Dimension { got: v.dim(), expected: "2".into() });
        }
    }
    let n = vertices.len();
    for i in 0..n {
        if vertices[i] == vertices[(i + 1) % n] {
            return Err(Error::InvalidPolygon(format!("vertex {i} is repeated consecutively")));
        }
    }
    Ok(())
}

/// Whether the closed polygon through `vertices` (in order) has no self-intersections.
pub fn polyline_is_simple(vertices: &[Point]) -> Result<bool> {
    check_planar(vertices)?;
    Ok(is_simple_unchecked(vertices))
}

pub(crate) fn is_simple_unchecked(v: &[Point]) -> bool {
    let n = v.len();
    for i in 0..n {
        let (a, b) = (&v[i], &v[(i + 1) % n]);
        for j in i + 1..n {
            let (c, d) = (&v[j], &v[(j + 1) % n]);
            if j == i + 1 {
                if adjacent_overlap(a, b, d) {
                    return false;
                }
            } else if i == 0 && j == n - 1 {
                // segment j ends where segment i starts
                if adjacent_overlap(c, a, b) {
                    return false;
                }
            } else if segments_intersect(a, b, c, d) {
                return false;
            }
        }
    }
    true
}

/// Classifies `p` against a simple polygon: inside, on the boundary, or outside.
pub fn point_vs_polygon(polygon: &[Point], p: &Point) -> Result<Side> {
    if !polyline_is_simple(polygon)? {
        return Err(Error::InvalidPolygon("polygon is not simple".into()));
    }
    if p.dim() != 2 {
        return Err(Error::Dimension { got: p.dim(), expected: "2".into() });
    }
    Ok(locate_unchecked(polygon, p))
}

/// Crossing-number location; the caller guarantees the polygon is simple.
pub(crate) fn locate_unchecked(polygon: &[Point], p: &Point) -> Side {
    let n = polygon.len();
    let mut inside = false;
    for i in 0..n {
        let a = &polygon[i];
        let b = &polygon[(i + 1) % n];
        if on_segment(a, b, p) {
            return Side::On;
        }
        if (a.y() > p.y()) != (b.y() > p.y()) {
            // x-coordinate of the edge at height p.y, compared without division
            let dy = b.y() - a.y();
            let lhs = (p.x() - a.x()) * &dy;
            let rhs = (p.y() - a.y()) * (b.x() - a.x());
            let left_of_crossing = if dy > Rational::zero() { lhs < rhs } else { lhs > rhs };
            if left_of_crossing {
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

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(c: &[(i64, i64)]) -> Vec<Point> {
        c.iter().map(|&(x, y)| Point::from_ints(&[x, y]).unwrap()).collect()
    }

    fn pt(x: i64, y: i64) -> Point {
        Point::from_ints(&[x, y]).unwrap()
    }

    #[test]
    fn square_is_simple_bowtie_is_not() {
        assert!(polyline_is_simple(&poly(&[(0, 0), (4, 0), (4, 4), (0, 4)])).unwrap());
        assert!(!polyline_is_simple(&poly(&[(0, 0), (4, 4), (4, 0), (0, 4)])).unwrap());
    }

    #[test]
    fn repeated_vertex_is_precondition_error() {
        let r = polyline_is_simple(&poly(&[(0, 0), (0, 0), (4, 0), (0, 4)]));
        assert!(matches!(r, Err(Error::InvalidPolygon(_))));
        assert!(polyline_is_simple(&poly(&[(0, 0), (1, 0)])).is_err());
    }

    #[test]
    fn fold_back_and_touching_are_not_simple() {
        // spike folding back along itself
        assert!(!polyline_is_simple(&poly(&[(0, 0), (4, 0), (2, 0), (2, 3)])).unwrap());
        // vertex touching a non-adjacent edge
        assert!(!polyline_is_simple(&poly(&[(0, 0), (4, 0), (4, 4), (2, 0), (0, 4)])).unwrap());
        // degenerate collinear triangle
        assert!(!polyline_is_simple(&poly(&[(0, 0), (1, 0), (2, 0)])).unwrap());
    }

    #[test]
    fn square_locations() {
        let sq = poly(&[(0, 0), (4, 0), (4, 4), (0, 4)]);
        assert_eq!(point_vs_polygon(&sq, &pt(2, 2)).unwrap(), Side::Inside);
        assert_eq!(point_vs_polygon(&sq, &pt(0, 2)).unwrap(), Side::On);
        assert_eq!(point_vs_polygon(&sq, &pt(5, 5)).unwrap(), Side::Outside);
        assert_eq!(point_vs_polygon(&sq, &pt(4, 4)).unwrap(), Side::On);
        assert_eq!(point_vs_polygon(&sq, &pt(-1, 0)).unwrap(), Side::Outside);
    }

    #[test]
    fn non_simple_polygon_location_is_error() {
        let bow = poly(&[(0, 0), (4, 4), (4, 0), (0, 4)]);
        assert!(point_vs_polygon(&bow, &pt(1, 2)).is_err());
    }

    #[test]
    fn concave_polygon_vertex_rays() {
        // ray from (1,2) passes exactly through the reflex vertex (2,2)
        let c = poly(&[(0, 0), (4, 0), (4, 4), (2, 2), (0, 4)]);
        assert_eq!(point_vs_polygon(&c, &pt(1, 2)).unwrap(), Side::Inside);
        assert_eq!(point_vs_polygon(&c, &pt(2, 3)).unwrap(), Side::Outside);
        assert_eq!(point_vs_polygon(&c, &pt(3, 3)).unwrap(), Side::On);
    }

    #[test]
    fn segment_intersections() {
        assert!(segments_intersect(&pt(0, 0), &pt(4, 4), &pt(0, 4), &pt(4, 0)));
        assert!(segments_intersect(&pt(0, 0), &pt(4, 0), &pt(2, 0), &pt(6, 0)));
        assert!(segments_intersect(&pt(0, 0), &pt(4, 0), &pt(4, 0), &pt(6, 3)));
        assert!(!segments_intersect(&pt(0, 0), &pt(4, 0), &pt(5, 0), &pt(6, 0)));
        assert!(!segments_intersect(&pt(0, 0), &pt(4, 0), &pt(0, 1), &pt(4, 1)));
    }
}
