use std::cmp::Ordering;

use clusterlab::geometry::frame::Frame;
use clusterlab::geometry::{
    circumsphere, compare_radical_sums, orientation, parse_rational, point_vs_polygon, polyline_is_simple, ratio,
    sphere_side, Point, RadicalSum, Rational, Side, DEFAULT_PRECISION_CAP,
};
use num_bigint::BigUint;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

fn point2() -> impl Strategy<Value = Point> {
    (-50i64..=50, -50i64..=50).prop_map(|(x, y)| Point::from_ints(&[x, y]).unwrap())
}

fn rational() -> impl Strategy<Value = Rational> {
    (-200i64..=200, 1i64..=30).prop_map(|(n, d)| ratio(n, d))
}

fn radical() -> impl Strategy<Value = RadicalSum> {
    prop::collection::vec((rational(), 0i64..=60, 1i64..=4), 0..4).prop_map(|terms| {
        terms
            .into_iter()
            .map(|(c, n, d)| RadicalSum::scaled_sqrt(&c, &ratio(n, d)).unwrap())
            .sum()
    })
}

proptest! {
    #[test]
    fn parsed_rationals_are_in_lowest_terms(n in -10_000i64..10_000, d in 1i64..500, m in 1i64..20) {
        let q = parse_rational(&format!("{}/{}", n * m, d * m)).unwrap();
        prop_assert_eq!(&q, &ratio(n, d));
        prop_assert!(q.denom().is_positive());
        prop_assert!(num_integer::Integer::gcd(q.numer(), q.denom()).is_one() || q.numer().is_zero());
    }

    #[test]
    fn radical_terms_are_canonical(a in radical()) {
        let mut radicands: Vec<_> = a.terms().map(|(_, r)| r.clone()).collect();
        for (c, _) in a.terms() {
            prop_assert!(!c.is_zero());
        }
        let n = radicands.len();
        radicands.sort();
        radicands.dedup();
        prop_assert_eq!(radicands.len(), n);
        for r in &radicands {
            // squarefree: no square of a small prime divides a radicand
            for p in [2u32, 3, 5, 7] {
                prop_assert!(!(r % BigUint::from(p * p)).is_zero());
            }
        }
    }

    #[test]
    fn radical_arithmetic_round_trips(a in radical(), b in radical()) {
        let back = &(&a + &b) - &b;
        prop_assert_eq!(&back, &a);
        prop_assert!((&a - &a).is_zero());
        prop_assert_eq!(compare_radical_sums(&a, &a, DEFAULT_PRECISION_CAP).unwrap(), Ordering::Equal);
    }

    #[test]
    fn comparison_is_antisymmetric_and_matches_floats(a in radical(), b in radical()) {
        let ab = compare_radical_sums(&a, &b, DEFAULT_PRECISION_CAP).unwrap();
        let ba = compare_radical_sums(&b, &a, DEFAULT_PRECISION_CAP).unwrap();
        prop_assert_eq!(ab, ba.reverse());
        let gap = a.to_f64() - b.to_f64();
        if gap.abs() > 1e-6 {
            prop_assert_eq!(ab, gap.partial_cmp(&0.0).unwrap());
        }
        prop_assert_eq!(ab == Ordering::Equal, a == b);
    }

    #[test]
    fn square_factors_move_into_the_coefficient(c in rational(), q in 1i64..200, s in 1i64..20) {
        let a = RadicalSum::scaled_sqrt(&c, &ratio(q * s * s, 1)).unwrap();
        let b = RadicalSum::scaled_sqrt(&(&c * ratio(s, 1)), &ratio(q, 1)).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn circumcenter_is_equidistant(a in point2(), b in point2(), c in point2()) {
        prop_assume!(orientation(&a, &b, &c) != Ordering::Equal);
        let s = circumsphere(&[a.clone(), b.clone(), c.clone()]).unwrap();
        for p in [&a, &b, &c] {
            prop_assert_eq!(&s.center.squared_distance(p).unwrap(), &s.squared_radius);
            prop_assert_eq!(sphere_side(&s, p).unwrap(), Side::On);
        }
        prop_assert!(s.squared_radius > Rational::zero());
    }

    #[test]
    fn orientation_flips_under_swaps(a in point2(), b in point2(), c in point2()) {
        let o = orientation(&a, &b, &c);
        prop_assert_eq!(orientation(&b, &a, &c), o.reverse());
        prop_assert_eq!(orientation(&b, &c, &a), o);
    }

    #[test]
    fn frame_predicates_match_direct_ones(poly in prop::collection::vec(point2(), 3..7), probes in prop::collection::vec(point2(), 1..6)) {
        let n = poly.len();
        let frame = Frame::new(poly.iter().chain(&probes).cloned().collect());
        let idx: Vec<usize> = (0..n).collect();
        let simple = polyline_is_simple(&poly).unwrap();
        prop_assert_eq!(frame.is_simple(&idx), simple);
        if simple {
            for (i, p) in probes.iter().enumerate() {
                prop_assert_eq!(frame.locate(&idx, n + i), point_vs_polygon(&poly, p).unwrap());
            }
        }
    }

    #[test]
    fn polygon_vertices_lie_on_the_boundary(a in point2(), b in point2(), c in point2()) {
        prop_assume!(orientation(&a, &b, &c) != Ordering::Equal);
        let tri = [a.clone(), b.clone(), c.clone()];
        for p in &tri {
            prop_assert_eq!(point_vs_polygon(&tri, p).unwrap(), Side::On);
        }
        let sum = a.add(&b).add(&c);
        let centroid = sum.scale(&ratio(1, 3));
        prop_assert_eq!(point_vs_polygon(&tri, &centroid).unwrap(), Side::Inside);
    }
}

#[test]
fn division_by_zero_is_an_error() {
    assert!(parse_rational("1/0").is_err());
}

#[test]
fn collinear_points_have_no_circumcircle() {
    let pts: Vec<Point> = [(0, 0), (1, 1), (2, 2)].iter().map(|&(x, y)| Point::from_ints(&[x, y]).unwrap()).collect();
    assert!(circumsphere(&pts).is_err());
}
