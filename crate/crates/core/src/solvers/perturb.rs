//! Breaking exact cocircularity among planar candidates with a tiny seeded rational shift.

use std::cmp::Ordering;

use itertools::Itertools;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::polygon::orientation;
use crate::geometry::rational::Rational;
use crate::geometry::Point;
use crate::instances::ClusteringInstance;

const MAX_ATTEMPTS: u32 = 8;
/// Offsets are multiples of `rho / 2^JITTER_BITS` in `[-rho, rho]`.
const JITTER_BITS: u32 = 20;

/// Incircle determinant of `d` against the circle through `a, b, c`; zero iff the four are cocircular or collinear.
pub fn incircle(a: &Point, b: &Point, c: &Point, d: &Point) -> Rational {
    let row = |p: &Point| {
        let x = p.x() - d.x();
        let y = p.y() - d.y();
        let w = &x * &x + &y * &y;
        (x, y, w)
    };
    let (ax, ay, aw) = row(a);
    let (bx, by, bw) = row(b);
    let (cx, cy, cw) = row(c);
    &ax * (&by * &cw - &bw * &cy) - &ay * (&bx * &cw - &bw * &cx) + &aw * (&bx * &cy - &by * &cx)
}

fn all_collinear(q: [&Point; 4]) -> bool {
    orientation(q[0], q[1], q[2]) == Ordering::Equal && orientation(q[0], q[1], q[3]) == Ordering::Equal
}

/// Whether some four candidates lie on a common circle (coincident points count as degenerate).
pub fn has_cocircular_quadruple(points: &[Point]) -> bool {
    points.iter().tuple_combinations().any(|(a, b, c, d)| {
        if a == b || a == c || a == d || b == c || b == d || c == d {
            return true;
        }
        incircle(a, b, c, d).is_zero() && !all_collinear([a, b, c, d])
    })
}

/// Smallest positive difference between two candidates' x or y coordinates (1 if none).
fn min_coordinate_gap(points: &[Point]) -> Rational {
    let mut gap: Option<Rational> = None;
    for axis in 0..2 {
        let values: Vec<&Rational> = points.iter().map(|p| &p.coords()[axis]).sorted().dedup().collect();
        for w in values.windows(2) {
            let d = w[1] - w[0];
            if gap.as_ref().is_none_or(|g| d < *g) {
                gap = Some(d);
            }
        }
    }
    gap.unwrap_or_else(Rational::one)
}

/// Returns the instance with candidates shifted by less than a quarter of the minimum coordinate gap
/// when four of them are cocircular, and whether a shift happened. Clients are untouched.
pub fn perturb_if_degenerate(inst: &ClusteringInstance, seed: u64) -> Result<(ClusteringInstance, bool)> {
    if inst.dimension() != 2 {
        return Err(Error::Dimension { got: inst.dimension(), expected: "2".into() });
    }
    if !has_cocircular_quadruple(inst.candidates()) {
        return Ok((inst.clone(), false));
    }
    // rho is a power of two strictly below gap / 4
    let quarter = min_coordinate_gap(inst.candidates()) / Rational::from_integer(BigInt::from(4));
    let mut rho = Rational::one();
    while rho >= quarter {
        rho /= Rational::from_integer(BigInt::from(2));
    }
    while &rho * Rational::from_integer(BigInt::from(2)) < quarter {
        rho *= Rational::from_integer(BigInt::from(2));
    }
    let step = &rho / Rational::from_integer(BigInt::one() << JITTER_BITS);
    let span = 1i64 << JITTER_BITS;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_ATTEMPTS {
        let moved: Vec<Point> = inst
            .candidates()
            .iter()
            .map(|p| {
                let coords = p
                    .coords()
                    .iter()
                    .map(|x| x + &step * Rational::from_integer(BigInt::from(rng.random_range(-span..=span))))
                    .collect();
                Point::new(coords)
            })
            .collect::<Result<_>>()?;
        if !has_cocircular_quadruple(&moved) {
            debug_assert!(moved.iter().zip(inst.candidates()).all(|(m, p)| {
                m.coords().iter().zip(p.coords()).all(|(a, b)| (a - b).abs() <= rho)
            }));
            return Ok((inst.with_candidates(moved)?, true));
        }
    }
    Err(Error::DegeneracyPersists { retries: MAX_ATTEMPTS })
}
