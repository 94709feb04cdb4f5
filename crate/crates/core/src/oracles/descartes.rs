//! Randomized check of the inside/outside pattern of the moment curve against circumspheres.

use std::time::Instant;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::VerificationReport;
use crate::error::{Error, Result};
use crate::geometry::rational::{rat, Rational};
use crate::geometry::{circumsphere, moment_curve_polynomial, moment_point, sphere_side, Side, Sphere};

const DRAW: i64 = 10_000;
const T_MAX: i64 = 100;

fn random_value<R: Rng>(rng: &mut R) -> Rational {
    loop {
        let q = Rational::new(BigInt::from(rng.random_range(1..=DRAW)), BigInt::from(rng.random_range(1..=DRAW)));
        if q < rat(T_MAX) {
            return q;
        }
    }
}

/// `count` distinct sorted values in `(0, 100)`.
fn random_parameters<R: Rng>(count: usize, rng: &mut R) -> Vec<Rational> {
    let mut ts: Vec<Rational> = Vec::with_capacity(count);
    while ts.len() < count {
        let t = random_value(rng);
        if !ts.contains(&t) {
            ts.push(t);
        }
    }
    ts.sort();
    ts
}

/// Expected side on the interval ending at `ts[i]` (or beyond the last value when `i == ts.len()`).
/// Crossings alternate and the curve is outside beyond the last point.
fn expected(i: usize, count: usize) -> Side {
    if (count - i).is_multiple_of(2) {
        Side::Outside
    } else {
        Side::Inside
    }
}

fn sign_changes(coeffs: &[Rational]) -> usize {
    let signs: Vec<bool> = coeffs.iter().filter(|c| !c.is_zero()).map(|c| c.is_positive()).collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// The expansion by increasing degree, written out per dimension.
fn expected_polynomial(s: &Sphere) -> Vec<Rational> {
    let c = s.center.coords();
    let one = Rational::one;
    let zero = Rational::zero;
    let m2 = |x: &Rational| x * rat(-2);
    let constant = c.iter().map(|x| x * x).sum::<Rational>() - &s.squared_radius;
    match c.len() {
        3 => vec![constant, m2(&c[0]), one() + m2(&c[1]), m2(&c[2]), one(), zero(), one()],
        _ => vec![constant, m2(&c[0]), one() + m2(&c[1]), m2(&c[2]), one() + m2(&c[3]), zero(), one(), zero(), one()],
    }
}

/// Draws `trials` random parameter tuples (`dim + 1` values), builds the circumsphere of their
/// moment points, and classifies `samples_per_interval` sampled moment points in every open
/// interval between consecutive values, before the first and in `(t_max, 2 t_max]`.
pub fn verify_descartes(dim: usize, trials: usize, samples_per_interval: usize, seed: u64) -> Result<VerificationReport> {
    if dim != 3 && dim != 4 {
        return Err(Error::Dimension { got: dim, expected: "3 or 4".into() });
    }
    if trials == 0 {
        return Err(Error::InvalidParameter("at least one trial is required".into()));
    }
    let start = Instant::now();
    let mut report = VerificationReport::new(format!("descartes-{dim}d"));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let count = dim + 1;
    for trial in 0..trials {
        let ts = random_parameters(count, &mut rng);
        let pts = ts.iter().map(|t| moment_point(t, dim)).collect::<Result<Vec<_>>>()?;
        let sphere = circumsphere(&pts)?;
        let label = || format!("trial {trial} t=({})", ts.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(", "));

        let poly = moment_curve_polynomial(&sphere);
        report.samples += 1;
        if poly != expected_polynomial(&sphere) {
            report.violation(format!("{}: polynomial coefficients differ from the expansion", label()));
        }
        report.samples += 1;
        if sign_changes(&poly) > count {
            report.violation(format!("{}: {} sign changes exceed {count}", label(), sign_changes(&poly)));
        }

        let last = ts.last().expect("nonempty").clone();
        for i in 0..=count {
            let lo = if i == 0 { Rational::zero() } else { ts[i - 1].clone() };
            let hi = if i == count { &last * rat(2) } else { ts[i].clone() };
            let want = expected(i, count);
            for _ in 0..samples_per_interval {
                // strictly inside (lo, hi); the last interval also never reaches 2 t_max, which is harmless
                let a = rng.random_range(1..=DRAW);
                let t = &lo + (&hi - &lo) * Rational::new(BigInt::from(a), BigInt::from(DRAW + 1));
                let got = sphere_side(&sphere, &moment_point(&t, dim)?)?;
                report.samples += 1;
                if got != want {
                    report.violation(format!("{}: t={t} expected {want:?}, got {got:?}", label()));
                }
            }
        }
    }
    report.wall_time_secs = start.elapsed().as_secs_f64();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::rational::ratio;

    #[test]
    fn pattern_alternates_from_outside_at_infinity() {
        // four-dimensional: inside before t1, outside on (t1, t2), ..., outside beyond t5
        let four: Vec<Side> = (0..=5).map(|i| expected(i, 5)).collect();
        assert_eq!(four, [Side::Inside, Side::Outside, Side::Inside, Side::Outside, Side::Inside, Side::Outside]);
        let three: Vec<Side> = (0..=4).map(|i| expected(i, 4)).collect();
        assert_eq!(three, [Side::Outside, Side::Inside, Side::Outside, Side::Inside, Side::Outside]);
    }

    #[test]
    fn fixed_examples() {
        let s4 = circumsphere(&(1..=5).map(|t| moment_point(&rat(t), 4).unwrap()).collect::<Vec<_>>()).unwrap();
        assert_eq!(sphere_side(&s4, &moment_point(&ratio(5, 2), 4).unwrap()).unwrap(), Side::Inside);
        let s3 = circumsphere(&(1..=4).map(|t| moment_point(&rat(t), 3).unwrap()).collect::<Vec<_>>()).unwrap();
        assert_eq!(sphere_side(&s3, &moment_point(&ratio(1, 2), 3).unwrap()).unwrap(), Side::Outside);
    }

    #[test]
    fn small_runs_are_clean_and_deterministic() {
        for dim in [3, 4] {
            let a = verify_descartes(dim, 5, 3, 11).unwrap();
            assert!(a.passed(), "{:?}", a.notes);
            assert_eq!(a.samples, 5 * (2 + 3 * (dim as u64 + 2)));
            assert_eq!(a.without_timing(), verify_descartes(dim, 5, 3, 11).unwrap().without_timing());
        }
    }

    #[test]
    fn bad_arguments() {
        assert!(verify_descartes(2, 1, 1, 0).is_err());
        assert!(verify_descartes(3, 0, 1, 0).is_err());
    }
}
