use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::point::Point;
use super::rational::Rational;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sphere {
    pub center: Point,
    pub squared_radius: Rational,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Side {
    Inside,
    On,
    Outside,
}

impl Sphere {
    pub fn new(center: Point, squared_radius: Rational) -> Result<Self> {
        if !squared_radius.is_positive() {
            return Err(Error::Domain(format!("squared radius must be positive, got {squared_radius}")));
        }
        Ok(Self { center, squared_radius })
    }

    pub fn dim(&self) -> usize {
        self.center.dim()
    }
}

/// Solves `A x = b` for square `A` over the rationals by fraction-free (Bareiss) elimination.
///
/// Each row is first scaled to integers; all elimination steps divide exactly.
pub fn solve_fraction_free(a: &[Vec<Rational>], b: &[Rational]) -> Result<Vec<Rational>> {
    let n = a.len();
    let mut m: Vec<Vec<BigInt>> = Vec::with_capacity(n);
    for (row, rhs) in a.iter().zip(b) {
        if row.len() != n {
            return Err(Error::InvalidParameter("linear system is not square".into()));
        }
        let lcm = row
            .iter()
            .chain(std::iter::once(rhs))
            .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        m.push(
            row.iter()
                .chain(std::iter::once(rhs))
                .map(|x| x.numer() * (&lcm / x.denom()))
                .collect(),
        );
    }
    let mut prev = BigInt::one();
    for k in 0..n {
        let pivot = (k..n)
            .find(|&r| !m[r][k].is_zero())
            .ok_or_else(|| Error::Singular(format!("no pivot in column {k}")))?;
        m.swap(k, pivot);
        for i in k + 1..n {
            for j in k + 1..=n {
                let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
            m[i][k] = BigInt::zero();
        }
        prev = m[k][k].clone();
    }
    let mut x = vec![Rational::zero(); n];
    for i in (0..n).rev() {
        let mut acc = Rational::from_integer(m[i][n].clone());
        for j in i + 1..n {
            acc -= &x[j] * Rational::from_integer(m[i][j].clone());
        }
        x[i] = acc / Rational::from_integer(m[i][i].clone());
    }
    Ok(x)
}

/// The unique sphere through `d + 1` affinely independent points in dimension `d`.
pub fn circumsphere(points: &[Point]) -> Result<Sphere> {
    let first = points.first().ok_or_else(|| Error::InvalidParameter("no points".into()))?;
    let d = first.dim();
    if points.len() != d + 1 {
        return Err(Error::InvalidParameter(format!(
            "circumsphere in dimension {d} needs {} points, got {}",
            d + 1,
            points.len()
        )));
    }
    for p in points {
        first.check_dim(p)?;
    }
    // Perpendicular bisectors: 2 (p_i - p_0) . x = |p_i|^2 - |p_0|^2
    let base_norm = first.squared_norm();
    let two = Rational::from_integer(BigInt::from(2));
    let mut a = Vec::with_capacity(d);
    let mut b = Vec::with_capacity(d);
    for p in &points[1..] {
        a.push(p.sub(first).coords().iter().map(|c| c * &two).collect());
        b.push(p.squared_norm() - &base_norm);
    }
    let center = solve_fraction_free(&a, &b)
        .map_err(|_| Error::Singular("points are affinely dependent".into()))?;
    let center = Point::new(center)?;
    let squared_radius = center.squared_distance_unchecked(first);
    Sphere::new(center, squared_radius)
}

pub fn sphere_side(s: &Sphere, p: &Point) -> Result<Side> {
    let d2 = s.center.squared_distance(p)?;
    Ok(match d2.cmp(&s.squared_radius) {
        std::cmp::Ordering::Less => Side::Inside,
        std::cmp::Ordering::Equal => Side::On,
        std::cmp::Ordering::Greater => Side::Outside,
    })
}

/// Coefficients (by increasing degree) of `|m(t) - center|^2 - r^2` where `m` is the moment curve.
pub fn moment_curve_polynomial(s: &Sphere) -> Vec<Rational> {
    let d = s.dim();
    let mut coeffs = vec![Rational::zero(); 2 * d + 1];
    for (i, c) in s.center.coords().iter().enumerate() {
        let e = i + 1;
        // (t^e - c)^2 = t^{2e} - 2c t^e + c^2
        coeffs[2 * e] += Rational::one();
        coeffs[e] -= c * Rational::from_integer(BigInt::from(2));
        coeffs[0] += c * c;
    }
    coeffs[0] -= &s.squared_radius;
    coeffs
}
