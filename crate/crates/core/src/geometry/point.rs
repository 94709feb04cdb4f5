use std::fmt;

use num_traits::{Signed, Zero};

use super::rational::{pow, rat, Rational};
use crate::error::{Error, Result};

/// Smallest and largest supported ambient dimension.
pub const MIN_DIM: usize = 2;
pub const MAX_DIM: usize = 4;

/// A point with exact rational coordinates in dimension 2, 3 or 4.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point {
    coords: Vec<Rational>,
}

impl Point {
    pub fn new(coords: Vec<Rational>) -> Result<Self> {
        if !(MIN_DIM..=MAX_DIM).contains(&coords.len()) {
            return Err(Error::Dimension { got: coords.len(), expected: "2, 3 or 4".into() });
        }
        Ok(Self { coords })
    }

    pub fn from_ints(coords: &[i64]) -> Result<Self> {
        Self::new(coords.iter().map(|&c| rat(c)).collect())
    }

    pub fn xy(x: Rational, y: Rational) -> Self {
        Self { coords: vec![x, y] }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Rational] {
        &self.coords
    }

    pub fn x(&self) -> &Rational {
        &self.coords[0]
    }

    pub fn y(&self) -> &Rational {
        &self.coords[1]
    }

    pub fn check_dim(&self, other: &Point) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(self.dim(), other.dim()));
        }
        Ok(())
    }

    pub fn squared_distance(&self, other: &Point) -> Result<Rational> {
        self.check_dim(other)?;
        Ok(self.squared_distance_unchecked(other))
    }

    pub(crate) fn squared_distance_unchecked(&self, other: &Point) -> Rational {
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| {
                let d = a - b;
                &d * &d
            })
            .fold(Rational::zero(), |acc, x| acc + x)
    }

    pub fn squared_norm(&self) -> Rational {
        self.coords.iter().map(|c| c * c).fold(Rational::zero(), |acc, x| acc + x)
    }

    pub fn dot(&self, other: &Point) -> Rational {
        self.coords.iter().zip(&other.coords).map(|(a, b)| a * b).fold(Rational::zero(), |a, x| a + x)
    }

    pub fn sub(&self, other: &Point) -> Point {
        Point { coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a - b).collect() }
    }

    pub fn add(&self, other: &Point) -> Point {
        Point { coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a + b).collect() }
    }

    pub fn scale(&self, k: &Rational) -> Point {
        Point { coords: self.coords.iter().map(|a| a * k).collect() }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// The point `(t, t^2, ..., t^d)` on the moment curve.
pub fn moment_point(t: &Rational, d: usize) -> Result<Point> {
    if !(MIN_DIM..=MAX_DIM).contains(&d) {
        return Err(Error::Dimension { got: d, expected: "2, 3 or 4".into() });
    }
    if !t.is_positive() {
        return Err(Error::Domain(format!("moment curve parameter must be positive, got {t}")));
    }
    Point::new((1..=d as u32).map(|e| pow(t, e)).collect())
}
