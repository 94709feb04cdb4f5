//! Exact sums of square roots.
//!
//! A [`RadicalSum`] stores `sum c_i * sqrt(s_i)` with rational `c_i` and integer radicands `s_i`.
//! Radicands are reduced to their squarefree kernel by trial division; anything left unfactored
//! above the trial bound is kept as a "loose" atom and merged with any other atom it is rationally
//! dependent on (`s * t` a perfect square). After that, distinct radicands have linearly
//! independent square roots over the rationals, so the sum is zero iff it has no terms.
//!
//! Signs of nonzero sums are found by interval evaluation, doubling the working precision until
//! the enclosure excludes zero or the configured cap is hit.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, AddAssign, Neg, Sub, SubAssign};
use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::{Integer, Roots};
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::rational::{ceil_div, floor_div, is_perfect_square, Rational};
use crate::error::{Error, Result};

/// Precision the interval refinement starts at.
pub const START_PRECISION_BITS: u32 = 64;
/// Default cap on the interval refinement precision.
pub const DEFAULT_PRECISION_CAP: u32 = 4096;
/// Default bound for trial division when extracting squarefree kernels.
pub const DEFAULT_TRIAL_BOUND: u32 = 1 << 16;

fn primes() -> &'static [u32] {
    static PRIMES: OnceLock<Vec<u32>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        let n = DEFAULT_TRIAL_BOUND as usize;
        let mut sieve = vec![true; n + 1];
        sieve[0] = false;
        sieve[1] = false;
        let mut i = 2;
        while i * i <= n {
            if sieve[i] {
                let mut j = i * i;
                while j <= n {
                    sieve[j] = false;
                    j += i;
                }
            }
            i += 1;
        }
        (0..=n).filter(|&i| sieve[i]).map(|i| i as u32).collect()
    })
}

/// Splits `n = f^2 * s`. The flag reports whether `s` is proven squarefree.
fn split_square(n: &BigUint, bound: u32) -> (BigUint, BigUint, bool) {
    if let Some(small) = n.to_u64() {
        let (f, s, ok) = split_square_u64(small, bound);
        return (BigUint::from(f), BigUint::from(s), ok);
    }
    split_square_big(n, bound)
}

fn split_square_big(n: &BigUint, bound: u32) -> (BigUint, BigUint, bool) {
    let mut rest = n.clone();
    let mut f = BigUint::one();
    let mut kernel = BigUint::one();
    let mut last = 1u64;
    for &p in primes().iter().take_while(|&&p| p <= bound) {
        let pb = BigUint::from(p);
        if rest.is_one() || &pb * &pb > rest {
            last = u64::MAX;
            break;
        }
        last = p as u64;
        let mut count = 0u32;
        loop {
            let (q, r) = rest.div_rem(&pb);
            if !r.is_zero() {
                break;
            }
            rest = q;
            count += 1;
        }
        for _ in 0..count / 2 {
            f *= &pb;
        }
        if count % 2 == 1 {
            kernel *= &pb;
        }
    }
    if rest.is_one() {
        return (f, kernel, true);
    }
    let root = rest.sqrt();
    if &root * &root == rest {
        return (f * root, kernel, false);
    }
    // Everything at or below `last` is divided out, so a remainder below last^2 is prime.
    let certified = last == u64::MAX || BigUint::from(last) * BigUint::from(last) > rest;
    (f, kernel * rest, certified)
}

fn split_square_u64(mut n: u64, bound: u32) -> (u64, u64, bool) {
    let mut f = 1u64;
    let mut kernel = 1u64;
    let mut last = 1u64;
    for &p in primes().iter().take_while(|&&p| p <= bound) {
        let p = p as u64;
        if n == 1 || p.saturating_mul(p) > n {
            last = u64::MAX;
            break;
        }
        last = p;
        let mut count = 0;
        while n.is_multiple_of(p) {
            n /= p;
            count += 1;
        }
        for _ in 0..count / 2 {
            f *= p;
        }
        if count % 2 == 1 {
            kernel *= p;
        }
    }
    if n == 1 {
        return (f, kernel, true);
    }
    let root = n.sqrt();
    if root * root == n {
        return (f * root, kernel, false);
    }
    // `last == u64::MAX` means trial division ran past sqrt(n): the remainder is prime.
    let certified = last == u64::MAX || (last as u128) * (last as u128) > n as u128;
    (f, kernel * n, certified)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct RadicalSum {
    /// radicand -> coefficient; radicand 1 holds the rational part.
    terms: BTreeMap<BigUint, Rational>,
    /// Radicands not proven squarefree.
    loose: BTreeSet<BigUint>,
}

impl RadicalSum {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_rational(q: Rational) -> Self {
        let mut out = Self::zero();
        out.insert(q, BigUint::one(), true);
        out
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(Rational::from_integer(BigInt::from(n)))
    }

    /// `sqrt(q)` for a nonnegative rational `q`.
    pub fn sqrt(q: &Rational) -> Result<Self> {
        Self::scaled_sqrt(&Rational::one(), q)
    }

    /// `c * sqrt(q)` for a nonnegative rational `q`.
    pub fn scaled_sqrt(c: &Rational, q: &Rational) -> Result<Self> {
        Self::scaled_sqrt_with_bound(c, q, DEFAULT_TRIAL_BOUND)
    }

    pub fn scaled_sqrt_with_bound(c: &Rational, q: &Rational, bound: u32) -> Result<Self> {
        if q.is_negative() {
            return Err(Error::Domain(format!("square root of negative {q}")));
        }
        let mut out = Self::zero();
        if q.is_zero() || c.is_zero() {
            return Ok(out);
        }
        // sqrt(a/b) = sqrt(a*b) / b
        let a = q.numer().magnitude();
        let b = q.denom().magnitude();
        let (f, s, certified) = split_square(&(a * b), bound.min(DEFAULT_TRIAL_BOUND));
        let coeff = c * Rational::new(BigInt::from(f), BigInt::from(b.clone()));
        out.insert(coeff, s, certified);
        Ok(out)
    }

    /// Builds a sum from raw `(coefficient, radicand)` pairs, canonicalising as it goes.
    pub fn from_pairs<'a, I>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a Rational, &'a Rational)>,
    {
        let mut out = Self::zero();
        for (c, q) in pairs {
            out += &Self::scaled_sqrt(c, q)?;
        }
        Ok(out)
    }

    fn insert(&mut self, coeff: Rational, radicand: BigUint, certified: bool) {
        if coeff.is_zero() {
            return;
        }
        if let Some(existing) = self.terms.get_mut(&radicand) {
            *existing += coeff;
            if existing.is_zero() {
                self.terms.remove(&radicand);
                self.loose.remove(&radicand);
            } else if certified {
                self.loose.remove(&radicand);
            }
            return;
        }
        if !radicand.is_one() && (!certified || !self.loose.is_empty()) {
            let partner = self
                .terms
                .keys()
                .filter(|e| !e.is_one() && (!certified || self.loose.contains(*e)))
                .find(|e| is_perfect_square(&(*e * &radicand)))
                .cloned();
            if let Some(e) = partner {
                // e = g*beta^2 and radicand = g*alpha^2 with g = gcd(e, radicand).
                let g = e.gcd(&radicand);
                let alpha = (&radicand / &g).sqrt();
                let beta = (&e / &g).sqrt();
                let e_coeff = self.terms.remove(&e).expect("partner is a key");
                let e_certified = !self.loose.remove(&e);
                let g_certified = certified || e_certified;
                self.insert(e_coeff * int(&beta), g.clone(), g_certified);
                self.insert(coeff * int(&alpha), g, g_certified);
                return;
            }
        }
        if !certified {
            self.loose.insert(radicand.clone());
        }
        self.terms.insert(radicand, coeff);
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The value as a rational, when it has no irrational part.
    pub fn as_rational(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&BigUint::one()).cloned(),
            _ => None,
        }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `(coefficient, radicand)` pairs in increasing radicand order.
    pub fn terms(&self) -> impl Iterator<Item = (&Rational, &BigUint)> {
        self.terms.iter().map(|(s, c)| (c, s))
    }

    pub fn scale(&self, k: &Rational) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(s, c)| (s.clone(), c * k)).collect(),
            loose: self.loose.clone(),
        }
    }

    pub fn scale_int(&self, k: u128) -> Self {
        self.scale(&Rational::from_integer(BigInt::from(k)))
    }

    /// Integer enclosure `[lo, hi]` of `value * 2^bits`.
    pub fn enclosure(&self, bits: u32) -> (BigInt, BigInt) {
        let mut lo = BigInt::zero();
        let mut hi = BigInt::zero();
        for (s, c) in &self.terms {
            let (n, d) = (c.numer(), c.denom());
            if s.is_one() {
                let v = n << bits;
                lo += floor_div(&v, d);
                hi += ceil_div(&v, d);
                continue;
            }
            let l = BigInt::from((s << (2 * bits)).sqrt());
            let u = &l + 1;
            let (a, b) = if n.is_positive() { (&l, &u) } else { (&u, &l) };
            lo += floor_div(&(n * a), d);
            hi += ceil_div(&(n * b), d);
        }
        (lo, hi)
    }

    /// Rational lower and upper bounds on the value with denominator `2^bits`.
    pub fn bounds(&self, bits: u32) -> (Rational, Rational) {
        let (lo, hi) = self.enclosure(bits);
        let scale = BigInt::one() << bits;
        (Rational::new(lo, scale.clone()), Rational::new(hi, scale))
    }

    /// Sign of the represented real number.
    pub fn signum(&self, cap_bits: u32) -> Result<Ordering> {
        if self.terms.is_empty() {
            return Ok(Ordering::Equal);
        }
        if let Some(q) = self.as_rational() {
            return Ok(q.cmp(&Rational::zero()));
        }
        if self.terms.len() == 2 {
            return Ok(self.two_term_sign());
        }
        let mut bits = START_PRECISION_BITS;
        loop {
            let (lo, hi) = self.enclosure(bits);
            if lo.is_positive() {
                return Ok(Ordering::Greater);
            }
            if hi.is_negative() {
                return Ok(Ordering::Less);
            }
            if bits >= cap_bits {
                return Err(Error::Indeterminate { bits });
            }
            bits = (bits * 2).min(cap_bits.max(START_PRECISION_BITS));
        }
    }

    /// Exact sign of `c1*sqrt(s1) + c2*sqrt(s2)` by comparing squares.
    fn two_term_sign(&self) -> Ordering {
        let mut it = self.terms.iter();
        let (s1, c1) = it.next().expect("two terms");
        let (s2, c2) = it.next().expect("two terms");
        let sign1 = c1.cmp(&Rational::zero());
        let sign2 = c2.cmp(&Rational::zero());
        if sign1 == sign2 {
            return sign1;
        }
        let sq1 = c1 * c1 * int(s1);
        let sq2 = c2 * c2 * int(s2);
        match sq1.cmp(&sq2) {
            Ordering::Greater => sign1,
            Ordering::Less => sign2,
            // Independent radicands make this unreachable for canonical sums.
            Ordering::Equal => Ordering::Equal,
        }
    }

    /// Approximate value for display only.
    pub fn to_f64(&self) -> f64 {
        let (lo, _) = self.bounds(64);
        super::rational::to_f64(&lo)
    }
}

fn int(n: &BigUint) -> Rational {
    Rational::from_integer(BigInt::from_biguint(Sign::Plus, n.clone()))
}

/// Exact ordering of two sums; `Equal` only when their difference is the empty sum.
pub fn compare_radical_sums(a: &RadicalSum, b: &RadicalSum, cap_bits: u32) -> Result<Ordering> {
    (a - b).signum(cap_bits)
}

impl AddAssign<&RadicalSum> for RadicalSum {
    fn add_assign(&mut self, rhs: &RadicalSum) {
        for (s, c) in &rhs.terms {
            self.insert(c.clone(), s.clone(), !rhs.loose.contains(s));
        }
    }
}

impl SubAssign<&RadicalSum> for RadicalSum {
    fn sub_assign(&mut self, rhs: &RadicalSum) {
        for (s, c) in &rhs.terms {
            self.insert(-c.clone(), s.clone(), !rhs.loose.contains(s));
        }
    }
}

impl Add<&RadicalSum> for &RadicalSum {
    type Output = RadicalSum;
    fn add(self, rhs: &RadicalSum) -> RadicalSum {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub<&RadicalSum> for &RadicalSum {
    type Output = RadicalSum;
    fn sub(self, rhs: &RadicalSum) -> RadicalSum {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Add for RadicalSum {
    type Output = RadicalSum;
    fn add(mut self, rhs: RadicalSum) -> RadicalSum {
        self += &rhs;
        self
    }
}

impl Sub for RadicalSum {
    type Output = RadicalSum;
    fn sub(mut self, rhs: RadicalSum) -> RadicalSum {
        self -= &rhs;
        self
    }
}

impl Add<&RadicalSum> for RadicalSum {
    type Output = RadicalSum;
    fn add(mut self, rhs: &RadicalSum) -> RadicalSum {
        self += rhs;
        self
    }
}

impl Sub<&RadicalSum> for RadicalSum {
    type Output = RadicalSum;
    fn sub(mut self, rhs: &RadicalSum) -> RadicalSum {
        self -= rhs;
        self
    }
}

impl Neg for &RadicalSum {
    type Output = RadicalSum;
    fn neg(self) -> RadicalSum {
        RadicalSum {
            terms: self.terms.iter().map(|(s, c)| (s.clone(), -c)).collect(),
            loose: self.loose.clone(),
        }
    }
}

impl Neg for RadicalSum {
    type Output = RadicalSum;
    fn neg(self) -> RadicalSum {
        -&self
    }
}

impl std::iter::Sum for RadicalSum {
    fn sum<I: Iterator<Item = RadicalSum>>(iter: I) -> Self {
        iter.fold(RadicalSum::zero(), |acc, x| acc + x)
    }
}

impl<'a> std::iter::Sum<&'a RadicalSum> for RadicalSum {
    fn sum<I: Iterator<Item = &'a RadicalSum>>(iter: I) -> Self {
        let mut acc = RadicalSum::zero();
        for x in iter {
            acc += x;
        }
        acc
    }
}

impl fmt::Display for RadicalSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (s, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if s.is_one() {
                write!(f, "{c}")?;
            } else {
                write!(f, "({c})*sqrt({s})")?;
            }
        }
        Ok(())
    }
}
