//! Prime-field arithmetic and the canonical additive character.
//!
//! Moduli are small (at most 2^16), so every product of two reduced values
//! fits in a `u64` and primality is settled by trial division.

use std::f64::consts::TAU;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest accepted modulus.
pub const MAX_MODULUS: u32 = 1 << 16;

/// A prime modulus `q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct FieldModulus(u32);

impl FieldModulus {
    pub fn new(q: u32) -> Result<Self> {
        if q > MAX_MODULUS {
            return Err(Error::domain(format!(
                "modulus {q} exceeds the supported maximum {MAX_MODULUS}"
            )));
        }
        if !is_prime(q) {
            return Err(Error::domain(format!("modulus {q} is not prime")));
        }
        Ok(FieldModulus(q))
    }

    #[inline]
    pub fn get(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn scalar(self, value: u64) -> FieldScalar {
        FieldScalar {
            value: (value % self.0 as u64) as u32,
            modulus: self,
        }
    }

    /// Reduces an arbitrary signed integer into `[0, q)`.
    #[inline]
    pub fn reduce(self, value: i64) -> u32 {
        value.rem_euclid(self.0 as i64) as u32
    }

    #[inline]
    pub fn add(self, a: u32, b: u32) -> u32 {
        let s = a + b;
        if s >= self.0 {
            s - self.0
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            a + self.0 - b
        }
    }

    #[inline]
    pub fn mul(self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.0 as u64) as u32
    }

    #[inline]
    pub fn neg(self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.0 - a
        }
    }

    pub fn inv(self, a: u32) -> Result<u32> {
        let a = a % self.0;
        if a == 0 {
            return Err(Error::domain("inversion of zero"));
        }
        // extended Euclid on (a, q)
        let (mut r0, mut r1) = (self.0 as i64, a as i64);
        let (mut t0, mut t1) = (0i64, 1i64);
        while r1 != 0 {
            let quot = r0 / r1;
            (r0, r1) = (r1, r0 - quot * r1);
            (t0, t1) = (t1, t0 - quot * t1);
        }
        debug_assert_eq!(r0, 1);
        Ok(self.reduce(t0))
    }

    /// `inv[a]` for every nonzero `a`; entry 0 is unused and left at 0.
    pub fn inverse_table(self) -> Vec<u32> {
        let q = self.0 as usize;
        let mut table = vec![0u32; q];
        if q > 1 {
            table[1] = 1;
        }
        // inv(a) = -(q / a) * inv(q mod a)
        for a in 2..q {
            let prev = table[q % a];
            table[a] = self.neg(self.mul((q / a) as u32, prev));
        }
        table
    }
}

impl TryFrom<u32> for FieldModulus {
    type Error = Error;

    fn try_from(q: u32) -> Result<Self> {
        FieldModulus::new(q)
    }
}

impl From<FieldModulus> for u32 {
    fn from(q: FieldModulus) -> u32 {
        q.0
    }
}

impl fmt::Display for FieldModulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Deterministic trial division.
pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n % 2 == 0 {
        return false;
    }
    let mut p = 3u32;
    while p as u64 * p as u64 <= n as u64 {
        if n % p == 0 {
            return false;
        }
        p += 2;
    }
    true
}

/// An element of `F_q`, always reduced into `[0, q)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FieldScalar {
    value: u32,
    modulus: FieldModulus,
}

impl FieldScalar {
    pub fn new(value: u32, modulus: FieldModulus) -> Self {
        modulus.scalar(value as u64)
    }

    #[inline]
    pub fn value(self) -> u32 {
        self.value
    }

    #[inline]
    pub fn modulus(self) -> FieldModulus {
        self.modulus
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    pub fn inv(self) -> Result<FieldScalar> {
        Ok(FieldScalar {
            value: self.modulus.inv(self.value)?,
            modulus: self.modulus,
        })
    }

    #[inline]
    fn check(self, other: FieldScalar) {
        assert_eq!(
            self.modulus, other.modulus,
            "field scalars from different fields"
        );
    }
}

impl Add for FieldScalar {
    type Output = FieldScalar;

    fn add(self, rhs: FieldScalar) -> FieldScalar {
        self.check(rhs);
        FieldScalar {
            value: self.modulus.add(self.value, rhs.value),
            modulus: self.modulus,
        }
    }
}

impl Sub for FieldScalar {
    type Output = FieldScalar;

    fn sub(self, rhs: FieldScalar) -> FieldScalar {
        self.check(rhs);
        FieldScalar {
            value: self.modulus.sub(self.value, rhs.value),
            modulus: self.modulus,
        }
    }
}

impl Mul for FieldScalar {
    type Output = FieldScalar;

    fn mul(self, rhs: FieldScalar) -> FieldScalar {
        self.check(rhs);
        FieldScalar {
            value: self.modulus.mul(self.value, rhs.value),
            modulus: self.modulus,
        }
    }
}

impl Neg for FieldScalar {
    type Output = FieldScalar;

    fn neg(self) -> FieldScalar {
        FieldScalar {
            value: self.modulus.neg(self.value),
            modulus: self.modulus,
        }
    }
}

impl fmt::Display for FieldScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// A vector in `F_q^d`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point {
    modulus: FieldModulus,
    coords: Vec<u32>,
}

impl Point {
    pub fn new(modulus: FieldModulus, coords: Vec<u32>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::domain("a point needs at least one coordinate"));
        }
        if let Some(bad) = coords.iter().find(|&&c| c >= modulus.get()) {
            return Err(Error::domain(format!(
                "coordinate {bad} is not reduced modulo {modulus}"
            )));
        }
        Ok(Point { modulus, coords })
    }

    /// Reduces each coordinate instead of rejecting out-of-range values.
    pub fn reduced(modulus: FieldModulus, coords: &[i64]) -> Self {
        Point {
            modulus,
            coords: coords.iter().map(|&c| modulus.reduce(c)).collect(),
        }
    }

    pub fn zero(modulus: FieldModulus, dim: usize) -> Self {
        Point {
            modulus,
            coords: vec![0; dim],
        }
    }

    pub(crate) fn from_raw(modulus: FieldModulus, coords: Vec<u32>) -> Self {
        debug_assert!(coords.iter().all(|&c| c < modulus.get()));
        Point { modulus, coords }
    }

    pub fn modulus(&self) -> FieldModulus {
        self.modulus
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[u32] {
        &self.coords
    }

    pub fn coord(&self, i: usize) -> FieldScalar {
        FieldScalar {
            value: self.coords[i],
            modulus: self.modulus,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }

    pub fn scale(&self, t: u32) -> Point {
        let q = self.modulus;
        Point {
            modulus: q,
            coords: self.coords.iter().map(|&c| q.mul(c, t)).collect(),
        }
    }

    pub fn sub(&self, other: &Point) -> Point {
        assert_eq!(self.dim(), other.dim());
        let q = self.modulus;
        Point {
            modulus: q,
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(&a, &b)| q.sub(a, b))
                .collect(),
        }
    }

    pub fn add(&self, other: &Point) -> Point {
        assert_eq!(self.dim(), other.dim());
        let q = self.modulus;
        Point {
            modulus: q,
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(&a, &b)| q.add(a, b))
                .collect(),
        }
    }

    pub fn dot(&self, other: &Point) -> u32 {
        let q = self.modulus;
        self.coords
            .iter()
            .zip(&other.coords)
            .fold(0, |acc, (&a, &b)| q.add(acc, q.mul(a, b)))
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// `χ(a) = e^{2πia/q}` evaluated directly.
pub fn character(a: FieldScalar) -> Complex64 {
    let q = a.modulus().get() as f64;
    Complex64::from_polar(1.0, TAU * a.value() as f64 / q)
}

/// The `q` values of the additive character, precomputed.
#[derive(Clone, Debug)]
pub struct CharacterTable {
    modulus: FieldModulus,
    roots: Vec<Complex64>,
}

impl CharacterTable {
    pub fn new(modulus: FieldModulus) -> Self {
        let q = modulus.get();
        let roots = (0..q)
            .map(|a| character(FieldScalar::new(a, modulus)))
            .collect();
        CharacterTable { modulus, roots }
    }

    pub fn modulus(&self) -> FieldModulus {
        self.modulus
    }

    /// `χ(a)` for a reduced exponent `a`.
    #[inline]
    pub fn eval(&self, a: u32) -> Complex64 {
        self.roots[a as usize]
    }

    pub fn roots(&self) -> &[Complex64] {
        &self.roots
    }
}
