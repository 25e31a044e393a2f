//! The ambient space `F_q^d` and its dense mixed-radix layout.
//!
//! Every dense table in the crate (indicators, spectra, difference counts)
//! indexes points the same way: coordinate 1 is the most significant digit
//! in base `q`.

use std::fmt;

use crate::error::{Error, Result};
use crate::field::{FieldModulus, Point};

/// Default cap on `q^d` for dense tables.
pub const DEFAULT_SIZE_CAP: usize = 1 << 24;

#[derive(Clone, Copy, Debug)]
pub struct Space {
    modulus: FieldModulus,
    dim: usize,
    size: usize,
    cap: usize,
}

impl Space {
    pub fn new(modulus: FieldModulus, dim: usize) -> Result<Self> {
        Self::with_size_cap(modulus, dim, DEFAULT_SIZE_CAP)
    }

    pub fn with_size_cap(modulus: FieldModulus, dim: usize, cap: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::domain("dimension must be at least 1"));
        }
        let size = (modulus.get() as u128)
            .checked_pow(dim as u32)
            .unwrap_or(u128::MAX);
        if size > cap as u128 {
            return Err(Error::Resource {
                requested: size,
                cap,
            });
        }
        Ok(Space {
            modulus,
            dim,
            size: size as usize,
            cap,
        })
    }

    /// Convenience constructor from a raw modulus.
    pub fn of(q: u32, dim: usize) -> Result<Self> {
        Self::new(FieldModulus::new(q)?, dim)
    }

    #[inline]
    pub fn modulus(&self) -> FieldModulus {
        self.modulus
    }

    #[inline]
    pub fn q(&self) -> u32 {
        self.modulus.get()
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `q^d`.
    #[inline]
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn size_cap(&self) -> usize {
        self.cap
    }

    /// Same field, different dimension, same cap.
    pub fn with_dim(&self, dim: usize) -> Result<Space> {
        Space::with_size_cap(self.modulus, dim, self.cap)
    }

    /// Distance in the flat table between neighbours along `axis` (0-based).
    #[inline]
    pub fn stride(&self, axis: usize) -> usize {
        (self.q() as usize).pow((self.dim - 1 - axis) as u32)
    }

    #[inline]
    pub fn encode(&self, coords: &[u32]) -> usize {
        debug_assert_eq!(coords.len(), self.dim);
        let q = self.q() as usize;
        coords.iter().fold(0usize, |acc, &c| acc * q + c as usize)
    }

    #[inline]
    pub fn decode_into(&self, mut index: usize, out: &mut [u32]) {
        debug_assert_eq!(out.len(), self.dim);
        let q = self.q() as usize;
        for slot in out.iter_mut().rev() {
            *slot = (index % q) as u32;
            index /= q;
        }
    }

    pub fn decode(&self, index: usize) -> Vec<u32> {
        let mut out = vec![0; self.dim];
        self.decode_into(index, &mut out);
        out
    }

    pub fn point(&self, index: usize) -> Point {
        Point::from_raw(self.modulus, self.decode(index))
    }

    pub fn index_of(&self, p: &Point) -> Result<usize> {
        self.check_point(p)?;
        Ok(self.encode(p.coords()))
    }

    pub fn check_point(&self, p: &Point) -> Result<()> {
        if p.modulus() != self.modulus || p.dim() != self.dim {
            return Err(Error::domain(format!(
                "point {p} does not live in F_{}^{}",
                self.q(),
                self.dim
            )));
        }
        Ok(())
    }

    /// Index of `-x` for the point at `index`.
    pub fn negate_index(&self, index: usize) -> usize {
        let q = self.q() as usize;
        let (mut rest, mut out, mut place) = (index, 0usize, 1usize);
        for _ in 0..self.dim {
            let digit = rest % q;
            rest /= q;
            out += ((q - digit) % q) * place;
            place *= q;
        }
        out
    }

    /// Index of `x - y` given the decoded coordinates of both points.
    #[inline]
    pub fn diff_index(&self, x: &[u32], y: &[u32]) -> usize {
        let q = self.modulus;
        let qs = self.q() as usize;
        x.iter()
            .zip(y)
            .fold(0usize, |acc, (&a, &b)| acc * qs + q.sub(a, b) as usize)
    }
}

impl PartialEq for Space {
    fn eq(&self, other: &Space) -> bool {
        self.modulus == other.modulus && self.dim == other.dim
    }
}

impl Eq for Space {}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}^{}", self.q(), self.dim)
    }
}
