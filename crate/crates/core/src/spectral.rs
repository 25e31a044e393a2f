//! Fourier transform of complex functions on `F_q^d`.
//!
//! `f̂(m) = q^{-d} Σ_x χ(-x·m) f(x)` is evaluated one axis at a time: the
//! character of a dot product factors into a product over coordinates, so
//! `d` passes of length-`q` transforms give the full sum in `O(d·q^{d+1})`.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{CharacterTable, Point};
use crate::space::Space;

// below this many entries the rayon overhead dominates
const PARALLEL_THRESHOLD: usize = 1 << 12;

/// A function `F_q^d → ℂ` stored densely in the global layout.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    space: Space,
    values: Vec<Complex64>,
}

/// Fourier coefficients `f̂(m)` for every `m`, same layout as the source.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    space: Space,
    values: Vec<Complex64>,
}

macro_rules! dense_table {
    ($ty:ident) => {
        impl $ty {
            pub fn zeros(space: Space) -> Self {
                $ty {
                    space,
                    values: vec![Complex64::new(0.0, 0.0); space.size()],
                }
            }

            pub fn from_values(space: Space, values: Vec<Complex64>) -> Result<Self> {
                if values.len() != space.size() {
                    return Err(Error::domain(format!(
                        "table has {} entries, {} needs {}",
                        values.len(),
                        space,
                        space.size()
                    )));
                }
                Ok($ty { space, values })
            }

            pub fn from_real(space: Space, values: &[f64]) -> Result<Self> {
                Self::from_values(
                    space,
                    values.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
                )
            }

            pub fn space(&self) -> Space {
                self.space
            }

            pub fn values(&self) -> &[Complex64] {
                &self.values
            }

            pub fn into_values(self) -> Vec<Complex64> {
                self.values
            }

            #[inline]
            pub fn get(&self, index: usize) -> Complex64 {
                self.values[index]
            }

            pub fn at(&self, p: &Point) -> Result<Complex64> {
                Ok(self.values[self.space.index_of(p)?])
            }

            /// Value at raw coordinates, which must already be reduced.
            #[inline]
            pub fn at_coords(&self, coords: &[u32]) -> Complex64 {
                self.values[self.space.encode(coords)]
            }

            pub fn len(&self) -> usize {
                self.values.len()
            }

            pub fn is_empty(&self) -> bool {
                self.values.is_empty()
            }
        }
    };
}

dense_table!(GridFunction);
dense_table!(Spectrum);

impl GridFunction {
    /// `αf + βg`, pointwise.
    pub fn combine(&self, alpha: Complex64, other: &GridFunction, beta: Complex64) -> Result<Self> {
        if self.space != other.space {
            return Err(Error::domain("functions live on different spaces"));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| alpha * a + beta * b)
            .collect();
        Ok(GridFunction {
            space: self.space,
            values,
        })
    }

    /// `Σ_x |f(x)|²`.
    pub fn l2_norm_sq(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum()
    }
}

impl Spectrum {
    pub fn l2_norm_sq(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum()
    }

    /// `max_{m≠0} |f̂(m)|`; zero for the one-point space.
    pub fn max_nonzero_magnitude(&self) -> f64 {
        self.values[1..]
            .iter()
            .map(|v| v.norm())
            .fold(0.0, f64::max)
    }
}

#[derive(Clone, Copy)]
enum Sign {
    Forward,
    Inverse,
}

fn transform_in_place(space: Space, data: &mut [Complex64], sign: Sign) {
    let q = space.q() as usize;
    let modulus = space.modulus();
    let chars = CharacterTable::new(modulus);
    let roots = chars.roots();
    let parallel = space.size() >= PARALLEL_THRESHOLD;

    for axis in 0..space.dim() {
        let inner = space.stride(axis);
        let block = q * inner;
        let pass = |chunk: &mut [Complex64]| {
            let scratch = chunk.to_vec();
            let row = |(a, out): (usize, &mut [Complex64])| {
                out.fill(Complex64::new(0.0, 0.0));
                for b in 0..q {
                    let ab = (a * b) % q;
                    let exponent = match sign {
                        Sign::Forward => modulus.neg(ab as u32),
                        Sign::Inverse => ab as u32,
                    };
                    let w = roots[exponent as usize];
                    let src = &scratch[b * inner..(b + 1) * inner];
                    for (o, s) in out.iter_mut().zip(src) {
                        *o += w * s;
                    }
                }
            };
            if parallel && inner >= 256 {
                chunk.par_chunks_mut(inner).enumerate().for_each(row);
            } else {
                chunk.chunks_mut(inner).enumerate().for_each(row);
            }
        };
        if parallel {
            data.par_chunks_mut(block).for_each(pass);
        } else {
            data.chunks_mut(block).for_each(pass);
        }
    }
}

/// `f̂(m) = q^{-d} Σ_x χ(-x·m) f(x)` for all `m`.
pub fn forward_transform(f: &GridFunction) -> Spectrum {
    let space = f.space;
    let mut values = f.values.clone();
    transform_in_place(space, &mut values, Sign::Forward);
    let scale = 1.0 / space.size() as f64;
    values.iter_mut().for_each(|v| *v *= scale);
    Spectrum { space, values }
}

/// `f(x) = Σ_m χ(x·m) f̂(m)`, the inverse of [`forward_transform`].
pub fn inverse_transform(spectrum: &Spectrum) -> GridFunction {
    let space = spectrum.space;
    let mut values = spectrum.values.clone();
    transform_in_place(space, &mut values, Sign::Inverse);
    GridFunction { space, values }
}

/// `|Σ_m |f̂(m)|² − q^{-d} Σ_x |f(x)|²|`.
pub fn plancherel_defect(f: &GridFunction) -> f64 {
    let spectral = forward_transform(f).l2_norm_sq();
    let physical = f.l2_norm_sq() / f.space.size() as f64;
    (spectral - physical).abs()
}
