//! Direction sets, Fourier spectra and incidence counts for subsets of the
//! vector space `F_q^d` over a prime field.
//!
//! The crate is organized bottom-up:
//!
//! * [`field`] and [`space`]: arithmetic in `F_q`, the additive character,
//!   and the dense mixed-radix layout shared by every table.
//! * [`spectral`]: the normalized Fourier transform on `F_q^d`.
//! * [`directions`]: canonical directions, `D(E)`, linear maps, `.fset` I/O.
//! * [`incidence`]: the slope-incidence count `ν_E(t)` by enumeration and
//!   by its spectral decomposition.
//! * [`salem`]: Salem constants, difference multiplicities, set generators.
//! * [`harness`]: verification campaigns and their CSV/JSON reports.

pub mod directions;
pub mod error;
pub mod field;
pub mod harness;
pub mod incidence;
pub mod registry;
pub mod rng;
pub mod salem;
pub mod space;
pub mod spectral;

pub use error::{Error, Result};
pub use field::{FieldModulus, FieldScalar, Point};
pub use space::Space;
