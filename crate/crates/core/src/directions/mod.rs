//! Directions in `F_q^d`: the quotient of nonzero vectors by `x ∼ tx`,
//! `t ∈ F_q^*`, and the set `D(E)` of directions spanned by differences of
//! distinct points of `E`.
//!
//! A direction is represented by the multiple of any of its vectors whose
//! first nonzero coordinate is 1. The zero vector has no direction.

mod fset;
mod linear;
mod pointset;

pub use fset::{parse_fset, read_fset, read_fset_file, to_fset_string, write_fset, write_fset_file};
pub use linear::FieldMatrix;
pub use pointset::PointSet;

use std::fmt;

use fixedbitset::FixedBitSet;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{FieldModulus, Point};
use crate::space::Space;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Direction {
    rep: Point,
}

impl Direction {
    /// Canonical representative: first nonzero coordinate is 1.
    pub fn rep(&self) -> &Point {
        &self.rep
    }

    pub fn into_rep(self) -> Point {
        self.rep
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.rep)
    }
}

pub fn canonical_direction(z: &Point) -> Result<Direction> {
    let q = z.modulus();
    let lead = z
        .coords()
        .iter()
        .copied()
        .find(|&c| c != 0)
        .ok_or_else(|| Error::domain("the zero vector determines no direction"))?;
    Ok(Direction {
        rep: z.scale(q.inv(lead)?),
    })
}

/// Normalizes `coords` in place so the first nonzero entry is 1. Returns
/// `false` for the zero vector.
#[inline]
pub(crate) fn normalize_in_place(q: FieldModulus, inverses: &[u32], coords: &mut [u32]) -> bool {
    let Some(lead) = coords.iter().position(|&c| c != 0) else {
        return false;
    };
    let t = inverses[coords[lead] as usize];
    coords[lead] = 1;
    for c in coords[lead + 1..].iter_mut() {
        *c = q.mul(*c, t);
    }
    true
}

/// A set of directions in a fixed ambient space, stored as a bitmap over
/// the layout index of each canonical representative.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirectionSet {
    space: Space,
    members: FixedBitSet,
}

impl DirectionSet {
    pub fn empty(space: Space) -> Self {
        DirectionSet {
            space,
            members: FixedBitSet::with_capacity(space.size()),
        }
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn len(&self) -> usize {
        self.members.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_clear()
    }

    pub fn insert(&mut self, d: &Direction) -> Result<()> {
        let index = self.space.index_of(d.rep())?;
        self.members.insert(index);
        Ok(())
    }

    pub fn contains(&self, d: &Direction) -> bool {
        self.space
            .index_of(d.rep())
            .map(|i| self.members.contains(i))
            .unwrap_or(false)
    }

    pub fn is_subset(&self, other: &DirectionSet) -> bool {
        self.space == other.space && self.members.is_subset(&other.members)
    }

    /// Directions in `self` missing from `other`.
    pub fn difference(&self, other: &DirectionSet) -> Vec<Direction> {
        self.members
            .difference(&other.members)
            .map(|i| self.direction_at(i))
            .collect()
    }

    /// Directions in ascending layout order of their representatives.
    pub fn iter(&self) -> impl Iterator<Item = Direction> + '_ {
        self.members.ones().map(|i| self.direction_at(i))
    }

    fn direction_at(&self, index: usize) -> Direction {
        Direction {
            rep: self.space.point(index),
        }
    }

    /// Image under an invertible linear map.
    pub fn map(&self, a: &FieldMatrix) -> Result<DirectionSet> {
        let mut out = DirectionSet::empty(self.space);
        for d in self.iter() {
            out.insert(&canonical_direction(&a.apply(d.rep())?)?)?;
        }
        Ok(out)
    }
}

/// `(q^d − 1)/(q − 1)`, the number of directions in `F_q^d`.
pub fn ambient_direction_count(q: u32, d: usize) -> u64 {
    (0..d).map(|i| (q as u64).pow(i as u32)).sum()
}

/// Every direction of `F_q^d`.
pub fn ambient_directions(space: Space) -> DirectionSet {
    coordinate_subspace_directions(space, space.dim()).expect("n = d is in range")
}

/// Directions inside the coordinate subspace spanned by the first `n` axes.
pub fn coordinate_subspace_directions(space: Space, n: usize) -> Result<DirectionSet> {
    if n == 0 || n > space.dim() {
        return Err(Error::domain(format!(
            "subspace dimension {n} outside 1..={}",
            space.dim()
        )));
    }
    let mut out = DirectionSet::empty(space);
    let q = space.q() as usize;
    let tail = space.stride(n - 1);
    // rep = (0,…,0,1,*,…,*,0,…,0) with the leading 1 at position `lead`
    for lead in 0..n {
        let lead_index = space.stride(lead);
        let free = q.pow((n - 1 - lead) as u32);
        for j in 0..free {
            out.members.insert(lead_index + j * tail);
        }
    }
    Ok(out)
}

/// `D(E)`: canonical directions of `x − y` over distinct `x, y ∈ E`.
pub fn direction_set(e: &PointSet) -> DirectionSet {
    let space = e.space();
    let q = space.modulus();
    let d = space.dim();
    let inverses = q.inverse_table();
    let coords = e.decoded();
    let n = e.len();

    let row = |i: usize, acc: &mut FixedBitSet, buf: &mut Vec<u32>| {
        let x = &coords[i * d..(i + 1) * d];
        for j in i + 1..n {
            let y = &coords[j * d..(j + 1) * d];
            buf.clear();
            buf.extend(x.iter().zip(y).map(|(&a, &b)| q.sub(a, b)));
            normalize_in_place(q, &inverses, buf);
            acc.insert(space.encode(buf));
        }
    };

    let members = if n >= 256 {
        (0..n)
            .into_par_iter()
            .fold(
                || (FixedBitSet::with_capacity(space.size()), Vec::with_capacity(d)),
                |(mut acc, mut buf), i| {
                    row(i, &mut acc, &mut buf);
                    (acc, buf)
                },
            )
            .map(|(acc, _)| acc)
            .reduce(
                || FixedBitSet::with_capacity(space.size()),
                |mut a, b| {
                    a.union_with(&b);
                    a
                },
            )
    } else {
        let mut acc = FixedBitSet::with_capacity(space.size());
        let mut buf = Vec::with_capacity(d);
        for i in 0..n {
            row(i, &mut acc, &mut buf);
        }
        acc
    };
    DirectionSet { space, members }
}

/// `{Ax : x ∈ E}` for invertible `A`.
pub fn apply_linear_map(e: &PointSet, a: &FieldMatrix) -> Result<PointSet> {
    let space = e.space();
    if a.modulus() != space.modulus() || a.dim() != space.dim() {
        return Err(Error::domain("matrix does not act on the ambient space"));
    }
    if !a.is_invertible() {
        return Err(Error::domain("linear map is singular"));
    }
    let mut indices = Vec::with_capacity(e.len());
    let mut out = vec![0u32; space.dim()];
    for coords in e.decoded().chunks(space.dim()) {
        a.apply_raw(coords, &mut out);
        indices.push(space.encode(&out));
    }
    PointSet::from_indices(space, indices)
}
