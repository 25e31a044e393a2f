use std::fmt;

use fixedbitset::FixedBitSet;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::Point;
use crate::space::Space;
use crate::spectral::GridFunction;

/// A subset `E ⊂ F_q^d` as a dense membership bitmap.
#[derive(Clone, PartialEq, Eq)]
pub struct PointSet {
    space: Space,
    members: FixedBitSet,
    cardinality: usize,
}

impl PointSet {
    pub fn empty(space: Space) -> Self {
        PointSet {
            space,
            members: FixedBitSet::with_capacity(space.size()),
            cardinality: 0,
        }
    }

    pub fn full(space: Space) -> Self {
        let mut members = FixedBitSet::with_capacity(space.size());
        members.insert_range(..);
        PointSet {
            space,
            members,
            cardinality: space.size(),
        }
    }

    /// Builds a set from layout indices; repeated indices collapse.
    pub fn from_indices(space: Space, indices: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut members = FixedBitSet::with_capacity(space.size());
        for i in indices {
            if i >= space.size() {
                return Err(Error::domain(format!("index {i} outside {space}")));
            }
            members.insert(i);
        }
        let cardinality = members.count_ones(..);
        Ok(PointSet {
            space,
            members,
            cardinality,
        })
    }

    pub fn from_points(space: Space, points: &[Point]) -> Result<Self> {
        let indices = points
            .iter()
            .map(|p| space.index_of(p))
            .collect::<Result<Vec<_>>>()?;
        Self::from_indices(space, indices)
    }

    pub fn space(&self) -> Space {
        self.space
    }

    /// `|E|`.
    pub fn len(&self) -> usize {
        self.cardinality
    }

    pub fn is_empty(&self) -> bool {
        self.cardinality == 0
    }

    pub fn contains_index(&self, index: usize) -> bool {
        self.members.contains(index)
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.space
            .index_of(p)
            .map(|i| self.members.contains(i))
            .unwrap_or(false)
    }

    /// Member indices in ascending layout order.
    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.ones()
    }

    pub fn points(&self) -> impl Iterator<Item = Point> + '_ {
        self.members.ones().map(|i| self.space.point(i))
    }

    /// Coordinates of all members, flattened `|E| × d` in ascending order.
    pub fn decoded(&self) -> Vec<u32> {
        let d = self.space.dim();
        let mut out = vec![0u32; self.cardinality * d];
        for (slot, i) in out.chunks_mut(d).zip(self.members.ones()) {
            self.space.decode_into(i, slot);
        }
        out
    }

    /// The indicator function `E(x)`.
    pub fn indicator(&self) -> GridFunction {
        let values = (0..self.space.size())
            .map(|i| {
                if self.members.contains(i) {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
            .collect();
        GridFunction::from_values(self.space, values).expect("length matches space")
    }

    /// `E + v`.
    pub fn translate(&self, shift: &Point) -> Result<PointSet> {
        self.space.check_point(shift)?;
        let indices: Vec<usize> = self
            .points()
            .map(|p| self.space.encode(p.add(shift).coords()))
            .collect();
        PointSet::from_indices(self.space, indices)
    }

    /// Pads every point with `dim − d` trailing zeros.
    pub fn embed(&self, target: Space) -> Result<PointSet> {
        if target.modulus() != self.space.modulus() || target.dim() < self.space.dim() {
            return Err(Error::domain(format!(
                "cannot embed {} into {target}",
                self.space
            )));
        }
        let factor = target.stride(self.space.dim() - 1);
        PointSet::from_indices(target, self.indices().map(|i| i * factor))
    }
}

impl fmt::Debug for PointSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PointSet")
            .field("space", &format_args!("{}", self.space))
            .field("len", &self.cardinality)
            .field("points", &self.points().map(|p| p.to_string()).collect::<Vec<_>>())
            .finish()
    }
}
