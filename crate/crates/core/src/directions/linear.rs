use crate::error::{Error, Result};
use crate::field::{FieldModulus, Point};

/// A square matrix over `F_q`, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldMatrix {
    modulus: FieldModulus,
    dim: usize,
    entries: Vec<u32>,
}

impl FieldMatrix {
    pub fn new(modulus: FieldModulus, rows: Vec<Vec<u32>>) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 || rows.iter().any(|r| r.len() != dim) {
            return Err(Error::domain("matrix must be square and nonempty"));
        }
        let entries: Vec<u32> = rows.into_iter().flatten().collect();
        if entries.iter().any(|&v| v >= modulus.get()) {
            return Err(Error::domain(format!("matrix entries must be < {modulus}")));
        }
        Ok(FieldMatrix {
            modulus,
            dim,
            entries,
        })
    }

    pub fn identity(modulus: FieldModulus, dim: usize) -> Self {
        let mut entries = vec![0; dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = 1;
        }
        FieldMatrix {
            modulus,
            dim,
            entries,
        }
    }

    /// Row `i` is the unit vector `e_{perm[i]}`, so `(Ax)_i = x_{perm[i]}`.
    pub fn permutation(modulus: FieldModulus, perm: &[usize]) -> Result<Self> {
        let dim = perm.len();
        let mut seen = vec![false; dim];
        for &p in perm {
            if p >= dim || std::mem::replace(&mut seen[p], true) {
                return Err(Error::domain("not a permutation"));
            }
        }
        let mut entries = vec![0; dim * dim];
        for (i, &p) in perm.iter().enumerate() {
            entries[i * dim + p] = 1;
        }
        Ok(FieldMatrix {
            modulus,
            dim,
            entries,
        })
    }

    pub fn modulus(&self) -> FieldModulus {
        self.modulus
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, row: usize, col: usize) -> u32 {
        self.entries[row * self.dim + col]
    }

    /// Rank by Gaussian elimination over `F_q`.
    pub fn rank(&self) -> usize {
        let q = self.modulus;
        let n = self.dim;
        let mut m = self.entries.clone();
        let mut rank = 0;
        for col in 0..n {
            let Some(pivot) = (rank..n).find(|&r| m[r * n + col] != 0) else {
                continue;
            };
            for k in 0..n {
                m.swap(pivot * n + k, rank * n + k);
            }
            let inv = q.inv(m[rank * n + col]).expect("pivot is nonzero");
            for k in 0..n {
                m[rank * n + k] = q.mul(m[rank * n + k], inv);
            }
            for r in 0..n {
                let factor = m[r * n + col];
                if r != rank && factor != 0 {
                    for k in 0..n {
                        let sub = q.mul(factor, m[rank * n + k]);
                        m[r * n + k] = q.sub(m[r * n + k], sub);
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    pub fn is_invertible(&self) -> bool {
        self.rank() == self.dim
    }

    pub(crate) fn apply_raw(&self, x: &[u32], out: &mut [u32]) {
        let q = self.modulus;
        for (i, slot) in out.iter_mut().enumerate() {
            let row = &self.entries[i * self.dim..(i + 1) * self.dim];
            *slot = row
                .iter()
                .zip(x)
                .fold(0, |acc, (&a, &b)| q.add(acc, q.mul(a, b)));
        }
    }

    pub fn apply(&self, x: &Point) -> Result<Point> {
        if x.modulus() != self.modulus || x.dim() != self.dim {
            return Err(Error::domain("vector does not match matrix"));
        }
        let mut out = vec![0; self.dim];
        self.apply_raw(x.coords(), &mut out);
        Point::new(self.modulus, out)
    }
}
