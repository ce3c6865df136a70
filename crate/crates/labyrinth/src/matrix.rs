//! Dense matrices with canonical residues, and exact Gauss–Jordan elimination
//! over prime moduli.
//!
//! Matrices are stored row-major. They represent both the arrows of the free
//! module category over the source ring and the linear maps of the target
//! vector-space category.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ring::RingSpec;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct ExactMatrix {
    ring: RingSpec,
    rows: usize,
    cols: usize,
    entries: Vec<u64>,
}

impl ExactMatrix {
    /// Builds a matrix from row-major entries, reducing each one.
    pub fn new(ring: RingSpec, rows: usize, cols: usize, entries: Vec<i64>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::Dim(format!(
                "{}x{} matrix needs {} entries, got {}",
                rows,
                cols,
                rows * cols,
                entries.len()
            )));
        }
        let entries = entries.into_iter().map(|v| ring.normalize(v)).collect();
        Ok(ExactMatrix { ring, rows, cols, entries })
    }

    pub fn from_rows(ring: RingSpec, rows: &[Vec<i64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Dim("ragged rows".into()));
        }
        let flat: Vec<i64> = rows.iter().flatten().copied().collect();
        ExactMatrix::new(ring, r, c, flat)
    }

    pub fn zeros(ring: RingSpec, rows: usize, cols: usize) -> Self {
        ExactMatrix { ring, rows, cols, entries: vec![0; rows * cols] }
    }

    pub fn identity(ring: RingSpec, n: usize) -> Self {
        let mut m = ExactMatrix::zeros(ring, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn ring(&self) -> RingSpec {
        self.ring
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[u64] {
        &self.entries
    }

    pub fn get(&self, r: usize, c: usize) -> u64 {
        debug_assert!(r < self.rows && c < self.cols);
        self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: u64) {
        debug_assert!(r < self.rows && c < self.cols);
        self.entries[r * self.cols + c] = self.ring.normalize_u64(v);
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&e| e == 0)
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols && *self == ExactMatrix::identity(self.ring, self.rows)
    }

    /// Re-reduces every entry; a no-op on well-formed values.
    pub fn renormalize(&self) -> Self {
        let entries = self.entries.iter().map(|&e| self.ring.normalize_u64(e)).collect();
        ExactMatrix { ring: self.ring, rows: self.rows, cols: self.cols, entries }
    }

    fn check_same_ring(&self, other: &ExactMatrix) -> Result<()> {
        if self.ring != other.ring {
            return Err(Error::RingMismatch(self.ring, other.ring));
        }
        Ok(())
    }

    /// Matrix product `self * other`.
    pub fn mul(&self, other: &ExactMatrix) -> Result<ExactMatrix> {
        self.check_same_ring(other)?;
        if self.cols != other.rows {
            return Err(Error::Dim(format!(
                "cannot compose {}x{} with {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let m = self.ring.modulus() as u128;
        let mut out = ExactMatrix::zeros(self.ring, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let cur = out.entries[i * other.cols + j] as u128;
                    let v = (cur + a as u128 * other.get(k, j) as u128) % m;
                    out.entries[i * other.cols + j] = v as u64;
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &ExactMatrix) -> Result<ExactMatrix> {
        self.check_same_ring(other)?;
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Dim("shape mismatch in sum".into()));
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(&a, &b)| self.ring.add(a, b))
            .collect();
        Ok(ExactMatrix { ring: self.ring, rows: self.rows, cols: self.cols, entries })
    }

    pub fn sub(&self, other: &ExactMatrix) -> Result<ExactMatrix> {
        self.check_same_ring(other)?;
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Dim("shape mismatch in difference".into()));
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(&a, &b)| self.ring.sub(a, b))
            .collect();
        Ok(ExactMatrix { ring: self.ring, rows: self.rows, cols: self.cols, entries })
    }

    pub fn add_assign(&mut self, other: &ExactMatrix) -> Result<()> {
        *self = self.add(other)?;
        Ok(())
    }

    pub fn sub_assign(&mut self, other: &ExactMatrix) -> Result<()> {
        *self = self.sub(other)?;
        Ok(())
    }

    pub fn neg(&self) -> ExactMatrix {
        let entries = self.entries.iter().map(|&a| self.ring.neg(a)).collect();
        ExactMatrix { ring: self.ring, rows: self.rows, cols: self.cols, entries }
    }

    pub fn scale(&self, c: i64) -> ExactMatrix {
        let c = self.ring.normalize(c);
        let entries = self.entries.iter().map(|&a| self.ring.mul(a, c)).collect();
        ExactMatrix { ring: self.ring, rows: self.rows, cols: self.cols, entries }
    }

    pub fn transpose(&self) -> ExactMatrix {
        let mut out = ExactMatrix::zeros(self.ring, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.entries[c * self.rows + r] = self.get(r, c);
            }
        }
        out
    }

    /// Horizontal concatenation; all blocks must share the row count.
    pub fn hstack(blocks: &[&ExactMatrix]) -> Result<ExactMatrix> {
        let first = blocks.first().ok_or_else(|| Error::Dim("hstack of nothing".into()))?;
        let rows = first.rows;
        let ring = first.ring;
        let mut cols = 0;
        for b in blocks {
            if b.ring != ring {
                return Err(Error::RingMismatch(ring, b.ring));
            }
            if b.rows != rows {
                return Err(Error::Dim(format!("row mismatch in hstack: {} vs {}", rows, b.rows)));
            }
            cols += b.cols;
        }
        let mut out = ExactMatrix::zeros(ring, rows, cols);
        let mut offset = 0;
        for b in blocks {
            for r in 0..rows {
                for c in 0..b.cols {
                    out.entries[r * cols + offset + c] = b.get(r, c);
                }
            }
            offset += b.cols;
        }
        Ok(out)
    }

    pub fn vstack(blocks: &[&ExactMatrix]) -> Result<ExactMatrix> {
        let first = blocks.first().ok_or_else(|| Error::Dim("vstack of nothing".into()))?;
        let cols = first.cols;
        let ring = first.ring;
        let mut rows = 0;
        for b in blocks {
            if b.ring != ring {
                return Err(Error::RingMismatch(ring, b.ring));
            }
            if b.cols != cols {
                return Err(Error::Dim(format!("column mismatch in vstack: {} vs {}", cols, b.cols)));
            }
            rows += b.rows;
        }
        let mut out = ExactMatrix::zeros(ring, rows, cols);
        let mut offset = 0;
        for b in blocks {
            out.entries[offset * cols..(offset + b.rows) * cols].copy_from_slice(&b.entries);
            offset += b.rows;
        }
        Ok(out)
    }

    pub fn block_diag(blocks: &[&ExactMatrix]) -> Result<ExactMatrix> {
        let first = blocks.first().ok_or_else(|| Error::Dim("block_diag of nothing".into()))?;
        let ring = first.ring;
        let rows: usize = blocks.iter().map(|b| b.rows).sum();
        let cols: usize = blocks.iter().map(|b| b.cols).sum();
        let mut out = ExactMatrix::zeros(ring, rows, cols);
        let (mut ro, mut co) = (0, 0);
        for b in blocks {
            if b.ring != ring {
                return Err(Error::RingMismatch(ring, b.ring));
            }
            for r in 0..b.rows {
                for c in 0..b.cols {
                    out.entries[(ro + r) * cols + co + c] = b.get(r, c);
                }
            }
            ro += b.rows;
            co += b.cols;
        }
        Ok(out)
    }

    /// Kronecker product, `(a.rows*b.rows) x (a.cols*b.cols)`.
    pub fn kron(&self, other: &ExactMatrix) -> Result<ExactMatrix> {
        self.check_same_ring(other)?;
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        let mut out = ExactMatrix::zeros(self.ring, rows, cols);
        for ra in 0..self.rows {
            for ca in 0..self.cols {
                let v = self.get(ra, ca);
                if v == 0 {
                    continue;
                }
                for rb in 0..other.rows {
                    for cb in 0..other.cols {
                        let w = self.ring.mul(v, other.get(rb, cb));
                        out.entries[(ra * other.rows + rb) * cols + ca * other.cols + cb] = w;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn column(&self, c: usize) -> Vec<u64> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn from_columns(ring: RingSpec, rows: usize, cols: &[Vec<u64>]) -> Result<ExactMatrix> {
        let mut out = ExactMatrix::zeros(ring, rows, cols.len());
        for (j, col) in cols.iter().enumerate() {
            if col.len() != rows {
                return Err(Error::Dim("column length mismatch".into()));
            }
            for (i, &v) in col.iter().enumerate() {
                out.set(i, j, v);
            }
        }
        Ok(out)
    }

    fn require_field(&self) -> Result<()> {
        if !self.ring.has_prime_modulus() {
            return Err(Error::NotAField(self.ring));
        }
        Ok(())
    }

    /// Reduced row-echelon form with pivot columns and rank.
    pub fn rref(&self) -> Result<Rref> {
        self.require_field()?;
        let ring = self.ring;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row >= m.rows {
                break;
            }
            let Some(pr) = (row..m.rows).find(|&r| m.get(r, col) != 0) else {
                continue;
            };
            if pr != row {
                for c in 0..m.cols {
                    let a = m.get(row, c);
                    let b = m.get(pr, c);
                    m.set(row, c, b);
                    m.set(pr, c, a);
                }
            }
            let inv = ring.inv(m.get(row, col))?;
            for c in 0..m.cols {
                m.set(row, c, ring.mul(m.get(row, c), inv));
            }
            for r in 0..m.rows {
                if r == row {
                    continue;
                }
                let f = m.get(r, col);
                if f == 0 {
                    continue;
                }
                for c in 0..m.cols {
                    let v = ring.sub(m.get(r, c), ring.mul(f, m.get(row, c)));
                    m.set(r, c, v);
                }
            }
            pivots.push(col);
            row += 1;
        }
        let rank = pivots.len();
        Ok(Rref { reduced: m, pivots, rank })
    }

    pub fn rank(&self) -> Result<usize> {
        Ok(self.rref()?.rank)
    }

    /// A basis of the kernel, one column per free variable.
    pub fn kernel_basis(&self) -> Result<ExactMatrix> {
        let Rref { reduced, pivots, .. } = self.rref()?;
        let ring = self.ring;
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut cols = Vec::with_capacity(free.len());
        for &fc in &free {
            let mut v = vec![0u64; self.cols];
            v[fc] = 1;
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = ring.neg(reduced.get(r, fc));
            }
            cols.push(v);
        }
        ExactMatrix::from_columns(ring, self.cols, &cols)
    }

    /// The pivot columns of the matrix itself: a basis of the column space.
    pub fn image_basis(&self) -> Result<ExactMatrix> {
        let Rref { pivots, .. } = self.rref()?;
        let cols: Vec<Vec<u64>> = pivots.iter().map(|&c| self.column(c)).collect();
        ExactMatrix::from_columns(self.ring, self.rows, &cols)
    }

    /// The reduced column-echelon basis of the column space: the canonical,
    /// reproducible choice used for cross-effect coordinates.
    pub fn column_echelon_basis(&self) -> Result<ExactMatrix> {
        let Rref { reduced, rank, .. } = self.transpose().rref()?;
        let cols: Vec<Vec<u64>> = (0..rank)
            .map(|r| (0..reduced.cols).map(|c| reduced.get(r, c)).collect())
            .collect();
        ExactMatrix::from_columns(self.ring, self.rows, &cols)
    }

    /// Solves `basis * x = target` column by column. Returns `None` when some
    /// target column is outside the span. The basis columns must be
    /// independent, so coordinates are unique.
    pub fn solve_in_basis(basis: &ExactMatrix, targets: &ExactMatrix) -> Result<Option<ExactMatrix>> {
        basis.check_same_ring(targets)?;
        if basis.rows != targets.rows {
            return Err(Error::Dim(format!(
                "ambient mismatch: basis has {} rows, target {}",
                basis.rows, targets.rows
            )));
        }
        let aug = ExactMatrix::hstack(&[basis, targets])?;
        let Rref { reduced, pivots, .. } = aug.rref()?;
        if pivots.iter().any(|&p| p >= basis.cols) {
            return Ok(None);
        }
        if pivots.len() != basis.cols {
            return Err(Error::Invariant("basis columns are not independent".into()));
        }
        let mut out = ExactMatrix::zeros(basis.ring, basis.cols, targets.cols);
        for r in 0..basis.cols {
            for c in 0..targets.cols {
                out.set(r, c, reduced.get(r, basis.cols + c));
            }
        }
        Ok(Some(out))
    }

    /// Coordinates of a single vector in the span of `basis`.
    pub fn coords_in_span(basis: &ExactMatrix, v: &[u64]) -> Result<Option<Vec<u64>>> {
        if v.len() != basis.rows {
            return Err(Error::Dim(format!(
                "vector of length {} against ambient dimension {}",
                v.len(),
                basis.rows
            )));
        }
        let col = ExactMatrix::from_columns(basis.ring, basis.rows, &[v.to_vec()])?;
        Ok(ExactMatrix::solve_in_basis(basis, &col)?.map(|m| m.column(0)))
    }

    pub fn inverse(&self) -> Result<ExactMatrix> {
        if self.rows != self.cols {
            return Err(Error::Dim("only square matrices can be inverted".into()));
        }
        let id = ExactMatrix::identity(self.ring, self.rows);
        ExactMatrix::solve_in_basis(self, &id)?
            .ok_or_else(|| Error::Invariant("matrix is singular".into()))
    }
}

/// Result of Gauss–Jordan elimination.
pub struct Rref {
    pub reduced: ExactMatrix,
    pub pivots: Vec<usize>,
    pub rank: usize,
}

impl fmt::Display for ExactMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[{}x{} over {}]", self.rows, self.cols, self.ring)?;
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|c| self.get(r, c).to_string()).collect();
            writeln!(f, "  [{}]", row.join(" "))?;
        }
        Ok(())
    }
}

/// Wire format: `{"ring":"zmod:4","rows":2,"cols":2,"entries":[...]}` with
/// row-major integer entries, normalized on load.
#[derive(Serialize, Deserialize)]
pub struct MatrixJson {
    pub ring: RingSpec,
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<i64>,
}

impl From<&ExactMatrix> for MatrixJson {
    fn from(m: &ExactMatrix) -> Self {
        MatrixJson {
            ring: m.ring,
            rows: m.rows,
            cols: m.cols,
            entries: m.entries.iter().map(|&e| e as i64).collect(),
        }
    }
}

impl TryFrom<MatrixJson> for ExactMatrix {
    type Error = Error;

    fn try_from(j: MatrixJson) -> Result<Self> {
        ExactMatrix::new(j.ring, j.rows, j.cols, j.entries)
    }
}

impl Serialize for ExactMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for ExactMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = MatrixJson::deserialize(d)?;
        ExactMatrix::try_from(j).map_err(serde::de::Error::custom)
    }
}
