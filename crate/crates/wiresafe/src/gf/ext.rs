//! Matrices over the extension field GF(2^m).
//!
//! Dense row-major storage with textbook Gauss–Jordan elimination.
//! Everything in this crate is desk scale (a handful of rows and
//! columns), so clarity wins over cleverness: `rref` returns the
//! reduced form, the pivot columns, and the row transform that
//! produced it, and rank / inverse / kernel all derive from that.

use std::fmt;

use crate::error::{Error, Result};
use crate::gf::base::BaseMatrix;
use crate::gf::{uniform_spec, FieldElement, FieldSpec};

/// A rows x cols matrix over GF(2^m).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtMatrix {
    spec: FieldSpec,
    rows: usize,
    cols: usize,
    data: Vec<FieldElement>,
}

/// Output of [`ExtMatrix::rref`]: `transform * original = reduced`.
#[derive(Debug, Clone)]
pub struct Rref {
    pub reduced: ExtMatrix,
    pub pivot_cols: Vec<usize>,
    pub transform: ExtMatrix,
}

impl ExtMatrix {
    pub fn zero(spec: FieldSpec, rows: usize, cols: usize) -> Self {
        ExtMatrix { spec, rows, cols, data: vec![spec.zero(); rows * cols] }
    }

    pub fn identity(spec: FieldSpec, n: usize) -> Self {
        let mut m = ExtMatrix::zero(spec, n, n);
        for i in 0..n {
            m.set(i, i, spec.one());
        }
        m
    }

    /// Build entry-by-entry from a closure.
    pub fn from_fn(
        spec: FieldSpec,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> FieldElement,
    ) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                let e = f(i, j);
                assert_eq!(e.spec(), spec, "from_fn produced a foreign element");
                data.push(e);
            }
        }
        ExtMatrix { spec, rows, cols, data }
    }

    /// From explicit rows; must be nonempty, rectangular, single field.
    pub fn from_rows(rows: Vec<Vec<FieldElement>>) -> Result<Self> {
        let first = rows
            .first()
            .ok_or_else(|| Error::InvalidInput("matrix needs at least one row".into()))?;
        let cols = first.len();
        let mut flat = Vec::with_capacity(rows.len() * cols);
        for r in &rows {
            if r.len() != cols {
                return Err(Error::DimensionMismatch("ragged rows".into()));
            }
            flat.extend_from_slice(r);
        }
        let spec = uniform_spec(&flat)?;
        Ok(ExtMatrix { spec, rows: rows.len(), cols, data: flat })
    }

    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> FieldElement {
        assert!(i < self.rows && j < self.cols);
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, e: FieldElement) {
        assert!(i < self.rows && j < self.cols);
        assert_eq!(e.spec(), self.spec, "foreign element");
        self.data[i * self.cols + j] = e;
    }

    pub fn row(&self, i: usize) -> &[FieldElement] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> ExtMatrix {
        ExtMatrix::from_fn(self.spec, self.cols, self.rows, |i, j| self.get(j, i))
    }

    /// Matrix product over GF(2^m).
    pub fn mul(&self, rhs: &ExtMatrix) -> Result<ExtMatrix> {
        if self.spec != rhs.spec {
            return Err(Error::FieldMismatch);
        }
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} * {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = ExtMatrix::zero(self.spec, self.rows, rhs.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self.get(i, l);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let v = out.get(i, j) + a * rhs.get(l, j);
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    /// Matrix-vector product.
    pub fn mul_vec(&self, x: &[FieldElement]) -> Result<Vec<FieldElement>> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "matrix has {} columns, vector has {}",
                self.cols,
                x.len()
            )));
        }
        if !x.is_empty() && uniform_spec(x)? != self.spec {
            return Err(Error::FieldMismatch);
        }
        let mut out = Vec::with_capacity(self.rows);
        for i in 0..self.rows {
            let mut acc = self.spec.zero();
            for (j, &xj) in x.iter().enumerate() {
                acc += self.get(i, j) * xj;
            }
            out.push(acc);
        }
        Ok(out)
    }

    /// Product with a GF(2) matrix on the right: columns of the result
    /// are XOR combinations of this matrix's columns. Cheap and exact —
    /// no embedding required.
    pub fn mul_base(&self, t: &BaseMatrix) -> Result<ExtMatrix> {
        if t.rows() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} * {}x{}",
                self.rows,
                self.cols,
                t.rows(),
                t.cols()
            )));
        }
        let mut out = ExtMatrix::zero(self.spec, self.rows, t.cols());
        for i in 0..self.rows {
            for j in 0..t.cols() {
                let mut acc = self.spec.zero();
                for l in 0..self.cols {
                    if t.get(l, j) {
                        acc += self.get(i, l);
                    }
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }

    /// Stack `below` under `self` (same field, same column count).
    pub fn stack(&self, below: &ExtMatrix) -> Result<ExtMatrix> {
        if self.spec != below.spec {
            return Err(Error::FieldMismatch);
        }
        if self.cols != below.cols {
            return Err(Error::DimensionMismatch(format!(
                "stacking {} columns over {}",
                self.cols, below.cols
            )));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&below.data);
        Ok(ExtMatrix { spec: self.spec, rows: self.rows + below.rows, cols: self.cols, data })
    }

    /// Submatrix formed by the given columns, in the given order.
    pub fn columns(&self, idx: &[usize]) -> ExtMatrix {
        ExtMatrix::from_fn(self.spec, self.rows, idx.len(), |i, j| self.get(i, idx[j]))
    }

    /// Gauss–Jordan: reduced row echelon form, pivot columns, and the
    /// invertible row transform with `transform * self = reduced`.
    pub fn rref(&self) -> Rref {
        let mut red = self.clone();
        let mut tr = ExtMatrix::identity(self.spec, self.rows);
        let mut pivot_cols = Vec::new();
        let mut pr = 0usize;
        for c in 0..self.cols {
            if pr >= self.rows {
                break;
            }
            let Some(found) = (pr..self.rows).find(|&i| !red.get(i, c).is_zero()) else {
                continue;
            };
            red.swap_rows(pr, found);
            tr.swap_rows(pr, found);
            let inv = red
                .get(pr, c)
                .inverse()
                .expect("pivot is nonzero by construction");
            red.scale_row(pr, inv);
            tr.scale_row(pr, inv);
            for i in 0..self.rows {
                if i != pr {
                    let factor = red.get(i, c);
                    if !factor.is_zero() {
                        red.add_scaled_row(i, pr, factor);
                        tr.add_scaled_row(i, pr, factor);
                    }
                }
            }
            pivot_cols.push(c);
            pr += 1;
        }
        Rref { reduced: red, pivot_cols, transform: tr }
    }

    /// Rank over GF(2^m).
    pub fn rank(&self) -> usize {
        self.rref().pivot_cols.len()
    }

    /// Inverse of a square nonsingular matrix.
    pub fn invert(&self) -> Result<ExtMatrix> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch(
                "only square matrices can be inverted".into(),
            ));
        }
        let r = self.rref();
        if r.pivot_cols.len() != self.rows {
            return Err(Error::Singular);
        }
        Ok(r.transform)
    }

    /// Solve `self * x = rhs` for a square nonsingular system.
    pub fn solve(&self, rhs: &[FieldElement]) -> Result<Vec<FieldElement>> {
        self.invert()?.mul_vec(rhs)
    }

    /// Basis of the right kernel {v : self * v = 0}.
    pub fn kernel_basis(&self) -> Vec<Vec<FieldElement>> {
        let r = self.rref();
        let pivot_of_col: Vec<Option<usize>> = {
            let mut v = vec![None; self.cols];
            for (row, &col) in r.pivot_cols.iter().enumerate() {
                v[col] = Some(row);
            }
            v
        };
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if pivot_of_col[free].is_some() {
                continue;
            }
            let mut v = vec![self.spec.zero(); self.cols];
            v[free] = self.spec.one();
            for (row, &col) in r.pivot_cols.iter().enumerate() {
                // Characteristic 2: negation is identity.
                v[col] = r.reduced.get(row, free);
            }
            basis.push(v);
        }
        basis
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols && *self == ExtMatrix::identity(self.spec, self.rows)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn scale_row(&mut self, i: usize, factor: FieldElement) {
        for j in 0..self.cols {
            let v = self.get(i, j) * factor;
            self.set(i, j, v);
        }
    }

    /// row[i] += factor * row[src]
    fn add_scaled_row(&mut self, i: usize, src: usize, factor: FieldElement) {
        for j in 0..self.cols {
            let v = self.get(i, j) + factor * self.get(src, j);
            self.set(i, j, v);
        }
    }
}

impl fmt::Display for ExtMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|e| e.to_hex()).collect();
            writeln!(f, "[{}]", row.join(" "))?;
        }
        Ok(())
    }
}
