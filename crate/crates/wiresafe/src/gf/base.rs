//! Matrices over the base field GF(2).
//!
//! Rows are bit-packed into `u64` (bit j = column j, so `cols <= 63`),
//! which keeps GF(2) elimination to a handful of XORs and makes the
//! exhaustive matrix enumerations used by the audits cheap. The
//! [`expand`]/[`flatten`] pair moves between a GF(2^m) vector and its
//! GF(2) coefficient matrix; ranks of such expansions are "ranks over
//! the base field" throughout the crate.

use std::fmt;

use crate::budget::{pow_saturating, Budget};
use crate::error::{Error, Result};
use crate::gf::ext::ExtMatrix;
use crate::gf::{FieldElement, FieldSpec};

/// A rows x cols matrix over GF(2), one `u64` per row.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BaseMatrix {
    rows: usize,
    cols: usize,
    bits: Vec<u64>,
}

impl BaseMatrix {
    /// All-zero matrix. `cols` must stay below 64 (desk scale).
    pub fn new(rows: usize, cols: usize) -> Self {
        assert!(cols < 64, "BaseMatrix supports at most 63 columns");
        BaseMatrix { rows, cols, bits: vec![0; rows] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = BaseMatrix::new(n, n);
        for i in 0..n {
            m.bits[i] = 1 << i;
        }
        m
    }

    /// From bit-packed rows (bit j of `rows[i]` = entry (i, j)).
    pub fn from_bit_rows(bits: Vec<u64>, cols: usize) -> Self {
        assert!(cols < 64, "BaseMatrix supports at most 63 columns");
        for &r in &bits {
            assert_eq!(r >> cols, 0, "row has bits beyond the column count");
        }
        let rows = bits.len();
        BaseMatrix { rows, cols, bits }
    }

    /// From explicit 0/1 entries, row major.
    pub fn from_rows(rows: &[Vec<u8>]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        if cols >= 64 {
            return Err(Error::DimensionMismatch(
                "at most 63 columns supported".into(),
            ));
        }
        let mut bits = Vec::with_capacity(rows.len());
        for row in rows {
            if row.len() != cols {
                return Err(Error::DimensionMismatch("ragged rows".into()));
            }
            let mut packed = 0u64;
            for (j, &b) in row.iter().enumerate() {
                match b {
                    0 => {}
                    1 => packed |= 1 << j,
                    _ => {
                        return Err(Error::InvalidInput(format!(
                            "matrix entry {b} is not a bit"
                        )))
                    }
                }
            }
            bits.push(packed);
        }
        Ok(BaseMatrix { rows: rows.len(), cols, bits })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        assert!(i < self.rows && j < self.cols);
        (self.bits[i] >> j) & 1 == 1
    }

    pub fn set(&mut self, i: usize, j: usize, bit: bool) {
        assert!(i < self.rows && j < self.cols);
        if bit {
            self.bits[i] |= 1 << j;
        } else {
            self.bits[i] &= !(1 << j);
        }
    }

    /// Bit-packed row i.
    pub fn row_bits(&self, i: usize) -> u64 {
        self.bits[i]
    }

    /// Entries as 0/1 bytes, row major.
    pub fn to_bit_rows(&self) -> Vec<Vec<u8>> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j) as u8).collect())
            .collect()
    }

    pub fn transpose(&self) -> BaseMatrix {
        let mut t = BaseMatrix::new(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                if self.get(i, j) {
                    t.set(j, i, true);
                }
            }
        }
        t
    }

    /// Rank over GF(2).
    pub fn rank(&self) -> usize {
        let mut basis = XorBasis::new();
        for &r in &self.bits {
            basis.insert(r);
        }
        basis.rank()
    }

    /// Reduced row echelon form plus the pivot columns.
    pub fn row_echelon(&self) -> (BaseMatrix, Vec<usize>) {
        let mut bits = self.bits.clone();
        let mut pivots = Vec::new();
        let mut pr = 0usize;
        for c in 0..self.cols {
            if pr >= self.rows {
                break;
            }
            let Some(found) = (pr..self.rows).find(|&i| (bits[i] >> c) & 1 == 1) else {
                continue;
            };
            bits.swap(pr, found);
            let pivot_row = bits[pr];
            for (i, row) in bits.iter_mut().enumerate() {
                if i != pr && (*row >> c) & 1 == 1 {
                    *row ^= pivot_row;
                }
            }
            pivots.push(c);
            pr += 1;
        }
        (
            BaseMatrix { rows: self.rows, cols: self.cols, bits },
            pivots,
        )
    }

    /// Inverse of a square nonsingular matrix.
    pub fn invert(&self) -> Result<BaseMatrix> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch(
                "only square matrices can be inverted".into(),
            ));
        }
        let n = self.rows;
        // Augment [self | I] (fits: 2n <= 126 would overflow the u64 rows,
        // so run the elimination on parallel arrays instead).
        let mut left = self.bits.clone();
        let mut right: Vec<u64> = (0..n).map(|i| 1u64 << i).collect();
        let mut pr = 0usize;
        for c in 0..n {
            let Some(found) = (pr..n).find(|&i| (left[i] >> c) & 1 == 1) else {
                return Err(Error::Singular);
            };
            left.swap(pr, found);
            right.swap(pr, found);
            let (lp, rp) = (left[pr], right[pr]);
            for i in 0..n {
                if i != pr && (left[i] >> c) & 1 == 1 {
                    left[i] ^= lp;
                    right[i] ^= rp;
                }
            }
            pr += 1;
        }
        Ok(BaseMatrix { rows: n, cols: n, bits: right })
    }

    /// GF(2) matrix product.
    pub fn mul(&self, rhs: &BaseMatrix) -> Result<BaseMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} * {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = BaseMatrix::new(self.rows, rhs.cols);
        for i in 0..self.rows {
            let mut acc = 0u64;
            for l in 0..self.cols {
                if self.get(i, l) {
                    acc ^= rhs.bits[l];
                }
            }
            out.bits[i] = acc;
        }
        Ok(out)
    }

    /// Apply a GF(2) matrix to a vector of GF(2^m) packets: each output
    /// is the XOR of the selected inputs. This is exactly what a binary
    /// linear network code (or a wiretapper's `W = B X`) does.
    pub fn mul_ext_vector(&self, x: &[FieldElement]) -> Result<Vec<FieldElement>> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "matrix has {} columns, vector has {}",
                self.cols,
                x.len()
            )));
        }
        let spec = super::uniform_spec(x)?;
        let mut out = Vec::with_capacity(self.rows);
        for i in 0..self.rows {
            let mut acc = spec.zero();
            for (j, &xj) in x.iter().enumerate() {
                if self.get(i, j) {
                    acc += xj;
                }
            }
            out.push(acc);
        }
        Ok(out)
    }

    /// View this GF(2) matrix inside GF(2^m) (entries 0/1).
    pub fn embed(&self, spec: FieldSpec) -> ExtMatrix {
        ExtMatrix::from_fn(spec, self.rows, self.cols, |i, j| {
            if self.get(i, j) {
                spec.one()
            } else {
                spec.zero()
            }
        })
    }

    pub fn is_zero_row(&self, i: usize) -> bool {
        self.bits[i] == 0
    }
}

impl fmt::Display for BaseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols)
                .map(|j| if self.get(i, j) { "1" } else { "0" }.to_string())
                .collect();
            writeln!(f, "[{}]", row.join(" "))?;
        }
        Ok(())
    }
}

// ─── GF(2) linear span bookkeeping ──────────────────────────────────────────

/// Incremental GF(2) row basis keyed by leading bit.
#[derive(Debug, Clone)]
pub struct XorBasis {
    slots: [u64; 64],
    rank: usize,
}

impl Default for XorBasis {
    fn default() -> Self {
        Self::new()
    }
}

impl XorBasis {
    pub fn new() -> Self {
        XorBasis { slots: [0; 64], rank: 0 }
    }

    /// Reduce `v` against the basis; zero means dependent.
    pub fn reduce(&self, mut v: u64) -> u64 {
        while v != 0 {
            let lead = 63 - v.leading_zeros() as usize;
            if self.slots[lead] == 0 {
                return v;
            }
            v ^= self.slots[lead];
        }
        0
    }

    /// Insert `v`; returns whether the rank grew.
    pub fn insert(&mut self, v: u64) -> bool {
        let r = self.reduce(v);
        if r == 0 {
            return false;
        }
        let lead = 63 - r.leading_zeros() as usize;
        self.slots[lead] = r;
        self.rank += 1;
        true
    }

    pub fn rank(&self) -> usize {
        self.rank
    }
}

// ─── expand / flatten between GF(2^m)^n and GF(2)^(n x m) ───────────────────

/// Coefficient matrix of a GF(2^m) vector: row i holds the m bits of
/// v[i]. The rank of this matrix is the vector's rank over GF(2).
pub fn expand(v: &[FieldElement]) -> Result<BaseMatrix> {
    let spec = super::uniform_spec(v)?;
    let bits: Vec<u64> = v.iter().map(|e| e.coeffs()).collect();
    Ok(BaseMatrix::from_bit_rows(bits, spec.m() as usize))
}

/// Inverse of [`expand`]: rows of an n x m bit matrix back to elements.
pub fn flatten(mat: &BaseMatrix, spec: FieldSpec) -> Result<Vec<FieldElement>> {
    if mat.cols() != spec.m() as usize {
        return Err(Error::DimensionMismatch(format!(
            "matrix has {} columns but the field has degree {}",
            mat.cols(),
            spec.m()
        )));
    }
    (0..mat.rows()).map(|i| spec.element(mat.row_bits(i))).collect()
}

/// Rank of a GF(2^m) vector over GF(2) (rank of its [`expand`]).
pub fn rank_base(v: &[FieldElement]) -> Result<usize> {
    Ok(expand(v)?.rank())
}

// ─── exhaustive full-rank matrix enumeration ────────────────────────────────

/// Number of full-rank rows x cols matrices over GF(2):
/// prod_{i<rows} (2^cols - 2^i), saturating.
pub fn full_rank_count(rows: usize, cols: usize) -> u64 {
    full_rank_count_q(2, rows, cols)
}

/// The same count over GF(q): prod_{i<rows} (q^cols - q^i), saturating.
pub fn full_rank_count_q(q: u128, rows: usize, cols: usize) -> u64 {
    let pow = |e: u32| q.checked_pow(e).unwrap_or(u128::MAX);
    if rows > cols {
        return 0;
    }
    let total = pow(cols as u32);
    let mut acc: u128 = 1;
    for i in 0..rows {
        acc = acc.saturating_mul(total.saturating_sub(pow(i as u32)));
    }
    acc.min(u128::from(u64::MAX)) as u64
}

/// Stream every full-(row-)rank rows x cols matrix over GF(2), in
/// lexicographic order of the bit-packed row tuple. `rows = 0` yields
/// the single empty matrix. Gated on 2^(rows*cols) against the budget.
pub fn enumerate_full_rank(rows: usize, cols: usize, budget: &Budget) -> Result<FullRankIter> {
    if rows > cols {
        return Err(Error::DimensionMismatch(format!(
            "cannot have {rows} independent rows in GF(2)^{cols}"
        )));
    }
    if cols >= 64 {
        return Err(Error::DimensionMismatch(
            "at most 63 columns supported".into(),
        ));
    }
    budget.check_enumeration(pow_saturating(2, (rows * cols) as u32))?;
    Ok(FullRankIter {
        rows,
        cols,
        max: if cols == 0 { 0 } else { (1u64 << cols) - 1 },
        stack: Vec::with_capacity(rows),
        state: IterState::Fresh,
    })
}

#[derive(Debug)]
enum IterState {
    Fresh,
    Running,
    Done,
}

/// Backtracking enumerator behind [`enumerate_full_rank`].
#[derive(Debug)]
pub struct FullRankIter {
    rows: usize,
    cols: usize,
    max: u64,
    stack: Vec<u64>,
    state: IterState,
}

impl FullRankIter {
    /// Smallest row value > `after` independent of the current stack.
    fn next_independent(&self, after: u64) -> Option<u64> {
        let mut basis = XorBasis::new();
        for &r in &self.stack {
            basis.insert(r);
        }
        (after + 1..=self.max).find(|&v| basis.reduce(v) != 0)
    }

    fn fill_stack(&mut self) {
        while self.stack.len() < self.rows {
            let v = self
                .next_independent(0)
                .expect("an independent prefix in GF(2)^cols always extends while rows <= cols");
            self.stack.push(v);
        }
    }

    fn current(&self) -> BaseMatrix {
        BaseMatrix::from_bit_rows(self.stack.clone(), self.cols)
    }
}

impl Iterator for FullRankIter {
    type Item = BaseMatrix;

    fn next(&mut self) -> Option<BaseMatrix> {
        match self.state {
            IterState::Done => None,
            IterState::Fresh => {
                if self.rows == 0 {
                    self.state = IterState::Done;
                    return Some(BaseMatrix::new(0, self.cols));
                }
                self.state = IterState::Running;
                self.fill_stack();
                Some(self.current())
            }
            IterState::Running => {
                loop {
                    let Some(last) = self.stack.pop() else {
                        self.state = IterState::Done;
                        return None;
                    };
                    if let Some(v) = self.next_independent(last) {
                        self.stack.push(v);
                        break;
                    }
                }
                self.fill_stack();
                Some(self.current())
            }
        }
    }
}
