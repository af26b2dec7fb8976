//! Dense integer grids and rows with zero-extension outside their windows.
//!
//! Every container here stores a finite rectangular window of exact integers
//! together with its origin, and answers lookups for *any* index pair: inside
//! the window the stored value is returned, outside it the value is exactly
//! zero. All downstream arithmetic (minor hierarchies, log-concavity scans,
//! identity checks) relies on that convention instead of bounds errors.
//!
//! Grids and rows are immutable after construction and all operations are
//! pure, so shared read access across worker threads is safe.

use num_bigint::BigInt;
use num_traits::Zero;
use std::io::{self, Write};
use std::sync::LazyLock;

static ZERO: LazyLock<BigInt> = LazyLock::new(BigInt::zero);

/// A rectangular window of arbitrary-precision integers, row-major,
/// zero-extended outside the window.
#[derive(Debug, Clone)]
pub struct BigGrid {
    origin_i: i64,
    origin_j: i64,
    rows: usize,
    cols: usize,
    values: Vec<BigInt>,
}

impl BigGrid {
    /// Builds a grid from a dense row-major table.
    ///
    /// Panics if `values.len() != rows * cols`.
    pub fn new(
        origin_i: i64,
        origin_j: i64,
        rows: usize,
        cols: usize,
        values: Vec<BigInt>,
    ) -> Self {
        assert_eq!(
            values.len(),
            rows * cols,
            "dense table must hold exactly rows * cols values"
        );
        BigGrid {
            origin_i,
            origin_j,
            rows,
            cols,
            values,
        }
    }

    pub fn from_fn(
        origin_i: i64,
        origin_j: i64,
        rows: usize,
        cols: usize,
        mut entry: impl FnMut(i64, i64) -> BigInt,
    ) -> Self {
        let mut values = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                values.push(entry(origin_i + r as i64, origin_j + c as i64));
            }
        }
        BigGrid {
            origin_i,
            origin_j,
            rows,
            cols,
            values,
        }
    }

    pub fn zeros(origin_i: i64, origin_j: i64, rows: usize, cols: usize) -> Self {
        BigGrid::new(
            origin_i,
            origin_j,
            rows,
            cols,
            vec![BigInt::zero(); rows * cols],
        )
    }

    pub fn ones(origin_i: i64, origin_j: i64, rows: usize, cols: usize) -> Self {
        BigGrid::new(
            origin_i,
            origin_j,
            rows,
            cols,
            vec![BigInt::from(1); rows * cols],
        )
    }

    /// Builds a single-row grid from a row sequence.
    pub fn from_row(i: i64, row: &RowSeq) -> Self {
        BigGrid::new(i, row.origin_j(), 1, row.len(), row.values().to_vec())
    }

    pub fn origin_i(&self) -> i64 {
        self.origin_i
    }

    pub fn origin_j(&self) -> i64 {
        self.origin_j
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Inclusive window bounds `(lo_i, hi_i, lo_j, hi_j)`, or `None` for an
    /// empty window.
    pub fn window(&self) -> Option<(i64, i64, i64, i64)> {
        if self.rows == 0 || self.cols == 0 {
            None
        } else {
            Some((
                self.origin_i,
                self.origin_i + self.rows as i64 - 1,
                self.origin_j,
                self.origin_j + self.cols as i64 - 1,
            ))
        }
    }

    /// The stored value inside the window, exact zero outside. Never fails.
    pub fn get(&self, i: i64, j: i64) -> &BigInt {
        if i < self.origin_i || j < self.origin_j {
            return &ZERO;
        }
        let (r, c) = ((i - self.origin_i) as u64, (j - self.origin_j) as u64);
        if r >= self.rows as u64 || c >= self.cols as u64 {
            return &ZERO;
        }
        &self.values[r as usize * self.cols + c as usize]
    }

    /// Copies row `i` of the window out as a `RowSeq` (empty if `i` lies
    /// outside the window).
    pub fn row(&self, i: i64) -> RowSeq {
        if i < self.origin_i || i >= self.origin_i + self.rows as i64 {
            return RowSeq::new(self.origin_j, Vec::new());
        }
        let r = (i - self.origin_i) as usize;
        RowSeq::new(
            self.origin_j,
            self.values[r * self.cols..(r + 1) * self.cols].to_vec(),
        )
    }

    /// Row-major iteration over the window: `(i, j, value)`.
    pub fn entries(&self) -> impl Iterator<Item = (i64, i64, &BigInt)> + '_ {
        (0..self.rows).flat_map(move |r| {
            (0..self.cols).map(move |c| {
                (
                    self.origin_i + r as i64,
                    self.origin_j + c as i64,
                    &self.values[r * self.cols + c],
                )
            })
        })
    }

    /// Extracts the window `[lo_i, hi_i] x [lo_j, hi_j]` as its own grid,
    /// zero-filling any part that lies outside this grid's window.
    pub fn subgrid(&self, lo_i: i64, hi_i: i64, lo_j: i64, hi_j: i64) -> BigGrid {
        let rows = (hi_i - lo_i + 1).max(0) as usize;
        let cols = (hi_j - lo_j + 1).max(0) as usize;
        BigGrid::from_fn(lo_i, lo_j, rows, cols, |i, j| self.get(i, j).clone())
    }

    /// Entrywise (Hadamard) product. The result window is the intersection of
    /// the two windows; everywhere else at least one factor is zero-extended,
    /// so the product is zero there by construction.
    pub fn hadamard(&self, other: &BigGrid) -> BigGrid {
        match (self.window(), other.window()) {
            (Some((ai0, ai1, aj0, aj1)), Some((bi0, bi1, bj0, bj1))) => {
                let lo_i = ai0.max(bi0);
                let hi_i = ai1.min(bi1);
                let lo_j = aj0.max(bj0);
                let hi_j = aj1.min(bj1);
                if lo_i > hi_i || lo_j > hi_j {
                    BigGrid::zeros(0, 0, 0, 0)
                } else {
                    BigGrid::from_fn(
                        lo_i,
                        lo_j,
                        (hi_i - lo_i + 1) as usize,
                        (hi_j - lo_j + 1) as usize,
                        |i, j| self.get(i, j) * other.get(i, j),
                    )
                }
            }
            _ => BigGrid::zeros(0, 0, 0, 0),
        }
    }

    /// Total bit length of all entries (the measure used by iteration
    /// budgets).
    pub fn total_bits(&self) -> u64 {
        self.values.iter().map(|v| v.bits()).sum()
    }

    /// Largest entry bit length in the window (0 for an empty window).
    pub fn max_bits(&self) -> u64 {
        self.values.iter().map(|v| v.bits()).max().unwrap_or(0)
    }

    pub fn cell_count(&self) -> usize {
        self.values.len()
    }

    /// Emits the window as CSV records `k,i,j,value` in row-major order.
    pub fn write_csv<W: Write>(&self, k: usize, mut out: W) -> io::Result<()> {
        writeln!(out, "k,i,j,value")?;
        for (i, j, v) in self.entries() {
            writeln!(out, "{k},{i},{j},{v}")?;
        }
        Ok(())
    }
}

/// Equality of the zero-extended functions, not of window shapes: two grids
/// compare equal when they agree at every index pair of the union of their
/// windows.
impl PartialEq for BigGrid {
    fn eq(&self, other: &Self) -> bool {
        let (lo_i, hi_i, lo_j, hi_j) = match (self.window(), other.window()) {
            (None, None) => return true,
            (Some(w), None) | (None, Some(w)) => w,
            (Some((ai0, ai1, aj0, aj1)), Some((bi0, bi1, bj0, bj1))) => {
                (ai0.min(bi0), ai1.max(bi1), aj0.min(bj0), aj1.max(bj1))
            }
        };
        for i in lo_i..=hi_i {
            for j in lo_j..=hi_j {
                if self.get(i, j) != other.get(i, j) {
                    return false;
                }
            }
        }
        true
    }
}

impl Eq for BigGrid {}

/// A finite dense integer sequence with an explicit start index and implicit
/// zeros outside `[origin_j, origin_j + len)`.
#[derive(Debug, Clone)]
pub struct RowSeq {
    origin_j: i64,
    values: Vec<BigInt>,
}

impl RowSeq {
    pub fn new(origin_j: i64, values: Vec<BigInt>) -> Self {
        RowSeq { origin_j, values }
    }

    /// Convenience constructor for machine-word entries.
    pub fn from_i64s(origin_j: i64, values: &[i64]) -> Self {
        RowSeq::new(origin_j, values.iter().map(|&v| BigInt::from(v)).collect())
    }

    pub fn origin_j(&self) -> i64 {
        self.origin_j
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Inclusive window bounds `(lo_j, hi_j)`, or `None` for an empty row.
    pub fn window(&self) -> Option<(i64, i64)> {
        if self.values.is_empty() {
            None
        } else {
            Some((self.origin_j, self.origin_j + self.values.len() as i64 - 1))
        }
    }

    pub fn get(&self, j: i64) -> &BigInt {
        if j < self.origin_j {
            return &ZERO;
        }
        match self.values.get((j - self.origin_j) as usize) {
            Some(v) => v,
            None => &ZERO,
        }
    }

    pub fn values(&self) -> &[BigInt] {
        &self.values
    }

    /// Iteration over the window: `(j, value)`.
    pub fn entries(&self) -> impl Iterator<Item = (i64, &BigInt)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(move |(c, v)| (self.origin_j + c as i64, v))
    }

    /// Entrywise product over the intersection window.
    pub fn hadamard(&self, other: &RowSeq) -> RowSeq {
        match (self.window(), other.window()) {
            (Some((a0, a1)), Some((b0, b1))) => {
                let lo = a0.max(b0);
                let hi = a1.min(b1);
                if lo > hi {
                    RowSeq::new(0, Vec::new())
                } else {
                    RowSeq::new(lo, (lo..=hi).map(|j| self.get(j) * other.get(j)).collect())
                }
            }
            _ => RowSeq::new(0, Vec::new()),
        }
    }

    /// Smallest index holding a negative entry, if any.
    pub fn first_negative(&self) -> Option<i64> {
        self.entries()
            .find(|(_, v)| v.sign() == num_bigint::Sign::Minus)
            .map(|(j, _)| j)
    }
}

/// Same convention as for grids: equality of zero-extended functions.
impl PartialEq for RowSeq {
    fn eq(&self, other: &Self) -> bool {
        let (lo, hi) = match (self.window(), other.window()) {
            (None, None) => return true,
            (Some(w), None) | (None, Some(w)) => w,
            (Some((a0, a1)), Some((b0, b1))) => (a0.min(b0), a1.max(b1)),
        };
        (lo..=hi).all(|j| self.get(j) == other.get(j))
    }
}

impl Eq for RowSeq {}
