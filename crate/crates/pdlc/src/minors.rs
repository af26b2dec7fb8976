//! Determinants of contiguous minors and the level-by-level array hierarchy.
//!
//! For a kernel `K` and order `k`, the array entry at `(i, j)` is the
//! determinant of the k-by-k block `[K(i+r, j+s)]` for `r, s < k`; order 0 is
//! the empty determinant, identically 1, and order 1 is the kernel itself.
//!
//! Two independent evaluation routes are provided. [`pd_entry_direct`]
//! evaluates one entry from scratch by fraction-free elimination.
//! [`PdHierarchy::build`] produces whole rectangular windows of every order
//! up to a requested maximum using the three-term condensation recurrence
//!
//! ```text
//! D_{k+1}(i,j) * D_{k-1}(i+1,j+1)
//!     = D_k(i,j) * D_k(i+1,j+1) - D_k(i,j+1) * D_k(i+1,j)
//! ```
//!
//! dividing exactly when the order-(k-1) divisor is nonzero and falling back
//! to direct elimination when it vanishes. Because the recurrence is a
//! polynomial identity in the kernel entries, the division is exact for every
//! integer kernel; the build nevertheless verifies exactness on each division
//! and additionally cross-checks a deterministic sample of recurrence-derived
//! entries against direct elimination.

use crate::grid::BigGrid;
use crate::kernel::{Kernel, KernelDesc};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rayon::prelude::*;
use thiserror::Error;

/// Exact determinant by fraction-free (Bareiss) elimination with row
/// interchanges. The empty matrix has determinant 1; a singular column
/// prefix short-circuits to 0. Every interior division is exact and is
/// checked as such.
pub fn bareiss_determinant(matrix: &[Vec<BigInt>]) -> BigInt {
    let n = matrix.len();
    for row in matrix {
        assert_eq!(row.len(), n, "determinant requires a square matrix");
    }
    if n == 0 {
        return BigInt::one();
    }
    let mut a = matrix.to_owned();
    let mut negated = false;
    let mut prev = BigInt::one();
    for p in 0..n - 1 {
        if a[p][p].is_zero() {
            match (p + 1..n).find(|&r| !a[r][p].is_zero()) {
                Some(r) => {
                    a.swap(p, r);
                    negated = !negated;
                }
                None => return BigInt::zero(),
            }
        }
        for r in p + 1..n {
            for c in p + 1..n {
                let t = &a[p][p] * &a[r][c] - &a[r][p] * &a[p][c];
                let (q, rem) = t.div_rem(&prev);
                debug_assert!(rem.is_zero(), "fraction-free elimination divided inexactly");
                a[r][c] = q;
            }
            a[r][p] = BigInt::zero();
        }
        prev = a[p][p].clone();
    }
    let det = std::mem::take(&mut a[n - 1][n - 1]);
    if negated {
        -det
    } else {
        det
    }
}

/// One array entry evaluated from scratch: the determinant of the k-by-k
/// kernel block anchored at `(i, j)`.
pub fn pd_entry_direct(kernel: &Kernel, k: u64, i: i64, j: i64) -> BigInt {
    let n = k as usize;
    let block: Vec<Vec<BigInt>> = (0..n)
        .map(|r| {
            (0..n)
                .map(|s| kernel.entry(i + r as i64, j + s as i64))
                .collect()
        })
        .collect();
    bareiss_determinant(&block)
}

/// Closed form for the order-2 binomial-kernel array:
/// `C(i+1, j+1) * C(i+1, j) / (i+1)`, zero outside `0 <= j <= i`.
/// The division is exact; the quotient is a Narayana number.
pub fn narayana_closed_form(i: i64, j: i64) -> BigInt {
    if i < 0 || j < 0 || j > i {
        return BigInt::zero();
    }
    let n = (i + 1) as u64;
    let num = crate::kernel::binomial(n, j + 1) * crate::kernel::binomial(n, j);
    let (q, rem) = num.div_rem(&BigInt::from(n));
    debug_assert!(rem.is_zero(), "Narayana closed form divided inexactly");
    q
}

/// What to do if a condensation quotient fails to be an integer. This cannot
/// happen for integer kernels, but the arithmetic core refuses to assume so
/// silently.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DivisionPolicy {
    /// Abort the build with [`BuildError::InexactDivision`].
    Error,
    /// Recompute the offending entry by direct elimination and keep going.
    OracleFallback,
}

/// Knobs for [`PdHierarchy::build`].
#[derive(Debug, Clone)]
pub struct BuildOptions {
    /// Fraction of recurrence-derived entries to re-derive independently,
    /// selected by a deterministic hash of `(seed, k, i, j)`. `0.0` disables
    /// cross-checking, `1.0` re-derives everything.
    pub cross_check_fraction: f64,
    /// Seed for the cross-check sampler; same seed, same sample.
    pub seed: u64,
    /// Upper bound on the total number of materialized cells across all
    /// levels, enforced before any allocation.
    pub cell_budget: u64,
    /// Response to an inexact condensation quotient.
    pub on_inexact: DivisionPolicy,
}

pub const DEFAULT_CELL_BUDGET: u64 = 10_000_000;

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            cross_check_fraction: 0.01,
            seed: 0,
            cell_budget: DEFAULT_CELL_BUDGET,
            on_inexact: DivisionPolicy::OracleFallback,
        }
    }
}

/// Tallies of the exceptional paths taken during a build.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BuildStats {
    /// Entries recomputed directly because the condensation divisor was zero.
    pub fallback_entries: u64,
    /// Inexact condensation quotients encountered (always zero for integer
    /// kernels; tracked so a nonzero count is loud).
    pub inexact_divisions: u64,
    /// Recurrence-derived entries that were re-derived independently and
    /// matched.
    pub cross_checked: u64,
}

#[derive(Debug, Error)]
pub enum BuildError {
    #[error("window needs {required} cells, over the {budget}-cell budget")]
    WindowOverflow { required: u128, budget: u64 },
    #[error("condensation quotient at order {k}, entry ({i}, {j}) is not an integer")]
    InexactDivision { k: u64, i: i64, j: i64 },
    #[error(
        "cross-check mismatch at order {k}, entry ({i}, {j}): recurrence gave {got}, direct elimination gave {expected}"
    )]
    CrossCheckMismatch {
        k: u64,
        i: i64,
        j: i64,
        got: BigInt,
        expected: BigInt,
    },
}

/// All array orders `0..=k_max` over nested rectangular windows.
///
/// The order-`k_max` window is exactly `[0, i_max] x [0, j_max]`; each lower
/// order is over-allocated by one extra row and column per order step so the
/// condensation recurrence, and every consumer that looks at neighbours up to
/// one step outside the requested window, stays inside materialized data.
#[derive(Debug)]
pub struct PdHierarchy {
    levels: Vec<BigGrid>,
    kernel: KernelDesc,
    k_max: u64,
    i_max: i64,
    j_max: i64,
    stats: BuildStats,
}

impl PdHierarchy {
    /// Builds orders `0..=k_max` over `[0, i_max] x [0, j_max]` (plus the
    /// over-allocation margin on lower orders) by condensation.
    pub fn build(
        kernel: &Kernel,
        k_max: u64,
        i_max: i64,
        j_max: i64,
        options: &BuildOptions,
    ) -> Result<Self, BuildError> {
        assert!(
            i_max >= 0 && j_max >= 0,
            "window bounds must be non-negative"
        );
        Self::check_budget(k_max, i_max, j_max, options.cell_budget)?;

        let mut levels: Vec<BigGrid> = Vec::with_capacity(k_max as usize + 1);
        let mut stats = BuildStats::default();
        for k in 0..=k_max {
            let margin = (k_max - k) as i64;
            let rows = (i_max + margin + 1) as usize;
            let cols = (j_max + margin + 1) as usize;
            let level = match k {
                0 => BigGrid::ones(0, 0, rows, cols),
                1 => BigGrid::from_fn(0, 0, rows, cols, |i, j| kernel.entry(i, j)),
                _ => condense_level(
                    kernel,
                    k,
                    &levels[k as usize - 1],
                    &levels[k as usize - 2],
                    rows,
                    cols,
                    options,
                    &mut stats,
                )?,
            };
            levels.push(level);
        }
        Ok(PdHierarchy {
            levels,
            kernel: kernel.describe(),
            k_max,
            i_max,
            j_max,
            stats,
        })
    }

    /// Builds the same windows as [`PdHierarchy::build`] but derives every
    /// entry of every order independently by direct elimination. Slower by
    /// design; serves as the reference implementation.
    pub fn build_direct(
        kernel: &Kernel,
        k_max: u64,
        i_max: i64,
        j_max: i64,
        cell_budget: u64,
    ) -> Result<Self, BuildError> {
        assert!(
            i_max >= 0 && j_max >= 0,
            "window bounds must be non-negative"
        );
        Self::check_budget(k_max, i_max, j_max, cell_budget)?;

        let mut levels = Vec::with_capacity(k_max as usize + 1);
        for k in 0..=k_max {
            let margin = (k_max - k) as i64;
            let rows = (i_max + margin + 1) as usize;
            let cols = (j_max + margin + 1) as usize;
            let values: Vec<Vec<BigInt>> = (0..rows as i64)
                .into_par_iter()
                .map(|i| {
                    (0..cols as i64)
                        .map(|j| pd_entry_direct(kernel, k, i, j))
                        .collect()
                })
                .collect();
            levels.push(BigGrid::new(
                0,
                0,
                rows,
                cols,
                values.into_iter().flatten().collect(),
            ));
        }
        Ok(PdHierarchy {
            levels,
            kernel: kernel.describe(),
            k_max,
            i_max,
            j_max,
            stats: BuildStats::default(),
        })
    }

    fn check_budget(k_max: u64, i_max: i64, j_max: i64, budget: u64) -> Result<(), BuildError> {
        let mut required: u128 = 0;
        for k in 0..=k_max {
            let margin = (k_max - k) as u128;
            required += (i_max as u128 + margin + 1) * (j_max as u128 + margin + 1);
        }
        if required > budget as u128 {
            return Err(BuildError::WindowOverflow { required, budget });
        }
        Ok(())
    }

    pub fn k_max(&self) -> u64 {
        self.k_max
    }

    /// Identity of the kernel this hierarchy was built from.
    pub fn kernel(&self) -> &KernelDesc {
        &self.kernel
    }

    pub fn i_max(&self) -> i64 {
        self.i_max
    }

    pub fn j_max(&self) -> i64 {
        self.j_max
    }

    pub fn stats(&self) -> &BuildStats {
        &self.stats
    }

    /// The full materialized window at order `k`, over-allocation included.
    pub fn level(&self, k: u64) -> &BigGrid {
        &self.levels[k as usize]
    }

    /// The entry at order `k`, position `(i, j)`. Negative `i` or `j` is zero
    /// by convention; reads past the materialized window panic rather than
    /// silently yielding a wrong zero.
    pub fn entry(&self, k: u64, i: i64, j: i64) -> &BigInt {
        assert!(
            k <= self.k_max,
            "order {k} exceeds built maximum {}",
            self.k_max
        );
        let level = &self.levels[k as usize];
        if i >= 0 && j >= 0 {
            let (hi_i, hi_j) = (level.rows() as i64 - 1, level.cols() as i64 - 1);
            assert!(
                i <= hi_i && j <= hi_j,
                "entry ({i}, {j}) at order {k} lies outside the materialized window [0, {hi_i}] x [0, {hi_j}]"
            );
        }
        level.get(i, j)
    }

    /// Largest entry magnitude in bits across all materialized levels.
    pub fn max_bits(&self) -> u64 {
        self.levels.iter().map(BigGrid::max_bits).max().unwrap_or(0)
    }

    /// Total materialized cells across all levels.
    pub fn cell_count(&self) -> u64 {
        self.levels.iter().map(|g| g.cell_count() as u64).sum()
    }
}

/// Splitmix64 finalizer; drives the deterministic cross-check sampler.
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Platform-independent decision: cross-check entry `(k, i, j)` under `seed`?
fn sampled(fraction: f64, seed: u64, k: u64, i: i64, j: i64) -> bool {
    if fraction <= 0.0 {
        return false;
    }
    if fraction >= 1.0 {
        return true;
    }
    let h = mix64(seed ^ mix64(k ^ mix64((i as u64) ^ mix64(j as u64))));
    (h as f64) < fraction * (u64::MAX as f64)
}

/// Exact quotient, or `None` if the division leaves a remainder.
fn exact_div(num: &BigInt, den: &BigInt) -> Option<BigInt> {
    let (q, rem) = num.div_rem(den);
    if rem.is_zero() {
        Some(q)
    } else {
        None
    }
}

#[derive(Default)]
struct RowTally {
    fallback: u64,
    inexact: u64,
    checked: u64,
}

/// One order step of the condensation recurrence over a full window, rows in
/// parallel. `upper` is order `k-1`, `lower` is order `k-2`; both extend at
/// least one row and column past the window being produced.
#[allow(clippy::too_many_arguments)]
fn condense_level(
    kernel: &Kernel,
    k: u64,
    upper: &BigGrid,
    lower: &BigGrid,
    rows: usize,
    cols: usize,
    options: &BuildOptions,
    stats: &mut BuildStats,
) -> Result<BigGrid, BuildError> {
    let row_results: Vec<Result<(Vec<BigInt>, RowTally), BuildError>> = (0..rows as i64)
        .into_par_iter()
        .map(|i| {
            let mut row = Vec::with_capacity(cols);
            let mut tally = RowTally::default();
            for j in 0..cols as i64 {
                let den = lower.get(i + 1, j + 1);
                let value = if den.is_zero() {
                    tally.fallback += 1;
                    pd_entry_direct(kernel, k, i, j)
                } else {
                    let num = upper.get(i, j) * upper.get(i + 1, j + 1)
                        - upper.get(i, j + 1) * upper.get(i + 1, j);
                    match exact_div(&num, den) {
                        Some(q) => {
                            if sampled(options.cross_check_fraction, options.seed, k, i, j) {
                                let expected = pd_entry_direct(kernel, k, i, j);
                                if q != expected {
                                    return Err(BuildError::CrossCheckMismatch {
                                        k,
                                        i,
                                        j,
                                        got: q,
                                        expected,
                                    });
                                }
                                tally.checked += 1;
                            }
                            q
                        }
                        None => match options.on_inexact {
                            DivisionPolicy::Error => {
                                return Err(BuildError::InexactDivision { k, i, j })
                            }
                            DivisionPolicy::OracleFallback => {
                                tally.inexact += 1;
                                pd_entry_direct(kernel, k, i, j)
                            }
                        },
                    }
                };
                row.push(value);
            }
            Ok((row, tally))
        })
        .collect();

    let mut values = Vec::with_capacity(rows * cols);
    for result in row_results {
        let (row, tally) = result?;
        stats.fallback_entries += tally.fallback;
        stats.inexact_divisions += tally.inexact;
        stats.cross_checked += tally.checked;
        values.extend(row);
    }
    Ok(BigGrid::new(0, 0, rows, cols, values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{binomial, Kernel, TableKernel};
    use num_traits::Signed;
    use proptest::prelude::*;

    /// Independent oracle: recursive cofactor expansion along the first row.
    fn laplace_det(m: &[Vec<BigInt>]) -> BigInt {
        let n = m.len();
        if n == 0 {
            return BigInt::one();
        }
        if n == 1 {
            return m[0][0].clone();
        }
        let mut det = BigInt::zero();
        for (c, pivot) in m[0].iter().enumerate() {
            if pivot.is_zero() {
                continue;
            }
            let minor: Vec<Vec<BigInt>> = m[1..]
                .iter()
                .map(|row| {
                    row.iter()
                        .enumerate()
                        .filter(|&(cc, _)| cc != c)
                        .map(|(_, v)| v.clone())
                        .collect()
                })
                .collect();
            let term = pivot * laplace_det(&minor);
            if c % 2 == 0 {
                det += term;
            } else {
                det -= term;
            }
        }
        det
    }

    fn mat(rows: &[&[i64]]) -> Vec<Vec<BigInt>> {
        rows.iter()
            .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
            .collect()
    }

    #[test]
    fn bareiss_examples() {
        assert_eq!(bareiss_determinant(&mat(&[])), BigInt::one());
        assert_eq!(bareiss_determinant(&mat(&[&[-7]])), BigInt::from(-7));
        assert_eq!(
            bareiss_determinant(&mat(&[&[4, 6], &[5, 10]])),
            BigInt::from(10)
        );
        assert_eq!(
            bareiss_determinant(&mat(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]])),
            BigInt::one()
        );
        assert_eq!(
            bareiss_determinant(&mat(&[&[4, 6, 4], &[5, 10, 10], &[6, 15, 20]])),
            BigInt::from(20)
        );
    }

    #[test]
    fn bareiss_handles_zero_pivots() {
        assert_eq!(
            bareiss_determinant(&mat(&[&[0, 1], &[1, 0]])),
            BigInt::from(-1)
        );
        assert_eq!(
            bareiss_determinant(&mat(&[&[0, 0], &[0, 0]])),
            BigInt::zero()
        );
        assert_eq!(
            bareiss_determinant(&mat(&[&[0, 2, 1], &[3, 0, 0], &[0, 0, 5]])),
            BigInt::from(-30)
        );
        // Singular despite nonzero entries everywhere.
        assert_eq!(
            bareiss_determinant(&mat(&[&[1, 2, 3], &[2, 4, 6], &[7, 8, 9]])),
            BigInt::zero()
        );
    }

    proptest! {
        #[test]
        fn bareiss_matches_cofactor_expansion(
            n in 0usize..=4,
            seed in proptest::collection::vec(-9i64..=9, 16),
        ) {
            let m: Vec<Vec<BigInt>> = (0..n)
                .map(|r| (0..n).map(|c| BigInt::from(seed[r * 4 + c])).collect())
                .collect();
            prop_assert_eq!(bareiss_determinant(&m), laplace_det(&m));
        }
    }

    #[test]
    fn direct_entries_match_known_values() {
        let kernel = Kernel::pascal();
        // Order 0 is identically 1, even far outside the triangle.
        assert_eq!(pd_entry_direct(&kernel, 0, 3, 9), BigInt::one());
        // Order 1 is the kernel itself.
        assert_eq!(pd_entry_direct(&kernel, 1, 5, 2), BigInt::from(10));
        // Orders 2 and 3 around the row-4 window.
        let row4_order2: Vec<i64> = vec![1, 10, 20, 10, 1];
        let row4_order3: Vec<i64> = vec![1, 20, 50, 20, 1];
        for j in 0..5i64 {
            assert_eq!(
                pd_entry_direct(&kernel, 2, 4, j),
                BigInt::from(row4_order2[j as usize])
            );
            assert_eq!(
                pd_entry_direct(&kernel, 3, 4, j),
                BigInt::from(row4_order3[j as usize])
            );
        }
    }

    #[test]
    fn direct_entries_vanish_outside_triangle() {
        let kernel = Kernel::pascal();
        for k in 1..=4u64 {
            for i in 0..=8i64 {
                for j in -2..=i + 4 {
                    if j < 0 || j > i {
                        assert_eq!(
                            pd_entry_direct(&kernel, k, i, j),
                            BigInt::zero(),
                            "order {k} at ({i}, {j})"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn first_column_is_normalized() {
        let kernel = Kernel::pascal();
        for k in 0..=5u64 {
            for i in 0..=12i64 {
                assert_eq!(
                    pd_entry_direct(&kernel, k, i, 0),
                    BigInt::one(),
                    "order {k} row {i}"
                );
            }
        }
    }

    #[test]
    fn narayana_values() {
        assert_eq!(narayana_closed_form(4, 0), BigInt::from(1));
        assert_eq!(narayana_closed_form(4, 1), BigInt::from(10));
        assert_eq!(narayana_closed_form(4, 2), BigInt::from(20));
        assert_eq!(narayana_closed_form(4, 5), BigInt::zero());
        assert_eq!(narayana_closed_form(3, -1), BigInt::zero());
        assert_eq!(narayana_closed_form(-2, 0), BigInt::zero());
        // Row i of the order-2 array sums to the Catalan number C(i+1).
        let catalan = [1i64, 1, 2, 5, 14, 42, 132, 429, 1430];
        for i in 0..catalan.len() as i64 - 1 {
            let sum: BigInt = (0..=i).map(|j| narayana_closed_form(i, j)).sum();
            assert_eq!(sum, BigInt::from(catalan[i as usize + 1]), "row {i}");
        }
    }

    #[test]
    fn narayana_matches_order_two_minors() {
        let kernel = Kernel::pascal();
        for i in 0..=12i64 {
            for j in 0..=i {
                assert_eq!(
                    narayana_closed_form(i, j),
                    pd_entry_direct(&kernel, 2, i, j)
                );
            }
        }
    }

    #[test]
    fn hierarchy_matches_direct_everywhere() {
        let kernel = Kernel::pascal();
        let options = BuildOptions {
            cross_check_fraction: 1.0,
            ..BuildOptions::default()
        };
        let h = PdHierarchy::build(&kernel, 4, 8, 8, &options).unwrap();
        for k in 0..=4u64 {
            let level = h.level(k);
            let (lo_i, hi_i, lo_j, hi_j) = level.window().unwrap();
            assert_eq!((lo_i, lo_j), (0, 0));
            // Over-allocation: one extra row and column per order below the top.
            assert_eq!(hi_i, 8 + (4 - k as i64));
            assert_eq!(hi_j, 8 + (4 - k as i64));
            for i in lo_i..=hi_i {
                for j in lo_j..=hi_j {
                    assert_eq!(
                        h.entry(k, i, j),
                        &pd_entry_direct(&kernel, k, i, j),
                        "order {k} at ({i}, {j})"
                    );
                }
            }
        }
        // The square window pokes above the triangle, so the order-1 divisor
        // vanishes somewhere and the fallback path must have fired.
        assert!(h.stats().fallback_entries > 0);
        assert_eq!(h.stats().inexact_divisions, 0);
        assert!(h.stats().cross_checked > 0);
    }

    #[test]
    fn hierarchy_level_zero_and_one_are_definitional() {
        let kernel = Kernel::pascal();
        let h = PdHierarchy::build(&kernel, 2, 5, 5, &BuildOptions::default()).unwrap();
        for (_, _, v) in h.level(0).entries() {
            assert_eq!(v, &BigInt::one());
        }
        for (i, j, v) in h.level(1).entries() {
            assert_eq!(v, &kernel.entry(i, j));
        }
    }

    #[test]
    fn hierarchy_negative_indices_read_as_zero() {
        let kernel = Kernel::pascal();
        let h = PdHierarchy::build(&kernel, 2, 4, 4, &BuildOptions::default()).unwrap();
        assert_eq!(h.entry(2, -1, 0), &BigInt::zero());
        assert_eq!(h.entry(2, 3, -1), &BigInt::zero());
    }

    #[test]
    #[should_panic(expected = "outside the materialized window")]
    fn hierarchy_out_of_window_read_panics() {
        let kernel = Kernel::pascal();
        let h = PdHierarchy::build(&kernel, 2, 4, 4, &BuildOptions::default()).unwrap();
        let _ = h.entry(2, 5, 0);
    }

    #[test]
    fn hierarchy_respects_cell_budget() {
        let kernel = Kernel::pascal();
        let options = BuildOptions {
            cell_budget: 10,
            ..BuildOptions::default()
        };
        match PdHierarchy::build(&kernel, 3, 10, 10, &options) {
            Err(BuildError::WindowOverflow {
                required,
                budget: 10,
            }) => {
                assert!(required > 10);
            }
            other => panic!("expected overflow, got {other:?}"),
        }
    }

    #[test]
    fn hierarchy_q_kernel_matches_direct() {
        let kernel = Kernel::q_pascal(2).unwrap();
        let options = BuildOptions {
            cross_check_fraction: 1.0,
            ..BuildOptions::default()
        };
        let h = PdHierarchy::build(&kernel, 3, 6, 6, &options).unwrap();
        for k in 0..=3u64 {
            for (i, j, v) in h.level(k).entries() {
                assert_eq!(
                    v,
                    &pd_entry_direct(&kernel, k, i, j),
                    "order {k} at ({i}, {j})"
                );
            }
        }
    }

    #[test]
    fn hierarchy_table_kernel_matches_direct() {
        // A finite table that copies the binomial triangle up to row 9; all
        // minors inside the table extent agree with the binomial case.
        let mut csv = String::new();
        for a in 0..=9i64 {
            for b in 0..=a {
                csv.push_str(&format!("{a},{b},{}\n", binomial(a as u64, b)));
            }
        }
        let kernel = Kernel::table(TableKernel::from_reader(csv.as_bytes()).unwrap());
        let options = BuildOptions {
            cross_check_fraction: 1.0,
            ..BuildOptions::default()
        };
        let h = PdHierarchy::build(&kernel, 3, 4, 4, &options).unwrap();
        let pascal = Kernel::pascal();
        for k in 0..=3u64 {
            for i in 0..=4i64 {
                for j in 0..=4i64 {
                    // Blocks at (i, j) with i + k - 1 <= 9 never leave the table.
                    assert_eq!(h.entry(k, i, j), &pd_entry_direct(&pascal, k, i, j));
                }
            }
        }
    }

    #[test]
    fn build_direct_agrees_with_condensation() {
        let kernel = Kernel::pascal();
        let by_recurrence = PdHierarchy::build(&kernel, 4, 7, 7, &BuildOptions::default()).unwrap();
        let by_elimination =
            PdHierarchy::build_direct(&kernel, 4, 7, 7, DEFAULT_CELL_BUDGET).unwrap();
        for k in 0..=4u64 {
            assert_eq!(by_recurrence.level(k), by_elimination.level(k), "order {k}");
        }
    }

    #[test]
    fn exact_div_rejects_remainders() {
        assert_eq!(
            exact_div(&BigInt::from(84), &BigInt::from(7)),
            Some(BigInt::from(12))
        );
        assert_eq!(
            exact_div(&BigInt::from(-84), &BigInt::from(7)),
            Some(BigInt::from(-12))
        );
        assert_eq!(exact_div(&BigInt::from(7), &BigInt::from(2)), None);
    }

    #[test]
    fn sampler_is_deterministic_and_monotone_in_fraction() {
        let mut hits_low = 0u64;
        let mut hits_high = 0u64;
        for i in 0..64i64 {
            for j in 0..64i64 {
                let low = sampled(0.05, 7, 3, i, j);
                let high = sampled(0.5, 7, 3, i, j);
                assert_eq!(low, sampled(0.05, 7, 3, i, j));
                hits_low += low as u64;
                hits_high += high as u64;
                assert!(!sampled(0.0, 7, 3, i, j));
                assert!(sampled(1.0, 7, 3, i, j));
            }
        }
        // Coarse sanity on the hit rates: 5% and 50% of 4096 draws.
        assert!(
            hits_low > 100 && hits_low < 320,
            "low-rate hits: {hits_low}"
        );
        assert!(
            hits_high > 1650 && hits_high < 2450,
            "high-rate hits: {hits_high}"
        );
    }

    proptest! {
        // Condensation as a checkable statement: for random small windows the
        // three-term product identity holds entry-wise at every order.
        #[test]
        fn condensation_identity_holds(i in 0i64..=10, j in 0i64..=10, k in 1u64..=4) {
            let kernel = Kernel::pascal();
            let lhs = pd_entry_direct(&kernel, k + 1, i, j)
                * pd_entry_direct(&kernel, k - 1, i + 1, j + 1);
            let rhs = pd_entry_direct(&kernel, k, i, j) * pd_entry_direct(&kernel, k, i + 1, j + 1)
                - pd_entry_direct(&kernel, k, i, j + 1) * pd_entry_direct(&kernel, k, i + 1, j);
            prop_assert_eq!(lhs, rhs);
        }

        // Entries of every order are non-negative on the binomial kernel.
        #[test]
        fn binomial_minors_are_nonnegative(i in 0i64..=12, j in 0i64..=12, k in 0u64..=4) {
            let kernel = Kernel::pascal();
            prop_assert!(!pd_entry_direct(&kernel, k, i, j).is_negative());
        }
    }
}
