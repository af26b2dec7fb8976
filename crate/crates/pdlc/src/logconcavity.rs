//! The row-wise log-concavity operator and its exact iterates.
//!
//! For a row `a` the operator produces `a(j)^2 - a(j-1) * a(j+1)` at every
//! window position, reading missing neighbours as zero. Applied to a grid it
//! acts on each row independently. The output window always equals the input
//! window: one step past the support edge, one neighbour factor is zero, so
//! the operator cannot extend support and a fixed-width dense representation
//! stays sound under iteration.
//!
//! Entry bit-sizes roughly double with each application, so the iterator
//! enforces a total-bit budget, predicting the next iterate's worst-case size
//! before computing it and stopping with partial results when the prediction
//! exceeds the cap.

use crate::grid::{BigGrid, RowSeq};
use num_traits::Signed;
use thiserror::Error;

/// Default cap on the predicted total bits of a single iterate.
pub const DEFAULT_BIT_BUDGET: u64 = 1 << 31;

/// One application of the operator to a row; the output window equals the
/// input window and missing neighbours read as zero.
pub fn lc_row(a: &RowSeq) -> RowSeq {
    let Some((lo, hi)) = a.window() else {
        return RowSeq::new(a.origin_j(), Vec::new());
    };
    let values = (lo..=hi)
        .map(|j| a.get(j) * a.get(j) - a.get(j - 1) * a.get(j + 1))
        .collect();
    RowSeq::new(lo, values)
}

/// One application of the operator to every row of a grid independently.
pub fn lc_grid(g: &BigGrid) -> BigGrid {
    BigGrid::from_fn(g.origin_i(), g.origin_j(), g.rows(), g.cols(), |i, j| {
        g.get(i, j) * g.get(i, j) - g.get(i, j - 1) * g.get(i, j + 1)
    })
}

/// The smallest index at which a row fails to be a non-negative log-concave
/// sequence: the first position where either the row itself or its operator
/// image is negative. `None` means the row passes.
pub fn first_lc_violation(a: &RowSeq) -> Option<i64> {
    match (a.first_negative(), lc_row(a).first_negative()) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, y) => x.or(y),
    }
}

/// Whether the row and its operator image are both entrywise non-negative.
/// Vacuously true for the empty row.
pub fn is_log_concave_row(a: &RowSeq) -> bool {
    first_lc_violation(a).is_none()
}

/// An m-fold iterate of the operator together with where it went negative.
#[derive(Debug, Clone)]
pub struct LcIterate {
    /// The grid the iteration started from.
    pub base: BigGrid,
    /// How many applications produced `result`; depth 0 is the base itself.
    pub depth: u64,
    /// The depth-`depth` iterate, over the same window as `base`.
    pub result: BigGrid,
    /// Exactly the positions where `result` is negative, sorted
    /// lexicographically by `(i, j)`.
    pub negative_positions: Vec<(i64, i64)>,
}

#[derive(Debug, Error)]
#[error(
    "depth-{requested} iterate would exceed the {budget}-bit budget; stopped after {depth_reached} applications"
)]
pub struct LcBudgetError {
    pub requested: u64,
    pub budget: u64,
    pub depth_reached: u64,
    /// The deepest iterate that fit inside the budget.
    pub partial: LcIterate,
}

/// Worst-case total bits of the next iterate: each output entry is a
/// difference of two products of current entries, so its magnitude is below
/// `2^(2 * max_bits + 1)`.
pub fn next_iterate_bits(g: &BigGrid) -> u128 {
    g.cell_count() as u128 * (2 * g.max_bits() as u128 + 1)
}

fn snapshot(base: &BigGrid, depth: u64, result: BigGrid) -> LcIterate {
    let negative_positions = result
        .entries()
        .filter(|(_, _, v)| v.is_negative())
        .map(|(i, j, _)| (i, j))
        .collect();
    LcIterate {
        base: base.clone(),
        depth,
        result,
        negative_positions,
    }
}

/// Applies the operator `m` times, enforcing `bit_budget` on the predicted
/// size of each application before performing it. On budget exhaustion the
/// error carries the deepest iterate that was actually computed (boxed,
/// since it holds two full grids).
pub fn iterate_lc(g: &BigGrid, m: u64, bit_budget: u64) -> Result<LcIterate, Box<LcBudgetError>> {
    let mut current = g.clone();
    for depth_reached in 0..m {
        if next_iterate_bits(&current) > bit_budget as u128 {
            return Err(Box::new(LcBudgetError {
                requested: m,
                budget: bit_budget,
                depth_reached,
                partial: snapshot(g, depth_reached, current),
            }));
        }
        current = lc_grid(&current);
    }
    Ok(snapshot(g, m, current))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use proptest::prelude::*;

    fn row(values: &[i64]) -> RowSeq {
        RowSeq::from_i64s(0, values)
    }

    fn as_i64s(a: &RowSeq) -> Vec<i64> {
        a.values()
            .iter()
            .map(|v| i64::try_from(v).unwrap())
            .collect()
    }

    #[test]
    fn lc_row_examples() {
        assert_eq!(
            as_i64s(&lc_row(&row(&[1, 4, 6, 4, 1]))),
            vec![1, 10, 20, 10, 1]
        );
        assert_eq!(as_i64s(&lc_row(&row(&[1, 2, 4, 8]))), vec![1, 0, 0, 64]);
        assert_eq!(as_i64s(&lc_row(&row(&[0, 0, 0]))), vec![0, 0, 0]);
        assert!(lc_row(&row(&[])).is_empty());
    }

    #[test]
    fn lc_row_keeps_origin() {
        let shifted = RowSeq::from_i64s(5, &[1, 4, 6, 4, 1]);
        let out = lc_row(&shifted);
        assert_eq!(out.window(), Some((5, 9)));
        assert_eq!(as_i64s(&out), vec![1, 10, 20, 10, 1]);
    }

    #[test]
    fn lc_grid_is_rowwise() {
        let g = BigGrid::from_fn(0, 0, 3, 3, |_, _| BigInt::from(1));
        let out = lc_grid(&g);
        for i in 0..3 {
            assert_eq!(as_i64s(&out.row(i)), vec![1, 0, 1], "row {i}");
        }
        let single = BigGrid::from_row(7, &row(&[1, 2, 4, 8]));
        assert_eq!(lc_grid(&single).row(7), lc_row(&row(&[1, 2, 4, 8])));
    }

    #[test]
    fn lc_grid_commutes_with_row_permutation() {
        let rows: [&[i64]; 3] = [&[1, 4, 6, 4, 1], &[2, 3, 5, 7, 11], &[0, 1, 0, -2, 9]];
        let g = BigGrid::from_fn(0, 0, 3, 5, |i, j| {
            BigInt::from(rows[i as usize][j as usize])
        });
        let perm = [2usize, 0, 1];
        let permuted =
            BigGrid::from_fn(0, 0, 3, 5, |i, j| g.get(perm[i as usize] as i64, j).clone());
        let lc_then_permute = BigGrid::from_fn(0, 0, 3, 5, |i, j| {
            lc_grid(&g).get(perm[i as usize] as i64, j).clone()
        });
        assert_eq!(lc_grid(&permuted), lc_then_permute);
    }

    #[test]
    fn iterate_examples() {
        let base = BigGrid::from_row(4, &row(&[1, 4, 6, 4, 1]));
        let frozen: [&[i64]; 4] = [
            &[1, 4, 6, 4, 1],
            &[1, 10, 20, 10, 1],
            &[1, 80, 300, 80, 1],
            &[1, 6100, 83600, 6100, 1],
        ];
        for (m, want) in frozen.iter().enumerate() {
            let it = iterate_lc(&base, m as u64, DEFAULT_BIT_BUDGET).unwrap();
            assert_eq!(it.depth, m as u64);
            assert_eq!(as_i64s(&it.result.row(4)), want.to_vec(), "depth {m}");
            assert!(it.negative_positions.is_empty(), "depth {m}");
            assert_eq!(it.result.window(), base.window(), "depth {m}");
        }
    }

    #[test]
    fn iterate_depth_zero_is_identity() {
        let base = BigGrid::from_fn(0, 0, 2, 4, |i, j| BigInt::from(i * 10 + j - 5));
        let it = iterate_lc(&base, 0, DEFAULT_BIT_BUDGET).unwrap();
        assert_eq!(it.result, base);
        assert_eq!(it.base, base);
    }

    #[test]
    fn negative_positions_are_exact_and_sorted() {
        // Rows (1,0,1) and (1,4,1): the first goes negative at j=1, the
        // second stays non-negative (16 - 1 = 15).
        let rows: [&[i64]; 2] = [&[1, 0, 1], &[1, 4, 1]];
        let g = BigGrid::from_fn(0, 0, 2, 3, |i, j| {
            BigInt::from(rows[i as usize][j as usize])
        });
        let it = iterate_lc(&g, 1, DEFAULT_BIT_BUDGET).unwrap();
        assert_eq!(it.negative_positions, vec![(0, 1)]);
        let mut sorted = it.negative_positions.clone();
        sorted.sort();
        assert_eq!(sorted, it.negative_positions);
    }

    #[test]
    fn budget_error_carries_partial_progress() {
        let base = BigGrid::from_row(0, &row(&[1, 4, 6, 4, 1]));
        // Depth 1 fits in a generous budget; depth 2's prediction does not
        // fit in 5 cells * (2 * bits(20) + 1) - 1 bits.
        let after_one = lc_grid(&base);
        let tight = (next_iterate_bits(&after_one) - 1) as u64;
        let err = iterate_lc(&base, 3, tight).unwrap_err();
        assert_eq!(err.requested, 3);
        assert_eq!(err.depth_reached, 1);
        assert_eq!(err.partial.result, after_one);
        assert!(err.to_string().contains("stopped after 1"));
    }

    #[test]
    fn violation_reporting() {
        assert_eq!(first_lc_violation(&row(&[1, 4, 6, 4, 1])), None);
        assert!(is_log_concave_row(&row(&[1, 4, 6, 4, 1])));
        // 0^2 - 1 * 1 = -1 at the middle index.
        assert_eq!(first_lc_violation(&row(&[1, 0, 1])), Some(1));
        // A negative entry violates before any operator value does.
        assert_eq!(first_lc_violation(&row(&[-1, 2, 1])), Some(0));
        assert!(is_log_concave_row(&row(&[])));
    }

    proptest! {
        // Zero padding stays zero: the operator never extends support.
        #[test]
        fn support_containment(
            core in proptest::collection::vec(-50i64..=50, 1..=6),
            pad_lo in 1usize..=3,
            pad_hi in 1usize..=3,
        ) {
            let mut padded = vec![0i64; pad_lo];
            padded.extend(&core);
            padded.extend(std::iter::repeat_n(0i64, pad_hi));
            let out = lc_row(&row(&padded));
            for j in 0..pad_lo as i64 {
                prop_assert_eq!(out.get(j), &BigInt::from(0));
            }
            for j in (pad_lo + core.len()) as i64..padded.len() as i64 {
                prop_assert_eq!(out.get(j), &BigInt::from(0));
            }
        }

        // Geometric rows collapse to zero at every interior index.
        #[test]
        fn geometric_rows_are_log_linear_inside(
            c in 1i64..=3,
            r in 1i64..=4,
            len in 2usize..=8,
        ) {
            let geo: Vec<i64> = (0..len as u32).map(|t| c * r.pow(t)).collect();
            let out = lc_row(&row(&geo));
            for j in 1..len as i64 - 1 {
                prop_assert_eq!(out.get(j), &BigInt::from(0), "interior index {}", j);
            }
        }
    }
}
