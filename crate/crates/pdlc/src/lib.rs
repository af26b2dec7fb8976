//! Exact-arithmetic toolkit for arrays of contiguous minors of
//! lower-triangular combinatorial matrices (binomial, q-binomial, or
//! file-backed) and for the row-wise log-concavity operator.
//!
//! Everything is arbitrary-precision integer arithmetic: minor hierarchies
//! are built by a three-term condensation recurrence with exact division and
//! verified against an independent fraction-free elimination oracle, the
//! log-concavity operator is iterated exactly, and each identity or
//! inequality about these objects is an executable check that scans a finite
//! window and reports counterexamples instead of assuming the statement.
//!
//! Module map:
//!
//! * [`grid`] — dense integer grids and rows with zero-extension semantics.
//! * [`kernel`] — binomial, q-binomial, and table entry sources.
//! * [`minors`] — determinant oracle, closed forms, and the condensation
//!   hierarchy with budget enforcement and sampled cross-checking.
//! * [`logconcavity`] — the row-wise operator, its iterates, and bit budgets.
//! * [`report`] — serializable check reports with a stable JSON schema.
//! * [`verify`] — the claim checks themselves.

pub mod grid;
pub mod kernel;
pub mod logconcavity;
pub mod minors;
pub mod report;
pub mod verify;

pub use grid::{BigGrid, RowSeq};
pub use kernel::{binomial, q_binomial, Kernel, KernelDesc, KernelError, TableKernel};
pub use logconcavity::{
    first_lc_violation, is_log_concave_row, iterate_lc, lc_grid, lc_row, LcBudgetError, LcIterate,
    DEFAULT_BIT_BUDGET,
};
pub use minors::{
    bareiss_determinant, narayana_closed_form, pd_entry_direct, BuildError, BuildOptions,
    BuildStats, DivisionPolicy, PdHierarchy, DEFAULT_CELL_BUDGET,
};
pub use report::{
    tool_version, CheckReport, CheckStatus, Counterexample, ReportParams,
    DEFAULT_COUNTEREXAMPLE_CAP,
};
pub use verify::{
    check_dodgson, check_factorization, check_hadamard_inequality, check_infinite_lc_depth,
    check_k_direction, check_sliding_rule, hadamard_residual, probe_kernel_factorization,
    CheckOutcome, DodgsonForm, KDirection,
};
