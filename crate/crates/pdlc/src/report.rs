//! Structured pass/fail reports emitted by the claim checkers.
//!
//! One report per check, serializable to JSON with a fixed field order:
//! `{claim_id, kernel, params, status, checked_count, counterexamples,
//! truncated, timing_ms, tool_version}`. All big integers appear as decimal
//! strings so the output is exact and parser-agnostic.

use crate::kernel::KernelDesc;
use num_bigint::BigInt;
use serde::Serialize;

/// Default cap on counterexamples retained per report.
pub const DEFAULT_COUNTEREXAMPLE_CAP: usize = 10;

/// Outcome of a check. `Holds` means every comparison passed and no error
/// occurred; `Refuted` means at least one counterexample was found; `Error`
/// means the check could not run to completion (window too small, budget
/// exhausted), with any partial counterexamples still reported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Holds,
    Refuted,
    Error,
}

/// One failed comparison: the position and both side values, as decimal
/// strings. The meaning of `k` is claim-specific (minor order, inequality
/// index, or trial number); `m` appears only for depth-indexed claims.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub k: u64,
    pub i: i64,
    pub j: i64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<u64>,
    pub lhs: String,
    pub rhs: String,
}

impl Counterexample {
    pub fn new(k: u64, i: i64, j: i64, m: Option<u64>, lhs: &BigInt, rhs: &BigInt) -> Self {
        Counterexample {
            k,
            i,
            j,
            m,
            lhs: lhs.to_string(),
            rhs: rhs.to_string(),
        }
    }

    /// Lexicographic position, the report sort key.
    pub fn sort_key(&self) -> (u64, i64, i64, u64) {
        (self.k, self.i, self.j, self.m.unwrap_or(0))
    }
}

/// Window and trial parameters echoed into the report. Fields that do not
/// apply to a given claim are omitted from the JSON.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ReportParams {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_min: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_max: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub i_max: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub j_max: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub depth: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl ReportParams {
    /// Parameters for a window scan over orders `[k_min, k_max]` and
    /// positions `[0, i_max] x [0, j_max]`.
    pub fn window(k_min: u64, k_max: u64, i_max: i64, j_max: i64) -> Self {
        ReportParams {
            k_min: Some(k_min),
            k_max: Some(k_max),
            i_max: Some(i_max),
            j_max: Some(j_max),
            ..ReportParams::default()
        }
    }
}

/// The structured result of one claim check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub claim_id: String,
    pub kernel: KernelDesc,
    pub params: ReportParams,
    pub status: CheckStatus,
    pub checked_count: u64,
    pub counterexamples: Vec<Counterexample>,
    pub truncated: bool,
    pub timing_ms: u64,
    pub tool_version: String,
}

pub fn tool_version() -> String {
    env!("CARGO_PKG_VERSION").to_string()
}
