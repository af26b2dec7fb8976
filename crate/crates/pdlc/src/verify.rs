//! Executable claim checks over finite windows.
//!
//! Each identity or inequality about the minor arrays becomes a function that
//! scans a window, compares exact integers, and returns a structured report:
//! status, a count of comparisons, and counterexamples with both side values.
//! Checks evaluate claims; none of them assumes the claim it is checking, and
//! a refutation is an ordinary, reportable outcome rather than a failure of
//! the tool.
//!
//! Ratio identities are cleared of denominators first and positions where a
//! denominator vanishes are skipped and counted separately, so everything
//! stays in exact integer arithmetic. Window scans run rows in parallel and
//! then merge, sort, and truncate counterexamples deterministically, making
//! reports independent of scheduling.

use crate::grid::RowSeq;
use crate::kernel::{Kernel, KernelDesc};
use crate::logconcavity::{first_lc_violation, lc_grid, lc_row, next_iterate_bits};
use crate::minors::{BuildOptions, DivisionPolicy, PdHierarchy};
use crate::report::{tool_version, CheckReport, CheckStatus, Counterexample, ReportParams};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// A check's report plus side observations that have no slot in the report
/// schema but matter for interpretation.
#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub report: CheckReport,
    /// Window positions not tested because a cleared-denominator
    /// precondition failed (zero denominator or non-interior position).
    pub skipped: u64,
    /// Positions where the equality remark's hypothesis held (a log-linear
    /// factor) but the residual was nonzero anyway.
    pub remark_discrepancies: u64,
    /// Why the status is `error`, when it is.
    pub error_detail: Option<String>,
    /// Deepest iterate completed before a budget stop.
    pub depth_reached: Option<u64>,
    /// Build observations, populated by kernel probes: entries recomputed
    /// directly because the condensation divisor vanished, and inexact
    /// condensation quotients encountered.
    pub fallback_entries: u64,
    pub inexact_divisions: u64,
}

fn finalize(
    claim_id: &str,
    kernel: KernelDesc,
    params: ReportParams,
    mut counterexamples: Vec<Counterexample>,
    checked_count: u64,
    cap: usize,
    error_detail: Option<String>,
) -> CheckOutcome {
    counterexamples.sort_by_key(Counterexample::sort_key);
    let truncated = counterexamples.len() > cap;
    counterexamples.truncate(cap);
    let status = if error_detail.is_some() {
        CheckStatus::Error
    } else if counterexamples.is_empty() {
        CheckStatus::Holds
    } else {
        CheckStatus::Refuted
    };
    CheckOutcome {
        report: CheckReport {
            claim_id: claim_id.into(),
            kernel,
            params,
            status,
            checked_count,
            counterexamples,
            truncated,
            timing_ms: 0,
            tool_version: tool_version(),
        },
        skipped: 0,
        remark_discrepancies: 0,
        error_detail,
        depth_reached: None,
        fallback_entries: 0,
        inexact_divisions: 0,
    }
}

fn error_outcome(
    claim_id: &str,
    kernel: KernelDesc,
    params: ReportParams,
    detail: String,
) -> CheckOutcome {
    finalize(claim_id, kernel, params, Vec::new(), 0, 0, Some(detail))
}

/// Result of inspecting one window cell.
enum Cell {
    Pass,
    Fail(Counterexample),
    Skip,
}

/// Scans orders `[k_min, k_max]` over the hierarchy's requested window,
/// rows in parallel, merging counts and counterexamples deterministically.
fn scan_window<F>(
    h: &PdHierarchy,
    claim_id: &str,
    params: ReportParams,
    k_min: u64,
    k_max: u64,
    cap: usize,
    cell: F,
) -> CheckOutcome
where
    F: Fn(u64, i64, i64) -> Cell + Sync,
{
    let mut counterexamples = Vec::new();
    let mut checked = 0u64;
    let mut skipped = 0u64;
    for k in k_min..=k_max {
        let per_row: Vec<(Vec<Counterexample>, u64, u64)> = (0..=h.i_max())
            .into_par_iter()
            .map(|i| {
                let mut fails = Vec::new();
                let (mut c, mut s) = (0u64, 0u64);
                for j in 0..=h.j_max() {
                    match cell(k, i, j) {
                        Cell::Pass => c += 1,
                        Cell::Fail(ce) => {
                            c += 1;
                            fails.push(ce);
                        }
                        Cell::Skip => s += 1,
                    }
                }
                (fails, c, s)
            })
            .collect();
        for (fails, c, s) in per_row {
            counterexamples.extend(fails);
            checked += c;
            skipped += s;
        }
    }
    let mut outcome = finalize(
        claim_id,
        h.kernel().clone(),
        params,
        counterexamples,
        checked,
        cap,
        None,
    );
    outcome.skipped = skipped;
    outcome
}

/// Errors out unless the hierarchy holds orders `0..=needed` and the tested
/// order range is non-empty and starts at 1 or above.
fn validate_orders(
    h: &PdHierarchy,
    claim_id: &str,
    params: &ReportParams,
    k_min: u64,
    k_max: u64,
    needed: u64,
) -> Option<CheckOutcome> {
    let problem = if k_min < 1 {
        Some(format!(
            "order range starts at {k_min}; the check is defined from order 1"
        ))
    } else if k_min > k_max {
        Some(format!("empty order range [{k_min}, {k_max}]"))
    } else if needed > h.k_max() {
        Some(format!(
            "hierarchy holds orders up to {}, but testing orders [{k_min}, {k_max}] needs order {needed}",
            h.k_max()
        ))
    } else {
        None
    };
    problem.map(|detail| error_outcome(claim_id, h.kernel().clone(), params.clone(), detail))
}

/// The factorization identity: for each order `k` and window position, the
/// operator value `D_k(i,j)^2 - D_k(i,j-1) D_k(i,j+1)` must equal the product
/// `D_{k-1}(i,j) * D_{k+1}(i,j)`.
pub fn check_factorization(h: &PdHierarchy, k_min: u64, k_max: u64, cap: usize) -> CheckOutcome {
    factorization_scan(h, "factorization", k_min, k_max, cap)
}

fn factorization_scan(
    h: &PdHierarchy,
    claim_id: &str,
    k_min: u64,
    k_max: u64,
    cap: usize,
) -> CheckOutcome {
    let params = ReportParams::window(k_min, k_max, h.i_max(), h.j_max());
    if let Some(err) = validate_orders(h, claim_id, &params, k_min, k_max, k_max + 1) {
        return err;
    }
    scan_window(h, claim_id, params, k_min, k_max, cap, |k, i, j| {
        let lhs = h.entry(k, i, j) * h.entry(k, i, j) - h.entry(k, i, j - 1) * h.entry(k, i, j + 1);
        let rhs = h.entry(k - 1, i, j) * h.entry(k + 1, i, j);
        if lhs == rhs {
            Cell::Pass
        } else {
            Cell::Fail(Counterexample::new(k, i, j, None, &lhs, &rhs))
        }
    })
}

/// Which adjacent three-term condensation identity to check: the main form,
/// or the left-shifted companion form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DodgsonForm {
    Eq1,
    Eq2,
}

/// The adjacent condensation identities, checked as stated (including
/// boundary positions, where zero-extension applies):
///
/// * Eq1: `D_{k+1}(i,j) D_{k-1}(i+1,j+1) = D_k(i,j) D_k(i+1,j+1) - D_k(i,j+1) D_k(i+1,j)`
/// * Eq2: `D_{k+1}(i,j-1) D_{k-1}(i+1,j) = D_k(i,j-1) D_k(i+1,j) - D_k(i,j) D_k(i+1,j-1)`
pub fn check_dodgson(
    h: &PdHierarchy,
    form: DodgsonForm,
    k_min: u64,
    k_max: u64,
    cap: usize,
) -> CheckOutcome {
    let claim_id = match form {
        DodgsonForm::Eq1 => "dodgson-eq1",
        DodgsonForm::Eq2 => "dodgson-eq2",
    };
    let params = ReportParams::window(k_min, k_max, h.i_max(), h.j_max());
    if let Some(err) = validate_orders(h, claim_id, &params, k_min, k_max, k_max + 1) {
        return err;
    }
    scan_window(h, claim_id, params, k_min, k_max, cap, |k, i, j| {
        let (lhs, rhs) = match form {
            DodgsonForm::Eq1 => (
                h.entry(k + 1, i, j) * h.entry(k - 1, i + 1, j + 1),
                h.entry(k, i, j) * h.entry(k, i + 1, j + 1)
                    - h.entry(k, i, j + 1) * h.entry(k, i + 1, j),
            ),
            DodgsonForm::Eq2 => (
                h.entry(k + 1, i, j - 1) * h.entry(k - 1, i + 1, j),
                h.entry(k, i, j - 1) * h.entry(k, i + 1, j)
                    - h.entry(k, i, j) * h.entry(k, i + 1, j - 1),
            ),
        };
        if lhs == rhs {
            Cell::Pass
        } else {
            Cell::Fail(Counterexample::new(k, i, j, None, &lhs, &rhs))
        }
    })
}

/// The proof-step ratio identity, cleared of denominators: at interior
/// positions (`j >= 1`, both denominators `D_k(i+1,j)` and `D_k(i,j+1)`
/// nonzero) it asserts
///
/// ```text
/// D_k(i+1,j-1) * D_k(i,j+1) = D_k(i,j) * D_k(i+1,j+1)
/// ```
///
/// Non-interior and zero-denominator positions are skipped and counted.
pub fn check_sliding_rule(h: &PdHierarchy, k_min: u64, k_max: u64, cap: usize) -> CheckOutcome {
    let claim_id = "sliding-rule";
    let params = ReportParams::window(k_min, k_max, h.i_max(), h.j_max());
    if let Some(err) = validate_orders(h, claim_id, &params, k_min, k_max, k_max + 1) {
        return err;
    }
    scan_window(h, claim_id, params, k_min, k_max, cap, |k, i, j| {
        if j < 1 || h.entry(k, i + 1, j).is_zero() || h.entry(k, i, j + 1).is_zero() {
            return Cell::Skip;
        }
        let lhs = h.entry(k, i + 1, j - 1) * h.entry(k, i, j + 1);
        let rhs = h.entry(k, i, j) * h.entry(k, i + 1, j + 1);
        if lhs == rhs {
            Cell::Pass
        } else {
            Cell::Fail(Counterexample::new(k, i, j, None, &lhs, &rhs))
        }
    })
}

/// Which side of the order-direction inequality to take as the claim.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KDirection {
    /// `D_m(i,j) * D_{m+2}(i,j) >= D_{m+1}(i,j)^2`.
    AsStated,
    /// `D_{m+1}(i,j)^2 >= D_m(i,j) * D_{m+2}(i,j)`.
    Reversed,
}

/// Evaluates the chosen order-direction inequality for every `m` in
/// `[1, m_max]` and every window position. Counterexample records carry `m`
/// in the `k` field.
pub fn check_k_direction(
    h: &PdHierarchy,
    direction: KDirection,
    m_max: u64,
    cap: usize,
) -> CheckOutcome {
    let claim_id = match direction {
        KDirection::AsStated => "k-direction-stated",
        KDirection::Reversed => "k-direction-reversed",
    };
    let params = ReportParams::window(1, m_max, h.i_max(), h.j_max());
    if let Some(err) = validate_orders(h, claim_id, &params, 1, m_max, m_max + 2) {
        return err;
    }
    scan_window(h, claim_id, params, 1, m_max, cap, |m, i, j| {
        let product = h.entry(m, i, j) * h.entry(m + 2, i, j);
        let square = h.entry(m + 1, i, j) * h.entry(m + 1, i, j);
        let (lhs, rhs) = match direction {
            KDirection::AsStated => (product, square),
            KDirection::Reversed => (square, product),
        };
        if lhs >= rhs {
            Cell::Pass
        } else {
            Cell::Fail(Counterexample::new(m, i, j, None, &lhs, &rhs))
        }
    })
}

/// Iterates the row-wise operator to depth `m_max` on every order in
/// `[1, K]`, restricted to the requested window, and records every negative
/// entry as a counterexample `(k, i, j, m)` with the entry value against the
/// zero bound. A bit-budget stop degrades the report to `error` status while
/// keeping all results gathered up to that point.
pub fn check_infinite_lc_depth(
    h: &PdHierarchy,
    m_max: u64,
    bit_budget: u64,
    cap: usize,
) -> CheckOutcome {
    let claim_id = "infinite-lc";
    let mut params = ReportParams::window(1, h.k_max(), h.i_max(), h.j_max());
    params.depth = Some(m_max);
    if m_max < 1 {
        return error_outcome(
            claim_id,
            h.kernel().clone(),
            params,
            "depth must be at least 1".into(),
        );
    }
    if h.k_max() < 1 {
        return error_outcome(
            claim_id,
            h.kernel().clone(),
            params,
            "hierarchy holds only order 0; nothing to iterate".into(),
        );
    }

    struct LevelScan {
        counterexamples: Vec<Counterexample>,
        checked: u64,
        budget_stop: Option<(u64, u64)>, // (order, depth reached)
    }

    let levels: Vec<LevelScan> = (1..=h.k_max())
        .into_par_iter()
        .map(|k| {
            let mut scan = LevelScan {
                counterexamples: Vec::new(),
                checked: 0,
                budget_stop: None,
            };
            let mut current = h.level(k).subgrid(0, h.i_max(), 0, h.j_max());
            for m in 1..=m_max {
                if next_iterate_bits(&current) > bit_budget as u128 {
                    scan.budget_stop = Some((k, m - 1));
                    break;
                }
                current = lc_grid(&current);
                for (i, j, v) in current.entries() {
                    scan.checked += 1;
                    if v.is_negative() {
                        scan.counterexamples.push(Counterexample::new(
                            k,
                            i,
                            j,
                            Some(m),
                            v,
                            &BigInt::zero(),
                        ));
                    }
                }
            }
            scan
        })
        .collect();

    let mut counterexamples = Vec::new();
    let mut checked = 0u64;
    let mut first_stop: Option<(u64, u64)> = None;
    for scan in levels {
        counterexamples.extend(scan.counterexamples);
        checked += scan.checked;
        if first_stop.is_none() {
            first_stop = scan.budget_stop;
        }
    }
    let error_detail = first_stop.map(|(k, reached)| {
        format!(
            "bit budget {bit_budget} exhausted at order {k} after {reached} of {m_max} applications"
        )
    });
    let mut outcome = finalize(
        claim_id,
        h.kernel().clone(),
        params,
        counterexamples,
        checked,
        cap,
        error_detail,
    );
    outcome.depth_reached = first_stop.map(|(_, reached)| reached);
    outcome
}

/// The exact residual `LC(a ⊙ x)(j) - LC(a)(j) * LC(x)(j)` in closed form:
///
/// ```text
/// a(j)^2 x(j-1) x(j+1) + a(j-1) a(j+1) x(j)^2 - 2 a(j-1) a(j+1) x(j-1) x(j+1)
/// ```
///
/// with zero-extension outside both windows. The randomized inequality check
/// verifies this form against the direct expansion at every position.
pub fn hadamard_residual(a: &RowSeq, x: &RowSeq, j: i64) -> BigInt {
    let (am, aj, ap) = (a.get(j - 1), a.get(j), a.get(j + 1));
    let (xm, xj, xp) = (x.get(j - 1), x.get(j), x.get(j + 1));
    aj * aj * (xm * xp) + am * ap * (xj * xj) - BigInt::from(2) * (am * ap) * (xm * xp)
}

/// One generated row plus whether it is log-linear by construction
/// (geometric rows are; binomial segments and products are not).
struct TrialRow {
    row: RowSeq,
    log_linear: bool,
}

fn binomial_segment(rng: &mut ChaCha8Rng, len: usize) -> RowSeq {
    let l = len as u64;
    let n = rng.random_range(l - 1..=l + 6);
    let shift = rng.random_range(0..=n - (l - 1)) as i64;
    RowSeq::new(
        0,
        (0..len as i64)
            .map(|t| crate::kernel::binomial(n, shift + t))
            .collect(),
    )
}

fn geometric_row(rng: &mut ChaCha8Rng, len: usize) -> RowSeq {
    let c = BigInt::from(rng.random_range(1..=3i32));
    let r = BigInt::from(rng.random_range(1..=4i32));
    let mut values = Vec::with_capacity(len);
    let mut current = c;
    for _ in 0..len {
        values.push(current.clone());
        current *= &r;
    }
    RowSeq::new(0, values)
}

/// Samples a non-negative log-concave row: a contiguous binomial-row
/// segment, a geometric row with small ratio, or an entrywise product of the
/// two. All three families are log-concave and the class is closed under
/// entrywise products.
fn random_lc_row(rng: &mut ChaCha8Rng, max_len: u64) -> TrialRow {
    let len = rng.random_range(3..=max_len) as usize;
    match rng.random_range(0..3u8) {
        0 => TrialRow {
            row: binomial_segment(rng, len),
            log_linear: false,
        },
        1 => TrialRow {
            row: geometric_row(rng, len),
            log_linear: true,
        },
        _ => TrialRow {
            row: binomial_segment(rng, len).hadamard(&geometric_row(rng, len)),
            log_linear: false,
        },
    }
}

/// Randomized check of the entrywise-product inequality
/// `LC(a ⊙ x) >= LC(a) ⊙ LC(x)`: every trial draws a pair of non-negative
/// log-concave rows, asserts the residual is non-negative at every position,
/// and asserts the closed-form residual equals the direct expansion.
/// Counterexample records use `k` for the trial index and `j` for the
/// position. Positions where a log-linear factor nevertheless produces a
/// nonzero residual are tallied as remark discrepancies, not failures.
pub fn check_hadamard_inequality(trials: u64, seed: u64, max_len: u64, cap: usize) -> CheckOutcome {
    let claim_id = "hadamard";
    // Generator rows are binomial segments and geometric rows, so the report
    // pins the row source rather than a minor kernel.
    let kernel = KernelDesc {
        kind: "pascal".into(),
        q: None,
    };
    let params = ReportParams {
        trials: Some(trials),
        seed: Some(seed),
        ..ReportParams::default()
    };
    if trials < 1 {
        return error_outcome(
            claim_id,
            kernel,
            params,
            "at least one trial required".into(),
        );
    }
    if max_len < 3 {
        return error_outcome(
            claim_id,
            kernel,
            params,
            format!("max_len {max_len} below the minimum row length 3"),
        );
    }

    struct TrialScan {
        counterexamples: Vec<Counterexample>,
        checked: u64,
        discrepancies: u64,
        generator_failure: Option<String>,
    }

    let per_trial: Vec<TrialScan> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(trial);
            let a = random_lc_row(&mut rng, max_len);
            let x = random_lc_row(&mut rng, max_len);
            let mut scan = TrialScan {
                counterexamples: Vec::new(),
                checked: 0,
                discrepancies: 0,
                generator_failure: None,
            };
            for (name, r) in [("first", &a), ("second", &x)] {
                if let Some(j) = first_lc_violation(&r.row) {
                    scan.generator_failure = Some(format!(
                        "trial {trial}: generator produced a non-log-concave {name} row (violation at {j})"
                    ));
                    return scan;
                }
            }
            let lc_a = lc_row(&a.row);
            let lc_x = lc_row(&x.row);
            let lc_prod = lc_row(&a.row.hadamard(&x.row));
            let hi = a.row.len().max(x.row.len()) as i64;
            for j in -1..=hi {
                let direct = lc_prod.get(j) - lc_a.get(j) * lc_x.get(j);
                let closed = hadamard_residual(&a.row, &x.row, j);
                scan.checked += 1;
                if closed != direct {
                    scan.counterexamples.push(Counterexample::new(
                        trial, 0, j, None, &direct, &closed,
                    ));
                    continue;
                }
                if direct.is_negative() {
                    let bound = lc_a.get(j) * lc_x.get(j);
                    scan.counterexamples.push(Counterexample::new(
                        trial,
                        0,
                        j,
                        None,
                        lc_prod.get(j),
                        &bound,
                    ));
                }
                if (a.log_linear || x.log_linear) && !direct.is_zero() {
                    scan.discrepancies += 1;
                }
            }
            scan
        })
        .collect();

    let mut counterexamples = Vec::new();
    let mut checked = 0u64;
    let mut discrepancies = 0u64;
    let mut failure: Option<String> = None;
    for scan in per_trial {
        counterexamples.extend(scan.counterexamples);
        checked += scan.checked;
        discrepancies += scan.discrepancies;
        if failure.is_none() {
            failure = scan.generator_failure;
        }
    }
    let mut outcome = finalize(
        claim_id,
        kernel,
        params,
        counterexamples,
        checked,
        cap,
        failure,
    );
    outcome.remark_discrepancies = discrepancies;
    outcome
}

/// Builds the hierarchy for an arbitrary kernel (divisor-zero fallback
/// active, inexact divisions downgraded to recorded observations) and runs
/// the factorization scan over orders `[1, k_max]`. The holds/refuted result
/// is an experimental outcome about that kernel, not an asserted truth.
pub fn probe_kernel_factorization(
    kernel: &Kernel,
    k_max: u64,
    i_max: i64,
    j_max: i64,
    options: &BuildOptions,
    cap: usize,
) -> CheckOutcome {
    let claim_id = "kernel-probe";
    let params = ReportParams::window(1, k_max, i_max, j_max);
    let build_options = BuildOptions {
        on_inexact: DivisionPolicy::OracleFallback,
        ..options.clone()
    };
    let h = match PdHierarchy::build(kernel, k_max + 1, i_max, j_max, &build_options) {
        Ok(h) => h,
        Err(e) => {
            return error_outcome(claim_id, kernel.describe(), params, e.to_string());
        }
    };
    let mut outcome = factorization_scan(&h, claim_id, 1, k_max, cap);
    outcome.fallback_entries = h.stats().fallback_entries;
    outcome.inexact_divisions = h.stats().inexact_divisions;
    outcome
}
