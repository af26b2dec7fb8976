//! Command-line frontend: builds minor-array hierarchies, evaluates claims,
//! and benchmarks the condensation recurrence against direct elimination.
//!
//! Exit codes: 0 success / claim holds, 1 claim refuted or benchmark
//! mismatch, 2 usage or configuration error, 3 resource limit or runtime
//! error. Reports go to standard output (redirect with `--out`); human
//! summaries go to standard error.

use clap::{Args, Parser, Subcommand, ValueEnum};
use pdlc::logconcavity::DEFAULT_BIT_BUDGET;
use pdlc::minors::DEFAULT_CELL_BUDGET;
use pdlc::report::{CheckStatus, ReportParams, DEFAULT_COUNTEREXAMPLE_CAP};
use pdlc::verify::{CheckOutcome, DodgsonForm, KDirection};
use pdlc::{BigGrid, BuildOptions, CheckReport, DivisionPolicy, Kernel, PdHierarchy, TableKernel};
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser)]
#[command(
    name = "pdlc",
    version,
    about = "Exact minor-array computation and identity verification",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the minor hierarchy and emit one order's window
    Compute(ComputeArgs),
    /// Evaluate a claim over a finite window and emit a JSON report
    Verify(VerifyArgs),
    /// Time the condensation build against per-entry elimination
    Bench(BenchArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KernelKind {
    /// Binomial coefficients
    Pascal,
    /// Gaussian binomial coefficients at integer q (requires --q)
    QPascal,
    /// Finite table loaded from CSV records `a,b,value` (requires --table)
    Table,
}

#[derive(Args)]
struct KernelArgs {
    /// Entry source for the minor arrays
    #[arg(long, value_enum, default_value_t = KernelKind::Pascal)]
    kernel: KernelKind,

    /// Deformation parameter for --kernel q-pascal; must be a positive integer
    #[arg(long)]
    q: Option<u64>,

    /// CSV file backing --kernel table
    #[arg(long, value_name = "FILE")]
    table: Option<PathBuf>,
}

#[derive(Args)]
struct ResourceArgs {
    /// Cap on total materialized cells across all hierarchy levels
    #[arg(long, env = "PDLC_BUDGET_CELLS", default_value_t = DEFAULT_CELL_BUDGET)]
    budget_cells: u64,

    /// Cap on the predicted total bits of one operator iterate
    #[arg(long, env = "PDLC_BUDGET_BITS", default_value_t = DEFAULT_BIT_BUDGET)]
    budget_bits: u64,

    /// Worker threads for window scans and level builds (0 = all cores)
    #[arg(long, env = "PDLC_PARALLEL", default_value_t = 0)]
    parallel: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct ComputeArgs {
    #[command(flatten)]
    kernel: KernelArgs,

    /// Minor order of the level to emit
    #[arg(long, default_value_t = 2)]
    k: u64,

    /// Largest row index of the window
    #[arg(long, default_value_t = 20)]
    imax: u32,

    /// Largest column index of the window [default: --imax]
    #[arg(long)]
    jmax: Option<u32>,

    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,

    /// Write output to this file instead of standard output
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,

    /// Fraction of recurrence-built entries re-derived by the elimination oracle
    #[arg(long, default_value_t = 0.01)]
    cross_check: f64,

    /// Seed for the cross-check sampler
    #[arg(long, default_value_t = 0)]
    seed: u64,

    #[command(flatten)]
    resources: ResourceArgs,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Claim {
    /// Operator value equals the product of adjacent orders
    Factorization,
    /// Adjacent condensation identity, main form
    #[value(name = "dodgson-eq1")]
    DodgsonEq1,
    /// Adjacent condensation identity, left-shifted form
    #[value(name = "dodgson-eq2")]
    DodgsonEq2,
    /// Proof-step ratio identity, cleared of denominators
    SlidingRule,
    /// Entrywise-product inequality on random log-concave rows
    Hadamard,
    /// Iterated operator stays non-negative to depth --mmax
    InfiniteLc,
    /// Order-direction inequality as stated
    #[value(name = "k-direction-stated")]
    KDirectionStated,
    /// Order-direction inequality with the sides exchanged
    #[value(name = "k-direction-reversed")]
    KDirectionReversed,
    /// Factorization scan on an arbitrary kernel, outcome recorded not asserted
    KernelProbe,
}

#[derive(Args)]
struct VerifyArgs {
    /// Claim to evaluate
    #[arg(value_enum)]
    claim: Claim,

    #[command(flatten)]
    kernel: KernelArgs,

    /// Smallest minor order tested (window claims)
    #[arg(long, default_value_t = 1)]
    kmin: u64,

    /// Largest minor order tested (window claims)
    #[arg(long, default_value_t = 4)]
    kmax: u64,

    /// Largest row index tested
    #[arg(long, default_value_t = 20)]
    imax: u32,

    /// Largest column index tested [default: --imax]
    #[arg(long)]
    jmax: Option<u32>,

    /// Depth bound: operator applications (infinite-lc) or inequality index range (k-direction)
    #[arg(long, default_value_t = 3)]
    mmax: u64,

    /// Number of random trials (hadamard)
    #[arg(long, default_value_t = 1000)]
    trials: u64,

    /// Largest generated row length (hadamard)
    #[arg(long, default_value_t = 12)]
    max_len: u64,

    /// Seed for all randomness and sampling
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Cap on counterexamples retained in the report
    #[arg(long, default_value_t = DEFAULT_COUNTEREXAMPLE_CAP)]
    cap: usize,

    /// Fraction of recurrence-built entries re-derived by the elimination oracle
    #[arg(long, default_value_t = 1.0)]
    cross_check: f64,

    /// Record real wall-clock timing in the report instead of the reproducible 0
    #[arg(long)]
    timing: bool,

    /// Write the report to this file instead of standard output
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,

    #[command(flatten)]
    resources: ResourceArgs,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    kernel: KernelArgs,

    /// Largest minor order built
    #[arg(long, default_value_t = 6)]
    kmax: u64,

    /// Largest row index of the window
    #[arg(long, default_value_t = 100)]
    imax: u32,

    /// Largest column index of the window [default: --imax]
    #[arg(long)]
    jmax: Option<u32>,

    /// Write the timing report to this file instead of standard output
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,

    /// Corrupt one condensation entry, to exercise the mismatch gate
    #[arg(long, hide = true)]
    inject_fault: bool,

    #[command(flatten)]
    resources: ResourceArgs,
}

/// A terminal failure with its process exit code.
struct Failure {
    code: u8,
    message: String,
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

fn resource(message: impl Into<String>) -> Failure {
    Failure {
        code: 3,
        message: message.into(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let parallel = match &cli.command {
        Command::Compute(a) => a.resources.parallel,
        Command::Verify(a) => a.resources.parallel,
        Command::Bench(a) => a.resources.parallel,
    };
    if parallel > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(parallel)
            .build_global()
        {
            eprintln!("error: could not size the worker pool: {e}");
            return ExitCode::from(3);
        }
    }
    let result = match cli.command {
        Command::Compute(args) => run_compute(args),
        Command::Verify(args) => run_verify(args),
        Command::Bench(args) => run_bench(args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn build_kernel(args: &KernelArgs) -> Result<Kernel, Failure> {
    if args.q.is_some() && args.kernel != KernelKind::QPascal {
        return Err(usage("--q only applies to --kernel q-pascal"));
    }
    if args.table.is_some() && args.kernel != KernelKind::Table {
        return Err(usage("--table only applies to --kernel table"));
    }
    match args.kernel {
        KernelKind::Pascal => Ok(Kernel::pascal()),
        KernelKind::QPascal => {
            let q = args
                .q
                .ok_or_else(|| usage("--kernel q-pascal requires --q"))?;
            Kernel::q_pascal(q)
                .map_err(|_| usage(format!("--q must be a positive integer, got {q}")))
        }
        KernelKind::Table => {
            let path = args
                .table
                .as_ref()
                .ok_or_else(|| usage("--kernel table requires --table"))?;
            let table = TableKernel::from_path(path)
                .map_err(|e| usage(format!("--table {}: {e}", path.display())))?;
            Ok(Kernel::table(table))
        }
    }
}

/// Writes `content` to `--out` or standard output.
fn emit(out: Option<&PathBuf>, content: &str) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, content)
            .map_err(|e| resource(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(content.as_bytes())
                .and_then(|()| stdout.flush())
                .map_err(|e| resource(format!("cannot write to standard output: {e}")))
        }
    }
}

fn run_compute(args: ComputeArgs) -> Result<u8, Failure> {
    let kernel = build_kernel(&args.kernel)?;
    let i_max = args.imax as i64;
    let j_max = args.jmax.unwrap_or(args.imax) as i64;
    let options = BuildOptions {
        cross_check_fraction: args.cross_check,
        seed: args.seed,
        cell_budget: args.resources.budget_cells,
        on_inexact: DivisionPolicy::OracleFallback,
    };
    let started = Instant::now();
    let h = PdHierarchy::build(&kernel, args.k, i_max, j_max, &options)
        .map_err(|e| resource(e.to_string()))?;
    let level = h.level(args.k);

    let rendered = match args.format {
        Format::Csv => {
            let mut buf = Vec::new();
            level
                .write_csv(args.k as usize, &mut buf)
                .map_err(|e| resource(format!("cannot render CSV: {e}")))?;
            String::from_utf8(buf).expect("CSV output is ASCII")
        }
        Format::Json => {
            let values: Vec<Vec<String>> = (0..=i_max)
                .map(|i| (0..=j_max).map(|j| level.get(i, j).to_string()).collect())
                .collect();
            let doc = serde_json::json!({
                "kernel": kernel.describe(),
                "k": args.k,
                "i_max": i_max,
                "j_max": j_max,
                "values": values,
            });
            let mut text = serde_json::to_string_pretty(&doc).expect("grid JSON serializes");
            text.push('\n');
            text
        }
    };
    emit(args.out.as_ref(), &rendered)?;

    let stats = h.stats();
    eprintln!(
        "order {} over [0, {i_max}] x [0, {j_max}]: {} cells, max {} bits, \
         {} divisor fallbacks, {} cross-checked, {} ms",
        args.k,
        h.cell_count(),
        h.max_bits(),
        stats.fallback_entries,
        stats.cross_checked,
        started.elapsed().as_millis()
    );
    Ok(0)
}

fn run_verify(args: VerifyArgs) -> Result<u8, Failure> {
    let kernel = build_kernel(&args.kernel)?;
    let i_max = args.imax as i64;
    let j_max = args.jmax.unwrap_or(args.imax) as i64;
    let options = BuildOptions {
        cross_check_fraction: args.cross_check,
        seed: args.seed,
        cell_budget: args.resources.budget_cells,
        on_inexact: DivisionPolicy::OracleFallback,
    };
    let started = Instant::now();

    // Orders materialized per claim: window identities look one order past
    // --kmax, the order-direction inequality two past --mmax, and the
    // iterated-operator claim exactly --kmax.
    let outcome = match args.claim {
        Claim::Hadamard => {
            pdlc::check_hadamard_inequality(args.trials, args.seed, args.max_len, args.cap)
        }
        Claim::KernelProbe => {
            pdlc::probe_kernel_factorization(&kernel, args.kmax, i_max, j_max, &options, args.cap)
        }
        claim => {
            let levels_needed = match claim {
                Claim::KDirectionStated | Claim::KDirectionReversed => args.mmax + 2,
                Claim::InfiniteLc => args.kmax,
                _ => args.kmax + 1,
            };
            match PdHierarchy::build(&kernel, levels_needed, i_max, j_max, &options) {
                Err(e) => build_failure_outcome(claim, &args, &kernel, i_max, j_max, e),
                Ok(h) => match claim {
                    Claim::Factorization => {
                        pdlc::check_factorization(&h, args.kmin, args.kmax, args.cap)
                    }
                    Claim::DodgsonEq1 => {
                        pdlc::check_dodgson(&h, DodgsonForm::Eq1, args.kmin, args.kmax, args.cap)
                    }
                    Claim::DodgsonEq2 => {
                        pdlc::check_dodgson(&h, DodgsonForm::Eq2, args.kmin, args.kmax, args.cap)
                    }
                    Claim::SlidingRule => {
                        pdlc::check_sliding_rule(&h, args.kmin, args.kmax, args.cap)
                    }
                    Claim::InfiniteLc => pdlc::check_infinite_lc_depth(
                        &h,
                        args.mmax,
                        args.resources.budget_bits,
                        args.cap,
                    ),
                    Claim::KDirectionStated => {
                        pdlc::check_k_direction(&h, KDirection::AsStated, args.mmax, args.cap)
                    }
                    Claim::KDirectionReversed => {
                        pdlc::check_k_direction(&h, KDirection::Reversed, args.mmax, args.cap)
                    }
                    Claim::Hadamard | Claim::KernelProbe => unreachable!("handled above"),
                },
            }
        }
    };

    let mut report = outcome.report.clone();
    if args.timing {
        report.timing_ms = started.elapsed().as_millis() as u64;
    }
    let mut rendered = serde_json::to_string_pretty(&report).expect("reports serialize");
    rendered.push('\n');
    emit(args.out.as_ref(), &rendered)?;
    summarize(&outcome, &report, started);

    Ok(match report.status {
        CheckStatus::Holds => 0,
        CheckStatus::Refuted => 1,
        CheckStatus::Error => 3,
    })
}

/// Shapes a hierarchy build failure as an error-status report so the claim,
/// window, and failure reason still reach the output stream.
fn build_failure_outcome(
    claim: Claim,
    args: &VerifyArgs,
    kernel: &Kernel,
    i_max: i64,
    j_max: i64,
    error: pdlc::BuildError,
) -> CheckOutcome {
    let (claim_id, params) = match claim {
        Claim::Factorization => (
            "factorization",
            ReportParams::window(args.kmin, args.kmax, i_max, j_max),
        ),
        Claim::DodgsonEq1 => (
            "dodgson-eq1",
            ReportParams::window(args.kmin, args.kmax, i_max, j_max),
        ),
        Claim::DodgsonEq2 => (
            "dodgson-eq2",
            ReportParams::window(args.kmin, args.kmax, i_max, j_max),
        ),
        Claim::SlidingRule => (
            "sliding-rule",
            ReportParams::window(args.kmin, args.kmax, i_max, j_max),
        ),
        Claim::InfiniteLc => {
            let mut p = ReportParams::window(1, args.kmax, i_max, j_max);
            p.depth = Some(args.mmax);
            ("infinite-lc", p)
        }
        Claim::KDirectionStated => (
            "k-direction-stated",
            ReportParams::window(1, args.mmax, i_max, j_max),
        ),
        Claim::KDirectionReversed => (
            "k-direction-reversed",
            ReportParams::window(1, args.mmax, i_max, j_max),
        ),
        Claim::Hadamard | Claim::KernelProbe => unreachable!("no hierarchy build"),
    };
    CheckOutcome {
        report: CheckReport {
            claim_id: claim_id.into(),
            kernel: kernel.describe(),
            params,
            status: CheckStatus::Error,
            checked_count: 0,
            counterexamples: Vec::new(),
            truncated: false,
            timing_ms: 0,
            tool_version: pdlc::tool_version(),
        },
        skipped: 0,
        remark_discrepancies: 0,
        error_detail: Some(error.to_string()),
        depth_reached: None,
        fallback_entries: 0,
        inexact_divisions: 0,
    }
}

fn summarize(outcome: &CheckOutcome, report: &CheckReport, started: Instant) {
    let status = match report.status {
        CheckStatus::Holds => "holds",
        CheckStatus::Refuted => "refuted",
        CheckStatus::Error => "error",
    };
    eprintln!(
        "claim '{}': {status} — {} comparisons, {} counterexample(s) shown{}, {} ms",
        report.claim_id,
        report.checked_count,
        report.counterexamples.len(),
        if report.truncated { " (truncated)" } else { "" },
        started.elapsed().as_millis()
    );
    if outcome.skipped > 0 {
        eprintln!(
            "  skipped {} non-interior or zero-denominator position(s)",
            outcome.skipped
        );
    }
    if outcome.remark_discrepancies > 0 {
        eprintln!(
            "  equality remark: {} position(s) had a log-linear factor but a nonzero residual",
            outcome.remark_discrepancies
        );
    }
    if outcome.fallback_entries > 0 || outcome.inexact_divisions > 0 {
        eprintln!(
            "  build observations: {} divisor fallback(s), {} inexact division(s)",
            outcome.fallback_entries, outcome.inexact_divisions
        );
    }
    if let Some(depth) = outcome.depth_reached {
        eprintln!("  deepest completed iterate: {depth}");
    }
    if let Some(detail) = &outcome.error_detail {
        eprintln!("  error: {detail}");
    }
}

fn run_bench(args: BenchArgs) -> Result<u8, Failure> {
    let kernel = build_kernel(&args.kernel)?;
    let i_max = args.imax as i64;
    let j_max = args.jmax.unwrap_or(args.imax) as i64;
    let budget = args.resources.budget_cells;

    let options = BuildOptions {
        cross_check_fraction: 0.0,
        seed: 0,
        cell_budget: budget,
        on_inexact: DivisionPolicy::OracleFallback,
    };
    let started = Instant::now();
    let condensed = PdHierarchy::build(&kernel, args.kmax, i_max, j_max, &options)
        .map_err(|e| resource(e.to_string()))?;
    let condensation_time = started.elapsed();

    let started = Instant::now();
    let direct = PdHierarchy::build_direct(&kernel, args.kmax, i_max, j_max, budget)
        .map_err(|e| resource(e.to_string()))?;
    let direct_time = started.elapsed();

    for k in 0..=args.kmax {
        let reference = direct.level(k);
        let mismatch = if args.inject_fault && k == args.kmax {
            let corrupted = BigGrid::from_fn(
                reference.origin_i(),
                reference.origin_j(),
                reference.rows(),
                reference.cols(),
                |i, j| {
                    if (i, j) == (0, 0) {
                        condensed.level(k).get(i, j) + 1u8
                    } else {
                        condensed.level(k).get(i, j).clone()
                    }
                },
            );
            corrupted != *reference
        } else {
            condensed.level(k) != reference
        };
        if mismatch {
            eprintln!(
                "mismatch: condensation and direct elimination disagree at order {k}; \
                 timing withheld"
            );
            return Ok(1);
        }
    }

    let condensation_ms = condensation_time.as_secs_f64() * 1e3;
    let direct_ms = direct_time.as_secs_f64() * 1e3;
    let speedup = direct_ms / condensation_ms.max(1e-6);
    let doc = serde_json::json!({
        "method": {
            "condensation": { "wall_ms": condensation_ms },
            "direct": { "wall_ms": direct_ms },
        },
        "entries": condensed.cell_count(),
        "max_bits": condensed.max_bits(),
        "speedup": speedup,
    });
    let mut rendered = serde_json::to_string_pretty(&doc).expect("bench JSON serializes");
    rendered.push('\n');
    emit(args.out.as_ref(), &rendered)?;
    eprintln!(
        "orders 0..={} over [0, {i_max}] x [0, {j_max}]: condensation {condensation_ms:.1} ms, \
         direct {direct_ms:.1} ms, speedup {speedup:.2}x",
        args.kmax
    );
    Ok(0)
}
