//! Exact integer entry sources for the underlying lower-triangular matrix.
//!
//! Three kinds are supported: the binomial (Pascal) kernel, its q-deformation
//! at a positive integer q, and a finite file-backed table. All kinds share
//! the zero conventions of the rest of the crate: entries vanish for column
//! indices outside `[0, a]` (triangular kinds) or outside the declared table
//! extent.
//!
//! Binomial entries are produced by the additive Pascal recurrence with
//! memoized rows, never by factorials, so no division occurs and the q-case
//! uses the identical machinery with a `q^b` weight.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt;
use std::io::Read;
use std::path::Path;
use std::sync::Mutex;
use thiserror::Error;

/// Exact binomial coefficient, zero for `b < 0` or `b > a`.
///
/// Computed by the additive recurrence `C(a,b) = C(a-1,b-1) + C(a-1,b)`
/// row by row.
pub fn binomial(a: u64, b: i64) -> BigInt {
    if b < 0 || b as u64 > a {
        return BigInt::zero();
    }
    let mut row = vec![BigInt::one()];
    for _ in 1..=a {
        let mut next = Vec::with_capacity(row.len() + 1);
        next.push(BigInt::one());
        for w in row.windows(2) {
            next.push(&w[0] + &w[1]);
        }
        next.push(BigInt::one());
        row = next;
    }
    row[b as usize].clone()
}

/// Gaussian binomial coefficient at integer `q >= 1`, zero outside
/// `0 <= b <= a`, via the recurrence `[a,b] = [a-1,b-1] + q^b * [a-1,b]`.
///
/// Panics if `q == 0`; kernel construction rejects that case up front.
pub fn q_binomial(a: u64, b: i64, q: u64) -> BigInt {
    assert!(q >= 1, "q-binomial requires q >= 1");
    if b < 0 || b as u64 > a {
        return BigInt::zero();
    }
    let q = BigInt::from(q);
    let mut row = vec![BigInt::one()];
    for _ in 1..=a {
        let mut next = Vec::with_capacity(row.len() + 1);
        let mut q_pow = BigInt::one();
        next.push(BigInt::one());
        for w in row.windows(2) {
            q_pow *= &q; // q^b for the current column b
            next.push(&w[0] + &q_pow * &w[1]);
        }
        next.push(BigInt::one());
        row = next;
    }
    row[b as usize].clone()
}

#[derive(Debug, Error)]
pub enum KernelError {
    #[error("q must be a positive integer, got {0}")]
    InvalidQ(u64),
    #[error("failed to read table kernel: {0}")]
    TableIo(#[from] std::io::Error),
    #[error("malformed table kernel record {line}: {reason}")]
    TableMalformed { line: u64, reason: String },
    #[error("duplicate table kernel entry at ({a}, {b})")]
    TableDuplicate { a: i64, b: i64 },
}

/// Finite matrix loaded from CSV records `a,b,value`; absent entries are zero.
#[derive(Debug, Clone)]
pub struct TableKernel {
    entries: BTreeMap<(i64, i64), BigInt>,
}

impl TableKernel {
    /// Parses CSV records `a,b,value` (decimal strings). A leading header row
    /// `a,b,value` is accepted and skipped. Duplicate `(a, b)` pairs and
    /// malformed records are rejected at load time so that lookups never fail.
    pub fn from_reader<R: Read>(reader: R) -> Result<Self, KernelError> {
        let mut csv_reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .from_reader(reader);
        let mut entries = BTreeMap::new();
        for (idx, record) in csv_reader.records().enumerate() {
            let line = idx as u64 + 1;
            let record = record.map_err(|e| KernelError::TableMalformed {
                line,
                reason: e.to_string(),
            })?;
            if idx == 0 && record.iter().eq(["a", "b", "value"]) {
                continue;
            }
            if record.len() != 3 {
                return Err(KernelError::TableMalformed {
                    line,
                    reason: format!("expected 3 fields, got {}", record.len()),
                });
            }
            let field = |pos: usize, name: &str| -> Result<&str, KernelError> {
                record
                    .get(pos)
                    .map(str::trim)
                    .ok_or_else(|| KernelError::TableMalformed {
                        line,
                        reason: format!("missing {name}"),
                    })
            };
            let a: i64 = field(0, "a")?
                .parse()
                .map_err(|e| KernelError::TableMalformed {
                    line,
                    reason: format!("bad index a: {e}"),
                })?;
            let b: i64 = field(1, "b")?
                .parse()
                .map_err(|e| KernelError::TableMalformed {
                    line,
                    reason: format!("bad index b: {e}"),
                })?;
            let value: BigInt =
                field(2, "value")?
                    .parse()
                    .map_err(|e| KernelError::TableMalformed {
                        line,
                        reason: format!("bad value: {e}"),
                    })?;
            if entries.insert((a, b), value).is_some() {
                return Err(KernelError::TableDuplicate { a, b });
            }
        }
        Ok(TableKernel { entries })
    }

    pub fn from_path(path: &Path) -> Result<Self, KernelError> {
        Self::from_reader(std::fs::File::open(path)?)
    }

    pub fn get(&self, a: i64, b: i64) -> BigInt {
        self.entries
            .get(&(a, b))
            .cloned()
            .unwrap_or_else(BigInt::zero)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

enum KernelKind {
    Pascal,
    QPascal { q: u64 },
    Table(TableKernel),
}

/// An exact integer entry source `K(a, b)`.
///
/// Triangular kinds keep a row cache behind a mutex that is grown one row at
/// a time, so concurrent lookups always observe fully built rows and the
/// observable behaviour is a pure function.
pub struct Kernel {
    kind: KernelKind,
    rows: Mutex<Vec<Vec<BigInt>>>,
}

/// Kernel identity as echoed into reports: `{kind, q?}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KernelDesc {
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<u64>,
}

impl Kernel {
    pub fn pascal() -> Self {
        Kernel {
            kind: KernelKind::Pascal,
            rows: Mutex::new(Vec::new()),
        }
    }

    /// q-deformed kernel at integer `q >= 1`; `q == 1` coincides with the
    /// plain Pascal kernel at every entry.
    pub fn q_pascal(q: u64) -> Result<Self, KernelError> {
        if q == 0 {
            return Err(KernelError::InvalidQ(q));
        }
        Ok(Kernel {
            kind: KernelKind::QPascal { q },
            rows: Mutex::new(Vec::new()),
        })
    }

    pub fn table(table: TableKernel) -> Self {
        Kernel {
            kind: KernelKind::Table(table),
            rows: Mutex::new(Vec::new()),
        }
    }

    pub fn describe(&self) -> KernelDesc {
        match &self.kind {
            KernelKind::Pascal => KernelDesc {
                kind: "pascal".into(),
                q: None,
            },
            KernelKind::QPascal { q } => KernelDesc {
                kind: "q-pascal".into(),
                q: Some(*q),
            },
            KernelKind::Table(_) => KernelDesc {
                kind: "table".into(),
                q: None,
            },
        }
    }

    /// The entry `K(a, b)` under the shared zero conventions. Total: any
    /// index pair is accepted.
    pub fn entry(&self, a: i64, b: i64) -> BigInt {
        match &self.kind {
            KernelKind::Table(t) => t.get(a, b),
            KernelKind::Pascal | KernelKind::QPascal { .. } => {
                if a < 0 || b < 0 || b > a {
                    return BigInt::zero();
                }
                let mut rows = self.rows.lock().expect("kernel row cache poisoned");
                while rows.len() <= a as usize {
                    let next = self.extend_row(rows.last());
                    rows.push(next);
                }
                rows[a as usize][b as usize].clone()
            }
        }
    }

    fn extend_row(&self, prev: Option<&Vec<BigInt>>) -> Vec<BigInt> {
        let Some(prev) = prev else {
            return vec![BigInt::one()];
        };
        let mut next = Vec::with_capacity(prev.len() + 1);
        next.push(BigInt::one());
        match &self.kind {
            KernelKind::Pascal => {
                for w in prev.windows(2) {
                    next.push(&w[0] + &w[1]);
                }
            }
            KernelKind::QPascal { q } => {
                let q = BigInt::from(*q);
                let mut q_pow = BigInt::one();
                for w in prev.windows(2) {
                    q_pow *= &q;
                    next.push(&w[0] + &q_pow * &w[1]);
                }
            }
            KernelKind::Table(_) => unreachable!("table kernels bypass the row cache"),
        }
        next.push(BigInt::one());
        next
    }
}

impl fmt::Debug for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = self.describe();
        match d.q {
            Some(q) => write!(f, "Kernel({}, q={q})", d.kind),
            None => write!(f, "Kernel({})", d.kind),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent oracle: factorial formula.
    fn binom_fact(n: u64, k: i64) -> BigInt {
        if k < 0 || k as u64 > n {
            return BigInt::zero();
        }
        let k = k as u64;
        let num: BigInt = (n - k + 1..=n).map(BigInt::from).product();
        let den: BigInt = (1..=k).map(BigInt::from).product();
        num / den
    }

    #[test]
    fn binomial_examples() {
        assert_eq!(binomial(5, 2), binom_fact(5, 2));
        assert_eq!(binomial(5, 2), BigInt::from(10));
        assert_eq!(binomial(3, 5), BigInt::zero());
        assert_eq!(binomial(7, 0), BigInt::from(1));
        assert_eq!(binomial(0, 0), BigInt::from(1));
        assert_eq!(binomial(6, -2), BigInt::zero());
    }

    #[test]
    fn pascal_recurrence_exhaustive_to_64() {
        for a in 1..=64u64 {
            for b in 1..=a as i64 {
                assert_eq!(binomial(a, b), binomial(a - 1, b - 1) + binomial(a - 1, b));
            }
        }
    }

    #[test]
    fn binomial_symmetry() {
        for a in 0..=64u64 {
            for b in 0..=a as i64 {
                assert_eq!(binomial(a, b), binomial(a, a as i64 - b));
            }
        }
    }

    /// Independent oracle for the Gaussian coefficient: product formula
    /// prod_{t=0}^{b-1} (q^(a-t) - 1) / (q^(b-t) - 1), evaluated exactly.
    fn q_binom_product(a: u64, b: u64, q: u64) -> BigInt {
        let q = BigInt::from(q);
        let mut num = BigInt::one();
        let mut den = BigInt::one();
        for t in 0..b {
            num *= q.pow((a - t) as u32) - 1;
            den *= q.pow((b - t) as u32) - 1;
        }
        num / den
    }

    #[test]
    fn q_binomial_examples() {
        // (15 * 7) / (3 * 1) = 35 at q = 2.
        assert_eq!(q_binomial(4, 2, 2), q_binom_product(4, 2, 2));
        assert_eq!(q_binomial(4, 2, 2), BigInt::from(35));
        // 1 + q at q = 3.
        assert_eq!(q_binomial(2, 1, 3), BigInt::from(4));
        for q in [1, 2, 3, 7] {
            assert_eq!(q_binomial(9, 0, q), BigInt::one());
        }
        assert_eq!(q_binomial(3, 5, 2), BigInt::zero());
        assert_eq!(q_binomial(3, -1, 2), BigInt::zero());
    }

    #[test]
    fn q_binomial_matches_product_formula() {
        for q in [2u64, 3, 5] {
            for a in 0..=12u64 {
                for b in 0..=a {
                    assert_eq!(q_binomial(a, b as i64, q), q_binom_product(a, b, q));
                }
            }
        }
    }

    #[test]
    fn q_one_reduces_to_binomial_exhaustive_to_32() {
        for a in 0..=32u64 {
            for b in 0..=a as i64 {
                assert_eq!(q_binomial(a, b, 1), binomial(a, b));
            }
        }
    }

    #[test]
    fn kernel_dispatch_matches_direct_functions() {
        let pascal = Kernel::pascal();
        assert_eq!(pascal.entry(4, 2), BigInt::from(6));
        assert_eq!(pascal.entry(4, 7), BigInt::zero());
        assert_eq!(pascal.entry(-1, 0), BigInt::zero());

        let q1 = Kernel::q_pascal(1).unwrap();
        let q2 = Kernel::q_pascal(2).unwrap();
        for a in 0..=16i64 {
            for b in -1..=a + 1 {
                assert_eq!(pascal.entry(a, b), binomial(a as u64, b));
                assert_eq!(q1.entry(a, b), pascal.entry(a, b));
                assert_eq!(q2.entry(a, b), q_binomial(a as u64, b, 2));
            }
        }
    }

    #[test]
    fn q_zero_is_rejected_at_construction() {
        assert!(matches!(Kernel::q_pascal(0), Err(KernelError::InvalidQ(0))));
    }

    #[test]
    fn table_kernel_loads_and_zero_extends() {
        let csv = "a,b,value\n0,0,1\n1,0,1\n1,1,1\n2,2,-7\n";
        let table = TableKernel::from_reader(csv.as_bytes()).unwrap();
        assert_eq!(table.len(), 4);
        let k = Kernel::table(table);
        assert_eq!(k.entry(2, 2), BigInt::from(-7));
        assert_eq!(k.entry(0, 1), BigInt::zero());
        assert_eq!(k.entry(2, 7), BigInt::zero());
        assert_eq!(k.entry(-3, -3), BigInt::zero());
    }

    #[test]
    fn table_kernel_all_ones_outside_extent() {
        let mut csv = String::new();
        for a in 0..5 {
            for b in 0..5 {
                csv.push_str(&format!("{a},{b},1\n"));
            }
        }
        let k = Kernel::table(TableKernel::from_reader(csv.as_bytes()).unwrap());
        assert_eq!(k.entry(2, 7), BigInt::zero());
        assert_eq!(k.entry(2, 3), BigInt::one());
    }

    #[test]
    fn table_kernel_rejects_duplicates() {
        let csv = "0,0,1\n0,0,2\n";
        match TableKernel::from_reader(csv.as_bytes()) {
            Err(KernelError::TableDuplicate { a: 0, b: 0 }) => {}
            other => panic!("expected duplicate error, got {other:?}"),
        }
    }

    #[test]
    fn table_kernel_rejects_malformed_records() {
        for bad in ["0,0\n", "0,0,1,9\n", "x,0,1\n", "0,y,1\n", "0,0,1.5\n"] {
            assert!(
                matches!(
                    TableKernel::from_reader(bad.as_bytes()),
                    Err(KernelError::TableMalformed { .. })
                ),
                "input {bad:?} should be rejected"
            );
        }
    }

    #[test]
    fn describe_reports_kind_and_q() {
        assert_eq!(
            Kernel::pascal().describe(),
            KernelDesc {
                kind: "pascal".into(),
                q: None
            }
        );
        assert_eq!(
            Kernel::q_pascal(3).unwrap().describe(),
            KernelDesc {
                kind: "q-pascal".into(),
                q: Some(3)
            }
        );
    }
}
