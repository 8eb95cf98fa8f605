//! One-pass recovery from binary measurements.
//!
//! For each index j the decoder gathers the q measurements that touch
//! column j (the reduced measurement vector), counts how many are nonzero,
//! and if a majority are, reads the coordinate value off the largest group
//! of (near-)equal entries. No iteration: one pass over the n columns, each
//! processed independently, which is why the whole decode parallelizes over
//! columns.

use crate::error::{Error, Result};
use crate::exec::{map_indexed, Exec};
use crate::matrix::DeVoreMatrix;
use crate::vector::SparseVector;

/// Relative floor for treating two floats as the same measurement value.
const EQ_TOL_FLOOR: f64 = 9.094947017729282e-13; // 2^-40

/// Decoder tolerances. `zero_tol` is the threshold below which an entry
/// counts as zero; the tolerant decoder groups entries whose spread is at
/// most `2 * zero_tol`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecoveryConfig {
    pub zero_tol: f64,
}

impl RecoveryConfig {
    /// Exact-arithmetic configuration (zero tolerance).
    pub fn exact() -> Self {
        RecoveryConfig { zero_tol: 0.0 }
    }

    pub fn with_tol(zero_tol: f64) -> Result<Self> {
        let tol_ok = zero_tol.is_finite() && zero_tol >= 0.0;
        if !tol_ok {
            return Err(Error::InvalidParameter(format!(
                "zero tolerance must be nonnegative, got {zero_tol}"
            )));
        }
        Ok(RecoveryConfig { zero_tol })
    }

    /// Allowed spread of a value group in the tolerant decoder.
    pub fn group_spread(&self) -> f64 {
        2.0 * self.zero_tol
    }

    /// Strict majority count for a reduced vector of length q.
    pub fn majority(q: usize) -> usize {
        q / 2 + 1
    }
}

impl Default for RecoveryConfig {
    fn default() -> Self {
        RecoveryConfig::exact()
    }
}

/// The q measurements in which one coordinate participates.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedVector {
    pub values: Vec<f64>,
}

/// Verdict of the membership test on a reduced vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SupportDecision {
    /// Too few nonzero entries: the coordinate is zero.
    Out,
    /// Majority nonzero; carries the length of the largest equal-value run.
    In { run_len: usize },
}

/// Per-index decode failure: a majority of entries were nonzero but no value
/// group reached majority size. Signals inputs outside the guaranteed regime.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DecodeFailure {
    pub index: usize,
    pub nonzero_count: usize,
    pub longest_run: usize,
}

/// Decode output plus diagnostics. Failures never abort the pass; callers
/// operating outside the guaranteed regime get partial output plus flags.
#[derive(Debug, Clone, PartialEq)]
pub struct DecodeReport {
    pub estimate: SparseVector,
    pub failures: Vec<DecodeFailure>,
    /// Number of reduced vectors visited; always equals n (single pass).
    pub columns_scanned: usize,
    /// Total comparisons spent sorting reduced vectors, the dominant cost.
    pub sort_comparisons: u64,
}

/// Gathers the reduced measurement vector of column `j`.
pub fn reduced_vector(mat: &DeVoreMatrix, y: &[f64], j: usize) -> Result<ReducedVector> {
    check_len(mat, y)?;
    if j >= mat.cols() {
        return Err(Error::OutOfRange {
            what: "column index",
            value: j as u64,
            limit: (mat.cols() - 1) as u64,
        });
    }
    let mut values = vec![0.0f64; mat.q() as usize];
    mat.fill_reduced(j, y, &mut values);
    Ok(ReducedVector { values })
}

/// Membership test: `Out` when at most half the entries are nonzero,
/// otherwise `In` with the size of the largest equal-value group.
pub fn support_test(rv: &ReducedVector, config: &RecoveryConfig) -> SupportDecision {
    let q = rv.values.len();
    let nonzero = rv
        .values
        .iter()
        .filter(|v| v.abs() > config.zero_tol)
        .count();
    if nonzero < RecoveryConfig::majority(q) {
        return SupportDecision::Out;
    }
    let scale = rv.values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let window = config.zero_tol.max(EQ_TOL_FLOOR * scale);
    let mut sorted = rv.values.clone();
    sorted.sort_unstable_by(f64::total_cmp);
    let (len, _, _) = longest_window(&sorted, window);
    SupportDecision::In { run_len: len }
}

/// Exact decoder: one pass over all columns, equality groups up to a tiny
/// float-accumulation tolerance. Recovers x exactly whenever the sparsity
/// regime of the measurement design holds.
pub fn decode_exact(mat: &DeVoreMatrix, y: &[f64], config: &RecoveryConfig) -> Result<DecodeReport> {
    decode_exact_with(mat, y, config, Exec::default())
}

pub fn decode_exact_with(
    mat: &DeVoreMatrix,
    y: &[f64],
    config: &RecoveryConfig,
    exec: Exec,
) -> Result<DecodeReport> {
    decode_core(mat, y, config, false, exec)
}

/// Tolerant decoder for noisy or nearly sparse inputs: entries count as
/// nonzero above `zero_tol`, groups may spread up to `2 * zero_tol`, and the
/// estimate is the group average.
pub fn decode_robust(mat: &DeVoreMatrix, y: &[f64], config: &RecoveryConfig) -> Result<DecodeReport> {
    decode_robust_with(mat, y, config, Exec::default())
}

pub fn decode_robust_with(
    mat: &DeVoreMatrix,
    y: &[f64],
    config: &RecoveryConfig,
    exec: Exec,
) -> Result<DecodeReport> {
    decode_core(mat, y, config, true, exec)
}

#[derive(Debug, Clone, Copy)]
enum ColumnDecision {
    Zero,
    Value(f64),
    NoRun { nonzero: usize, longest_run: usize },
}

fn decode_core(
    mat: &DeVoreMatrix,
    y: &[f64],
    config: &RecoveryConfig,
    robust: bool,
    exec: Exec,
) -> Result<DecodeReport> {
    check_len(mat, y)?;
    let q = mat.q() as usize;
    let n = mat.cols();
    let window = if robust {
        config.group_spread()
    } else {
        let scale = y.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        config.zero_tol.max(EQ_TOL_FLOOR * scale)
    };
    let zero_tol = config.zero_tol;

    let outcomes = map_indexed(
        exec,
        n,
        || vec![0.0f64; q],
        |values, j| {
            mat.fill_reduced(j, y, values);
            scan_column(values, zero_tol, window, robust)
        },
    );

    let mut entries = Vec::new();
    let mut failures = Vec::new();
    let mut sort_comparisons = 0u64;
    for (j, (decision, comparisons)) in outcomes.iter().enumerate() {
        sort_comparisons += comparisons;
        match *decision {
            ColumnDecision::Zero => {}
            ColumnDecision::Value(v) => entries.push((j, v)),
            ColumnDecision::NoRun {
                nonzero,
                longest_run,
            } => failures.push(DecodeFailure {
                index: j,
                nonzero_count: nonzero,
                longest_run,
            }),
        }
    }
    Ok(DecodeReport {
        estimate: SparseVector {
            n,
            entries,
        },
        failures,
        columns_scanned: outcomes.len(),
        sort_comparisons,
    })
}

/// Per-column decision. Sorts by value (not magnitude) so that the group of
/// equal entries is contiguous; magnitude order would interleave entries of
/// opposite sign.
fn scan_column(values: &mut [f64], zero_tol: f64, window: f64, robust: bool) -> (ColumnDecision, u64) {
    let q = values.len();
    let majority = RecoveryConfig::majority(q);
    let nonzero = values.iter().filter(|v| v.abs() > zero_tol).count();
    if nonzero < majority {
        return (ColumnDecision::Zero, 0);
    }
    let mut comparisons = 0u64;
    values.sort_unstable_by(|a, b| {
        comparisons += 1;
        f64::total_cmp(a, b)
    });
    let (len, lo, hi) = longest_window(values, window);
    if len < majority {
        return (
            ColumnDecision::NoRun {
                nonzero,
                longest_run: len,
            },
            comparisons,
        );
    }
    let value = if robust {
        if values[lo] == values[hi] {
            values[lo]
        } else {
            values[lo..=hi].iter().sum::<f64>() / len as f64
        }
    } else {
        values[lo + (hi - lo) / 2]
    };
    if value == 0.0 {
        // a majority group of exact zeros decodes to zero
        return (ColumnDecision::Zero, comparisons);
    }
    (ColumnDecision::Value(value), comparisons)
}

/// Longest contiguous window of sorted `values` whose spread is at most
/// `window`; earliest such window wins ties. Returns (len, lo, hi).
fn longest_window(values: &[f64], window: f64) -> (usize, usize, usize) {
    let mut best = (0usize, 0usize, 0usize);
    let mut lo = 0usize;
    for hi in 0..values.len() {
        while values[hi] - values[lo] > window {
            lo += 1;
        }
        let len = hi - lo + 1;
        if len > best.0 {
            best = (len, lo, hi);
        }
    }
    best
}

fn check_len(mat: &DeVoreMatrix, y: &[f64]) -> Result<()> {
    if y.len() != mat.rows() {
        return Err(Error::DimensionMismatch {
            expected: mat.rows(),
            got: y.len(),
        });
    }
    Ok(())
}
