//! Sparse vectors and the error metrics reported by the harness.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A sparse vector: ambient dimension plus (index, value) pairs.
///
/// Entries are kept sorted by index, indices are distinct and values nonzero,
/// so `entries.len()` is exactly the l0 norm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseVector {
    pub n: usize,
    pub entries: Vec<(usize, f64)>,
}

impl SparseVector {
    pub fn new(n: usize, mut entries: Vec<(usize, f64)>) -> Result<Self> {
        entries.sort_unstable_by_key(|&(i, _)| i);
        for w in entries.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::InvalidParameter(format!(
                    "duplicate index {} in sparse vector",
                    w[0].0
                )));
            }
        }
        for &(i, v) in &entries {
            if i >= n {
                return Err(Error::OutOfRange {
                    what: "sparse entry index",
                    value: i as u64,
                    limit: n.saturating_sub(1) as u64,
                });
            }
            if v == 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "zero value at index {i} in sparse vector"
                )));
            }
        }
        Ok(SparseVector { n, entries })
    }

    pub fn zero(n: usize) -> Self {
        SparseVector {
            n,
            entries: Vec::new(),
        }
    }

    pub fn support(&self) -> Vec<usize> {
        self.entries.iter().map(|&(i, _)| i).collect()
    }

    pub fn sparsity(&self) -> usize {
        self.entries.len()
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        for &(i, v) in &self.entries {
            out[i] = v;
        }
        out
    }

    /// Dense slice -> sparse, keeping entries with |v| > tol.
    pub fn from_dense(values: &[f64], tol: f64) -> Self {
        let entries = values
            .iter()
            .enumerate()
            .filter(|(_, v)| v.abs() > tol)
            .map(|(i, &v)| (i, v))
            .collect();
        SparseVector {
            n: values.len(),
            entries,
        }
    }

    pub fn l1_norm(&self) -> f64 {
        self.entries.iter().map(|(_, v)| v.abs()).sum()
    }

    pub fn l2_norm(&self) -> f64 {
        self.entries
            .iter()
            .map(|(_, v)| v * v)
            .sum::<f64>()
            .sqrt()
    }
}

/// Error metrics between an estimate and the planted truth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorMetrics {
    /// Relative l2 error ||xhat - x||_2 / ||x||_2 (absolute when x = 0).
    pub l2: f64,
    /// Absolute l-infinity error.
    pub linf: f64,
    /// Whether the supports agree exactly as sets.
    pub support_match: bool,
    /// Exact recovery: supports match and every coordinate is bit-equal.
    pub exact: bool,
}

/// Compares a sparse estimate against the planted sparse truth.
pub fn sparse_metrics(estimate: &SparseVector, truth: &SparseVector) -> ErrorMetrics {
    let mut sq = 0.0f64;
    let mut linf = 0.0f64;
    let mut i = 0;
    let mut j = 0;
    let ea = &estimate.entries;
    let eb = &truth.entries;
    while i < ea.len() || j < eb.len() {
        let d = match (ea.get(i), eb.get(j)) {
            (Some(&(ia, va)), Some(&(ib, vb))) => {
                if ia == ib {
                    i += 1;
                    j += 1;
                    va - vb
                } else if ia < ib {
                    i += 1;
                    va
                } else {
                    j += 1;
                    -vb
                }
            }
            (Some(&(_, va)), None) => {
                i += 1;
                va
            }
            (None, Some(&(_, vb))) => {
                j += 1;
                -vb
            }
            (None, None) => break,
        };
        sq += d * d;
        linf = linf.max(d.abs());
    }
    let support_match = estimate.support() == truth.support();
    finish_metrics(sq.sqrt(), linf, support_match, truth.l2_norm())
}

/// Compares a dense estimate against the planted sparse truth.
/// Support of the dense estimate uses |v| > support_tol.
pub fn dense_metrics(estimate: &[f64], truth: &SparseVector, support_tol: f64) -> ErrorMetrics {
    let xt = truth.to_dense();
    let mut sq = 0.0f64;
    let mut linf = 0.0f64;
    for (a, b) in estimate.iter().zip(xt.iter()) {
        let d = a - b;
        sq += d * d;
        linf = linf.max(d.abs());
    }
    let est_supp: Vec<usize> = estimate
        .iter()
        .enumerate()
        .filter(|(_, v)| v.abs() > support_tol)
        .map(|(i, _)| i)
        .collect();
    let support_match = est_supp == truth.support();
    finish_metrics(sq.sqrt(), linf, support_match, truth.l2_norm())
}

fn finish_metrics(l2_abs: f64, linf: f64, support_match: bool, truth_norm: f64) -> ErrorMetrics {
    let l2 = if truth_norm > 0.0 {
        l2_abs / truth_norm
    } else {
        l2_abs
    };
    ErrorMetrics {
        l2,
        linf,
        support_match,
        exact: support_match && linf == 0.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction_validates() {
        assert!(SparseVector::new(5, vec![(0, 1.0), (4, -2.0)]).is_ok());
        assert!(SparseVector::new(5, vec![(5, 1.0)]).is_err());
        assert!(SparseVector::new(5, vec![(1, 0.0)]).is_err());
        assert!(SparseVector::new(5, vec![(1, 1.0), (1, 2.0)]).is_err());
    }

    #[test]
    fn metrics_detect_exact_recovery() {
        let x = SparseVector::new(10, vec![(2, 1.5), (7, -3.0)]).unwrap();
        let m = sparse_metrics(&x, &x);
        assert!(m.exact && m.support_match);
        assert_eq!(m.l2, 0.0);
        assert_eq!(m.linf, 0.0);

        let y = SparseVector::new(10, vec![(2, 1.5), (7, -3.0 + 1e-9)]).unwrap();
        let m = sparse_metrics(&y, &x);
        assert!(m.support_match && !m.exact);
        assert!(m.linf > 0.0);
    }

    #[test]
    fn dense_metrics_threshold_support() {
        let x = SparseVector::new(4, vec![(1, 2.0)]).unwrap();
        let est = [1e-9, 2.0, 0.0, -1e-9];
        let m = dense_metrics(&est, &x, 1e-6);
        assert!(m.support_match);
        assert!(m.l2 < 1e-8);
    }
}
