//! Iterative expander-graph recovery baseline.
//!
//! Treats the matrix as the bi-adjacency of a left-regular bipartite graph
//! and repeatedly finds a coordinate whose measurements nearly all show the
//! same residual gap, then absorbs that gap. Terminates when the residual
//! vanishes. Needs the stronger expansion regime (planner: q >= 8(2k - 1)
//! at r = 3), and unlike the one-pass decoder it iterates.

use crate::error::{Error, Result};
use crate::exec::{min_index_hit, Exec};
use crate::matrix::DeVoreMatrix;
use crate::vector::SparseVector;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpanderConfig {
    /// Expansion slack; a coordinate qualifies when at least (1 - 2 epsilon) q
    /// of its gaps agree. Must lie in (0, 1/4].
    pub epsilon: f64,
    /// Iteration cap; hitting it flags the result as non-converged.
    pub max_iters: usize,
    /// Absolute tolerance for "identical gap"; `None` scales 1e-9 with the
    /// measurement magnitude.
    pub gap_tol: Option<f64>,
}

impl ExpanderConfig {
    /// Default slack 1/4 with the empirical iteration cap 10 k log2(n).
    pub fn for_instance(k: usize, n: usize) -> Self {
        let cap = (10.0 * k as f64 * (n as f64).log2()).ceil() as usize;
        ExpanderConfig {
            epsilon: 0.25,
            max_iters: cap.max(1),
            gap_tol: None,
        }
    }

    fn validate(&self) -> Result<()> {
        let eps_ok = self.epsilon.is_finite() && self.epsilon > 0.0 && self.epsilon <= 0.25;
        if !eps_ok {
            return Err(Error::InvalidParameter(format!(
                "epsilon must lie in (0, 1/4], got {}",
                self.epsilon
            )));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidParameter("max_iters must be >= 1".into()));
        }
        Ok(())
    }
}

impl Default for ExpanderConfig {
    fn default() -> Self {
        ExpanderConfig {
            epsilon: 0.25,
            max_iters: 10_000,
            gap_tol: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExpanderReport {
    pub estimate: SparseVector,
    pub iterations: usize,
    pub converged: bool,
    /// Final residual max |y - A xhat| (0 on exact convergence).
    pub residual_linf: f64,
}

/// Runs the gap-absorption recovery until y = A xhat within tolerance.
pub fn expander_decode(
    mat: &DeVoreMatrix,
    y: &[f64],
    config: &ExpanderConfig,
) -> Result<ExpanderReport> {
    expander_decode_with(mat, y, config, Exec::default())
}

pub fn expander_decode_with(
    mat: &DeVoreMatrix,
    y: &[f64],
    config: &ExpanderConfig,
    exec: Exec,
) -> Result<ExpanderReport> {
    config.validate()?;
    if y.len() != mat.rows() {
        return Err(Error::DimensionMismatch {
            expected: mat.rows(),
            got: y.len(),
        });
    }
    let q = mat.q() as usize;
    let n = mat.cols();
    let scale = y.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let gap_tol = config.gap_tol.unwrap_or(1e-9 * scale.max(1.0));
    // "at least (1 - 2 eps) q" agreeing gaps; subtract a hair before ceil so
    // an exactly integral threshold is not bumped up by float fuzz
    let needed = (((1.0 - 2.0 * config.epsilon) * q as f64) - 1e-9).ceil().max(1.0) as usize;

    let mut xhat = vec![0.0f64; n];
    let mut gaps: Vec<f64> = y.to_vec();
    let mut support_rows = vec![0usize; q];
    let mut iterations = 0usize;

    loop {
        let residual = gaps.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        if residual <= gap_tol {
            return Ok(finish(xhat, iterations, true, residual));
        }
        if iterations >= config.max_iters {
            return Ok(finish(xhat, iterations, false, residual));
        }

        // lowest-index coordinate with enough identical nonzero gaps
        let hit = min_index_hit(
            exec,
            n,
            || vec![0.0f64; q],
            |buf, j| {
                mat.fill_reduced(j, &gaps, buf);
                dominant_gap(buf, needed, gap_tol)
            },
        );
        let Some((j, g)) = hit else {
            let residual = gaps.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            return Ok(finish(xhat, iterations, false, residual));
        };

        xhat[j] += g;
        mat.fill_support(j, &mut support_rows);
        for &row in &support_rows {
            gaps[row] -= g;
        }
        iterations += 1;
    }
}

/// Looks for a nonzero value shared by at least `needed` of the gaps,
/// within `tol`. Returns the middle element of the agreeing cluster so that
/// exact-arithmetic inputs propagate bit-exactly.
fn dominant_gap(gaps: &mut [f64], needed: usize, tol: f64) -> Option<f64> {
    let nonzero = gaps.iter().filter(|g| g.abs() > tol).count();
    if nonzero < needed {
        return None;
    }
    gaps.sort_unstable_by(f64::total_cmp);
    let mut lo = 0usize;
    let mut best: Option<(usize, usize, usize)> = None;
    for hi in 0..gaps.len() {
        while gaps[hi] - gaps[lo] > tol {
            lo += 1;
        }
        let len = hi - lo + 1;
        if gaps[lo].abs() <= tol && gaps[hi].abs() <= tol {
            continue; // the zero cluster is not a gap candidate
        }
        if best.is_none_or(|(blen, _, _)| len > blen) {
            best = Some((len, lo, hi));
        }
    }
    match best {
        Some((len, lo, hi)) if len >= needed => {
            let g = gaps[lo + (hi - lo) / 2];
            (g.abs() > tol).then_some(g)
        }
        _ => None,
    }
}

fn finish(xhat: Vec<f64>, iterations: usize, converged: bool, residual_linf: f64) -> ExpanderReport {
    ExpanderReport {
        estimate: SparseVector::from_dense(&xhat, 0.0),
        iterations,
        converged,
        residual_linf,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::{gen_sparse, subseed};

    #[test]
    fn zero_measurement_returns_immediately() {
        let mat = DeVoreMatrix::new(11, 3, 1331).unwrap();
        let y = vec![0.0; mat.rows()];
        let report = expander_decode(&mat, &y, &ExpanderConfig::default()).unwrap();
        assert!(report.converged);
        assert_eq!(report.iterations, 0);
        assert!(report.estimate.entries.is_empty());
    }

    #[test]
    fn one_sparse_converges_in_one_iteration() {
        let mat = DeVoreMatrix::new(11, 3, 1331).unwrap();
        let x = SparseVector::new(1331, vec![(217, -4.5)]).unwrap();
        let y = mat.encode(&x).unwrap();
        let report = expander_decode(&mat, &y, &ExpanderConfig::for_instance(1, 1331)).unwrap();
        assert!(report.converged);
        assert_eq!(report.iterations, 1);
        assert_eq!(report.estimate, x);
    }

    #[test]
    fn recovers_in_expansion_regime() {
        // k = 2 needs q >= 8(2k - 1) = 24
        let mat = DeVoreMatrix::new(29, 3, 2000).unwrap();
        let cfg = ExpanderConfig::for_instance(2, 2000);
        for trial in 0..25u64 {
            let x = gen_sparse(2000, 2, subseed(7, trial), (-10.0, 10.0)).unwrap();
            let y = mat.encode(&x).unwrap();
            let report = expander_decode(&mat, &y, &cfg).unwrap();
            assert!(report.converged, "trial {trial}");
            assert_eq!(report.estimate, x, "trial {trial}");
            assert!(report.iterations <= cfg.max_iters);
        }
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let mat = DeVoreMatrix::new(29, 3, 2000).unwrap();
        let cfg = ExpanderConfig::for_instance(2, 2000);
        let x = gen_sparse(2000, 2, 99, (-10.0, 10.0)).unwrap();
        let y = mat.encode(&x).unwrap();
        let a = expander_decode_with(&mat, &y, &cfg, Exec::Sequential).unwrap();
        let b = expander_decode_with(&mat, &y, &cfg, Exec::Parallel).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn iteration_cap_flags_failure() {
        let mat = DeVoreMatrix::new(5, 3, 125).unwrap();
        // dense garbage measurement: no coordinate can explain it
        let y: Vec<f64> = (0..mat.rows()).map(|i| (i as f64 * 0.37).sin() + 2.0).collect();
        let cfg = ExpanderConfig {
            epsilon: 0.25,
            max_iters: 3,
            gap_tol: None,
        };
        let report = expander_decode(&mat, &y, &cfg).unwrap();
        assert!(!report.converged);
    }

    #[test]
    fn config_validation() {
        let mat = DeVoreMatrix::new(5, 3, 125).unwrap();
        let y = vec![0.0; mat.rows()];
        let bad = ExpanderConfig {
            epsilon: 0.3,
            max_iters: 10,
            gap_tol: None,
        };
        assert!(expander_decode(&mat, &y, &bad).is_err());
    }
}
