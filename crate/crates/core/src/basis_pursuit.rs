//! l1-minimization baseline (basis pursuit) via operator splitting.
//!
//! Solves min ||z||_1 subject to Az = y, or ||y - Az||_2 <= epsilon when a
//! noise radius is given. The splitting alternates soft-thresholding with a
//! projection onto the constraint set; the projection runs through a cached
//! eigendecomposition of A A^T, which is small (m x m) and built once per
//! matrix. A is binary and sparse, so all products use the column supports.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::matrix::DeVoreMatrix;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasisPursuitConfig {
    /// Relative primal residual tolerance (split consensus gap).
    pub primal_tol: f64,
    /// Relative dual residual tolerance.
    pub dual_tol: f64,
    pub max_iters: usize,
    /// epsilon in ||y - Az||_2 <= epsilon; 0 solves the equality form.
    pub noise_radius: f64,
}

impl BasisPursuitConfig {
    pub fn with_noise_radius(noise_radius: f64) -> Self {
        BasisPursuitConfig {
            noise_radius,
            ..BasisPursuitConfig::default()
        }
    }

    fn validate(&self) -> Result<()> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !positive(self.primal_tol) || !positive(self.dual_tol) {
            return Err(Error::InvalidParameter(
                "residual tolerances must be positive".into(),
            ));
        }
        let radius_ok = self.noise_radius.is_finite() && self.noise_radius >= 0.0;
        if !radius_ok {
            return Err(Error::InvalidParameter(
                "noise radius must be nonnegative".into(),
            ));
        }
        Ok(())
    }
}

impl Default for BasisPursuitConfig {
    fn default() -> Self {
        BasisPursuitConfig {
            primal_tol: 1e-5,
            dual_tol: 1e-5,
            max_iters: 10_000,
            noise_radius: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BpReport {
    /// Dense estimate (the projected, feasible iterate).
    pub estimate: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub primal_residual: f64,
    pub dual_residual: f64,
    /// ||y - A estimate||_2 minus the allowed radius (<= 0 when feasible).
    pub constraint_gap: f64,
}

/// Reusable solver state: cached column supports and the spectral
/// factorization of A A^T used by the constraint projection.
pub struct BpSolver<'a> {
    mat: &'a DeVoreMatrix,
    supports: Vec<u32>,
    eigvecs: DMatrix<f64>,
    eigvals: DVector<f64>,
    pinv: DVector<f64>,
}

impl<'a> BpSolver<'a> {
    pub fn new(mat: &'a DeVoreMatrix) -> Self {
        let q = mat.q() as usize;
        let n = mat.cols();
        let m = mat.rows();
        let mut supports = vec![0u32; n * q];
        let mut rows = vec![0usize; q];
        let mut gram = DMatrix::<f64>::zeros(m, m);
        for j in 0..n {
            mat.fill_support(j, &mut rows);
            for (l, &row) in rows.iter().enumerate() {
                supports[j * q + l] = row as u32;
            }
            for &a in &rows {
                for &b in &rows {
                    gram[(a, b)] += 1.0;
                }
            }
        }
        let eig = gram.symmetric_eigen();
        let lambda_max = eig.eigenvalues.iter().fold(0.0f64, |a, &v| a.max(v));
        let cutoff = lambda_max * 1e-10;
        // A A^T is rank-deficient (block sums repeat), so use a pseudo-inverse
        let pinv = eig
            .eigenvalues
            .map(|v| if v > cutoff { 1.0 / v } else { 0.0 });
        BpSolver {
            mat,
            supports,
            eigvecs: eig.eigenvectors,
            eigvals: eig.eigenvalues,
            pinv,
        }
    }

    fn apply(&self, v: &[f64], out: &mut [f64]) {
        let q = self.mat.q() as usize;
        out.iter_mut().for_each(|o| *o = 0.0);
        for (j, &vj) in v.iter().enumerate() {
            if vj != 0.0 {
                for &row in &self.supports[j * q..(j + 1) * q] {
                    out[row as usize] += vj;
                }
            }
        }
    }

    fn apply_transpose(&self, w: &[f64], out: &mut [f64]) {
        let q = self.mat.q() as usize;
        for (j, o) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            for &row in &self.supports[j * q..(j + 1) * q] {
                acc += w[row as usize];
            }
            *o = acc;
        }
    }

    /// Projects `v` onto {u : Au = y} (or the epsilon-ball preimage).
    /// Writes the result into `v` and returns the final constraint norm.
    fn project(&self, v: &mut [f64], y: &[f64], radius: f64, scratch: &mut Scratch) -> f64 {
        self.apply(v, &mut scratch.mrow);
        for (g, &yi) in scratch.mrow.iter_mut().zip(y.iter()) {
            *g -= yi;
        }
        let gnorm = scratch.mrow.iter().map(|g| g * g).sum::<f64>().sqrt();
        if radius > 0.0 && gnorm <= radius {
            return gnorm;
        }
        let g = DVector::from_column_slice(&scratch.mrow);
        let gt = self.eigvecs.tr_mul(&g);
        let coeffs = if radius == 0.0 {
            gt.component_mul(&self.pinv)
        } else {
            let mu = self.solve_radius(&gt, radius);
            DVector::from_fn(gt.len(), |i, _| {
                gt[i] * mu / (1.0 + mu * self.eigvals[i])
            })
        };
        let correction = &self.eigvecs * coeffs;
        self.apply_transpose(correction.as_slice(), &mut scratch.nrow);
        for (vi, c) in v.iter_mut().zip(scratch.nrow.iter()) {
            *vi -= c;
        }
        self.apply(v, &mut scratch.mrow);
        let mut res = 0.0;
        for (a, &yi) in scratch.mrow.iter().zip(y.iter()) {
            res += (a - yi) * (a - yi);
        }
        res.sqrt()
    }

    /// Finds mu >= 0 with || (I + mu A A^T)^-1 g ||_2 = radius by bisection
    /// in the eigenbasis. Monotone decreasing in mu, so this always brackets
    /// unless the out-of-range component of g already exceeds the radius, in
    /// which case the largest bracket is used (closest feasible point).
    fn solve_radius(&self, gt: &DVector<f64>, radius: f64) -> f64 {
        let norm_at = |mu: f64| -> f64 {
            gt.iter()
                .zip(self.eigvals.iter())
                .map(|(g, l)| {
                    let d = 1.0 + mu * l;
                    (g / d) * (g / d)
                })
                .sum::<f64>()
                .sqrt()
        };
        let mut hi = 1.0;
        let mut tries = 0;
        while norm_at(hi) > radius && tries < 80 {
            hi *= 10.0;
            tries += 1;
        }
        if norm_at(hi) > radius {
            return hi; // closest approach; residual floor above the radius
        }
        let mut lo = 0.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if norm_at(mid) > radius {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi
    }

    pub fn solve(&self, y: &[f64], config: &BasisPursuitConfig) -> Result<BpReport> {
        config.validate()?;
        let m = self.mat.rows();
        let n = self.mat.cols();
        if y.len() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                got: y.len(),
            });
        }
        let mut scratch = Scratch {
            mrow: vec![0.0; m],
            nrow: vec![0.0; n],
        };
        let mut u = vec![0.0f64; n];
        let mut z = vec![0.0f64; n];
        let mut w = vec![0.0f64; n];
        let mut rho = 1.0f64;
        let sqrt_n = (n as f64).sqrt();

        let mut iterations = 0;
        let mut converged = false;
        let mut primal = f64::INFINITY;
        let mut dual = f64::INFINITY;
        let mut feas = f64::INFINITY;
        while iterations < config.max_iters {
            iterations += 1;
            // u-step: project z - w onto the measurement constraint
            for ((ui, &zi), &wi) in u.iter_mut().zip(z.iter()).zip(w.iter()) {
                *ui = zi - wi;
            }
            feas = self.project(&mut u, y, config.noise_radius, &mut scratch);
            // z-step: soft threshold at 1/rho
            let kappa = 1.0 / rho;
            let mut dual_sq = 0.0;
            let mut primal_sq = 0.0;
            let mut u_sq = 0.0;
            let mut z_sq = 0.0;
            let mut w_sq = 0.0;
            for ((zi, &ui), wi) in z.iter_mut().zip(u.iter()).zip(w.iter_mut()) {
                let t = ui + *wi;
                let znew = if t > kappa {
                    t - kappa
                } else if t < -kappa {
                    t + kappa
                } else {
                    0.0
                };
                let dz = znew - *zi;
                dual_sq += dz * dz;
                *zi = znew;
                let r = ui - znew;
                primal_sq += r * r;
                *wi += r;
                u_sq += ui * ui;
                z_sq += znew * znew;
                w_sq += *wi * *wi;
            }
            primal = primal_sq.sqrt();
            dual = rho * dual_sq.sqrt();
            let eps_pri = 1e-12 * sqrt_n + config.primal_tol * u_sq.sqrt().max(z_sq.sqrt()).max(1.0);
            let eps_dual = 1e-12 * sqrt_n + config.dual_tol * (rho * w_sq.sqrt()).max(1.0);
            if primal <= eps_pri && dual <= eps_dual {
                converged = true;
                break;
            }
            // residual balancing, spaced out so the penalty cannot run away
            // once both residuals are small and their ratio turns noisy
            if iterations % 10 == 0 {
                if primal > 10.0 * dual && rho < 1e4 {
                    rho *= 2.0;
                    w.iter_mut().for_each(|wi| *wi *= 0.5);
                } else if dual > 10.0 * primal && rho > 1e-4 {
                    rho *= 0.5;
                    w.iter_mut().for_each(|wi| *wi *= 2.0);
                }
            }
        }
        // report the feasible iterate
        let gap = feas - config.noise_radius;
        Ok(BpReport {
            estimate: u,
            iterations,
            converged,
            primal_residual: primal,
            dual_residual: dual,
            constraint_gap: gap,
        })
    }
}

struct Scratch {
    mrow: Vec<f64>,
    nrow: Vec<f64>,
}

/// One-shot convenience wrapper; reuse [`BpSolver`] across repeated solves.
pub fn basis_pursuit_decode(
    mat: &DeVoreMatrix,
    y: &[f64],
    config: &BasisPursuitConfig,
) -> Result<BpReport> {
    BpSolver::new(mat).solve(y, config)
}
