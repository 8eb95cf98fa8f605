//! Seeded experiment runner: generate signals, corrupt measurements, decode
//! with each requested method, and collect per-trial metrics.
//!
//! Runs are fully reproducible: the same spec and seed produce the same
//! result rows (timing columns aside). Trials draw their randomness from
//! per-trial subseeds, so they are safe to parallelize; the decode inner
//! loops are where the parallelism lives, so trials run in order here.

use std::path::PathBuf;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::basis_pursuit::{BasisPursuitConfig, BpSolver};
use crate::error::{Error, Result};
use crate::expander::{expander_decode, ExpanderConfig};
use crate::matrix::DeVoreMatrix;
use crate::planner::{plan_expander, plan_l1, plan_new, Feasibility, Method, Plan};
use crate::recovery::{decode_exact, RecoveryConfig};
use crate::signal::{gen_shot_noise, gen_sparse, subseed};
use crate::vector::{dense_metrics, sparse_metrics, ErrorMetrics};

/// Support threshold when reading supports off dense (l1) estimates: one
/// order below the generator's 0.01 value floor and well above the solver
/// dust left at the default stopping tolerance.
pub const DENSE_SUPPORT_TOL: f64 = 1e-3;

fn default_alphas() -> Vec<f64> {
    vec![0.0]
}

fn default_value_range() -> (f64, f64) {
    (-10.0, 10.0)
}

/// Everything needed to reproduce one experiment.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub n: usize,
    pub k: usize,
    /// Maximum number of corrupted measurements per trial.
    #[serde(rename = "M", default)]
    pub corrupted: usize,
    /// Shot-noise scale factors; one full sweep of trials runs per value.
    #[serde(default = "default_alphas")]
    pub alphas: Vec<f64>,
    pub methods: Vec<Method>,
    pub trials: usize,
    pub seed: u64,
    /// Overrides the planner's prime for every method when set.
    #[serde(default)]
    pub q: Option<u64>,
    /// Where the results CSV should go (used by the CLI).
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default = "default_value_range")]
    pub value_range: (f64, f64),
}

/// One decode outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub trial: usize,
    pub alpha: f64,
    pub method: Method,
    pub exact: bool,
    pub l2_err: f64,
    pub linf_err: f64,
    pub support_match: bool,
    pub time_ms: f64,
    pub iters: usize,
}

/// Mean metrics for one (method, alpha) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub method: Method,
    pub alpha: f64,
    pub trials: usize,
    pub exact_count: usize,
    pub mean_l2_err: f64,
    pub mean_linf_err: f64,
    pub mean_time_ms: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutput {
    pub plans: Vec<Plan>,
    pub records: Vec<TrialRecord>,
    pub summaries: Vec<Summary>,
}

impl ExperimentSpec {
    fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidParameter("trials must be >= 1".into()));
        }
        if self.n == 0 || self.k == 0 || self.k > self.n {
            return Err(Error::InvalidParameter(format!(
                "need 1 <= k <= n, got k = {}, n = {}",
                self.k, self.n
            )));
        }
        if self.methods.is_empty() {
            return Err(Error::InvalidParameter("no methods requested".into()));
        }
        if self.alphas.is_empty() {
            return Err(Error::InvalidParameter("alpha list is empty".into()));
        }
        Ok(())
    }

    /// The plan each method runs under (planner output or the q override).
    pub fn resolve_plans(&self) -> Result<Vec<Plan>> {
        self.methods
            .iter()
            .map(|&method| {
                let mut plan = match method {
                    Method::New => plan_new(self.n, self.k, self.corrupted)?,
                    Method::Bp => plan_l1(self.n, self.k)?,
                    Method::Expander => plan_expander(self.n, self.k)?,
                };
                if let Some(q) = self.q {
                    plan = plan.with_q(q);
                }
                Ok(plan)
            })
            .collect()
    }
}

/// Runs the experiment. Refuses to start when any method's plan has
/// m >= n; matrix construction and solver factorization are excluded
/// from the per-trial decode timings.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentOutput> {
    spec.validate()?;
    let plans = spec.resolve_plans()?;
    for plan in &plans {
        if plan.feasibility == Feasibility::Infeasible {
            return Err(Error::InfeasiblePlan(format!(
                "{}: q = {} gives m = {} >= n = {}",
                plan.method, plan.q, plan.m, plan.n
            )));
        }
    }

    // one matrix per method, built up front
    let matrices: Vec<DeVoreMatrix> = plans
        .iter()
        .map(|p| DeVoreMatrix::new(p.q, p.r, spec.n))
        .collect::<Result<_>>()?;
    let solvers: Vec<Option<BpSolver>> = matrices
        .iter()
        .zip(spec.methods.iter())
        .map(|(mat, &method)| (method == Method::Bp).then(|| BpSolver::new(mat)))
        .collect();

    let mut records = Vec::with_capacity(spec.alphas.len() * spec.trials * spec.methods.len());
    for (alpha_idx, &alpha) in spec.alphas.iter().enumerate() {
        for trial in 0..spec.trials {
            let global = (alpha_idx * spec.trials + trial) as u64;
            let x_seed = subseed(spec.seed, 2 * global);
            let noise_seed = subseed(spec.seed, 2 * global + 1);
            let x = gen_sparse(spec.n, spec.k, x_seed, spec.value_range)?;

            for (mi, &method) in spec.methods.iter().enumerate() {
                let mat = &matrices[mi];
                let mut y = mat.encode(&x)?;
                let mut noise_l2 = 0.0;
                if spec.corrupted > 0 && alpha != 0.0 {
                    let eta = gen_shot_noise(mat.rows(), spec.corrupted, alpha, noise_seed)?;
                    noise_l2 = eta.iter().map(|v| v * v).sum::<f64>().sqrt();
                    for (yi, e) in y.iter_mut().zip(eta.iter()) {
                        *yi += e;
                    }
                }

                let started = Instant::now();
                let (metrics, iters) = decode_once(method, mat, &solvers[mi], &y, &x, noise_l2, spec)?;
                let time_ms = started.elapsed().as_secs_f64() * 1e3;

                records.push(TrialRecord {
                    trial,
                    alpha,
                    method,
                    exact: metrics.exact,
                    l2_err: metrics.l2,
                    linf_err: metrics.linf,
                    support_match: metrics.support_match,
                    time_ms,
                    iters,
                });
            }
        }
    }

    let summaries = summarize(&records);
    Ok(ExperimentOutput {
        plans,
        records,
        summaries,
    })
}

fn decode_once(
    method: Method,
    mat: &DeVoreMatrix,
    solver: &Option<BpSolver>,
    y: &[f64],
    x: &crate::vector::SparseVector,
    noise_l2: f64,
    spec: &ExperimentSpec,
) -> Result<(ErrorMetrics, usize)> {
    match method {
        Method::New => {
            let report = decode_exact(mat, y, &RecoveryConfig::exact())?;
            Ok((sparse_metrics(&report.estimate, x), 0))
        }
        Method::Expander => {
            let cfg = ExpanderConfig::for_instance(spec.k, spec.n);
            let report = expander_decode(mat, y, &cfg)?;
            Ok((sparse_metrics(&report.estimate, x), report.iterations))
        }
        Method::Bp => {
            let cfg = BasisPursuitConfig::with_noise_radius(noise_l2);
            let report = solver
                .as_ref()
                .expect("bp solver prepared for bp method")
                .solve(y, &cfg)?;
            Ok((
                dense_metrics(&report.estimate, x, DENSE_SUPPORT_TOL),
                report.iterations,
            ))
        }
    }
}

/// Means per (method, alpha), in first-appearance order.
pub fn summarize(records: &[TrialRecord]) -> Vec<Summary> {
    let mut order: Vec<(Method, f64)> = Vec::new();
    for r in records {
        if !order
            .iter()
            .any(|&(m, a)| m == r.method && a.to_bits() == r.alpha.to_bits())
        {
            order.push((r.method, r.alpha));
        }
    }
    order
        .into_iter()
        .map(|(method, alpha)| {
            let cell: Vec<&TrialRecord> = records
                .iter()
                .filter(|r| r.method == method && r.alpha.to_bits() == alpha.to_bits())
                .collect();
            let count = cell.len() as f64;
            Summary {
                method,
                alpha,
                trials: cell.len(),
                exact_count: cell.iter().filter(|r| r.exact).count(),
                mean_l2_err: cell.iter().map(|r| r.l2_err).sum::<f64>() / count,
                mean_linf_err: cell.iter().map(|r| r.linf_err).sum::<f64>() / count,
                mean_time_ms: cell.iter().map(|r| r.time_ms).sum::<f64>() / count,
            }
        })
        .collect()
}

/// Results CSV with header
/// `trial,method,exact,l2_err,linf_err,support_match,time_ms,iters`.
/// Rows appear in alpha-sweep order; the trial column restarts per alpha.
pub fn write_results_csv<W: std::io::Write>(records: &[TrialRecord], mut w: W) -> std::io::Result<()> {
    writeln!(w, "trial,method,exact,l2_err,linf_err,support_match,time_ms,iters")?;
    for r in records {
        writeln!(
            w,
            "{},{},{},{},{},{},{:.3},{}",
            r.trial, r.method, r.exact, r.l2_err, r.linf_err, r.support_match, r.time_ms, r.iters
        )?;
    }
    Ok(())
}
