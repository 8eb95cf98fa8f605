//! Measurement planning: the prime q (hence m = q^2 rows) each recovery
//! method needs for a given dimension n, sparsity k, and noise budget M.
//!
//! All three planners also enforce q^3 >= n so the matrix has enough
//! columns at degree bound r = 3.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::is_prime;

/// Recovery method tags, shared by the planner and the harness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// One-pass decoder.
    New,
    /// Iterative expander-graph recovery.
    Expander,
    /// l1-norm minimization (basis pursuit).
    Bp,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::New => "new",
            Method::Expander => "expander",
            Method::Bp => "bp",
        })
    }
}

impl std::str::FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "new" => Ok(Method::New),
            "expander" => Ok(Method::Expander),
            "bp" => Ok(Method::Bp),
            other => Err(Error::InvalidParameter(format!(
                "unknown method '{other}' (expected new|expander|bp)"
            ))),
        }
    }
}

/// Whether a plan leaves room for compression.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Feasibility {
    Feasible,
    /// m < n but within 10% of it: measurements nearly match the dimension.
    NearDegenerate,
    /// m >= n: the measurement count reaches the ambient dimension.
    Infeasible,
}

impl fmt::Display for Feasibility {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Feasibility::Feasible => "yes",
            Feasibility::NearDegenerate => "near-degenerate",
            Feasibility::Infeasible => "no",
        })
    }
}

/// Measurement requirements for one method at one (n, k, M).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Plan {
    pub method: Method,
    pub q: u64,
    pub m: u64,
    pub feasibility: Feasibility,
    pub n: usize,
    pub k: usize,
    pub corrupted: usize,
    pub r: usize,
}

impl Plan {
    /// The same plan under a caller-chosen prime; feasibility is
    /// reclassified for the new measurement count.
    pub fn with_q(self, q: u64) -> Plan {
        make_plan(self.method, q, self.n, self.k, self.corrupted, self.r)
    }
}

/// Least prime >= ceil(x).
pub fn smallest_prime_geq(x: f64) -> u64 {
    next_prime_at_least(x.ceil().max(2.0) as u64)
}

fn next_prime_at_least(v: u64) -> u64 {
    let mut c = v.max(2);
    while !is_prime(c) {
        c += 1;
    }
    c
}

/// Smallest q with q^3 >= n.
fn cube_root_ceil(n: usize) -> u64 {
    if n <= 1 {
        return 1;
    }
    let mut g = (n as f64).cbrt().round() as u64 + 1;
    while g > 1 && (g - 1).pow(3) >= n as u64 {
        g -= 1;
    }
    g
}

fn classify(q: u64, n: usize) -> Feasibility {
    let m = q * q;
    if m >= n as u64 {
        Feasibility::Infeasible
    } else if 10 * m > 9 * n as u64 {
        Feasibility::NearDegenerate
    } else {
        Feasibility::Feasible
    }
}

fn make_plan(method: Method, q: u64, n: usize, k: usize, corrupted: usize, r: usize) -> Plan {
    Plan {
        method,
        q,
        m: q * q,
        feasibility: classify(q, n),
        n,
        k,
        corrupted,
        r,
    }
}

/// Plan for the one-pass decoder: smallest prime q > 2(k(r-1) + M) that also
/// satisfies q^3 >= n.
pub fn plan_new(n: usize, k: usize, corrupted: usize) -> Result<Plan> {
    plan_new_with(n, k, corrupted, 3)
}

pub fn plan_new_with(n: usize, k: usize, corrupted: usize, r: usize) -> Result<Plan> {
    validate_nk(n, k, r)?;
    let strict = 2 * (k as u64 * (r as u64 - 1) + corrupted as u64) + 1;
    let q = next_prime_at_least(strict.max(cube_root_ceil(n)).max(2));
    Ok(make_plan(Method::New, q, n, k, corrupted, r))
}

/// Plan for l1 minimization: smallest prime q with
/// (ceil(t k) - 1)(r - 1) / q < delta_target and q^3 >= n.
/// Defaults t = 1.5, delta_target = 0.5 give q > 4(ceil(1.5 k) - 1).
pub fn plan_l1(n: usize, k: usize) -> Result<Plan> {
    plan_l1_with(n, k, 3, 1.5, 0.5)
}

pub fn plan_l1_with(n: usize, k: usize, r: usize, t: f64, delta_target: f64) -> Result<Plan> {
    validate_nk(n, k, r)?;
    let t_ok = t.is_finite() && t > 1.0;
    if !t_ok {
        return Err(Error::InvalidParameter(format!("t must exceed 1, got {t}")));
    }
    let target_ok = delta_target.is_finite() && delta_target > 0.0;
    if !target_ok {
        return Err(Error::InvalidParameter(
            "delta_target must be positive".into(),
        ));
    }
    let numer = ((t * k as f64).ceil() - 1.0) * (r as f64 - 1.0);
    let mut q = next_prime_at_least(cube_root_ceil(n).max(2));
    while numer / q as f64 >= delta_target {
        q = next_prime_at_least(q + 1);
    }
    Ok(make_plan(Method::Bp, q, n, k, 0, r))
}

/// Plan for expander recovery: smallest prime q >= 4(r-1)(2k - 1) (so the
/// column graph is a (2k, 3/4)-expander) with q^3 >= n. At r = 3 this is
/// the familiar q >= 8(2k - 1).
pub fn plan_expander(n: usize, k: usize) -> Result<Plan> {
    plan_expander_with(n, k, 3)
}

pub fn plan_expander_with(n: usize, k: usize, r: usize) -> Result<Plan> {
    validate_nk(n, k, r)?;
    let bound = 4 * (r as u64 - 1) * (2 * k as u64 - 1);
    let q = next_prime_at_least(bound.max(cube_root_ceil(n)).max(2));
    Ok(make_plan(Method::Expander, q, n, k, 0, r))
}

fn validate_nk(n: usize, k: usize, r: usize) -> Result<()> {
    if n == 0 || k == 0 {
        return Err(Error::InvalidParameter(format!(
            "n and k must be positive (n = {n}, k = {k})"
        )));
    }
    if r < 2 {
        return Err(Error::InvalidParameter(format!(
            "degree bound r must be >= 2, got {r}"
        )));
    }
    Ok(())
}

/// Plans for all three methods at each sparsity in `k_list`
/// (row order per k: bp, expander, new).
pub fn plan_table(n: usize, k_list: &[usize], corrupted: usize) -> Result<Vec<Plan>> {
    let mut rows = Vec::with_capacity(3 * k_list.len());
    for &k in k_list {
        rows.push(plan_l1(n, k)?);
        rows.push(plan_expander(n, k)?);
        rows.push(plan_new(n, k, corrupted)?);
    }
    Ok(rows)
}

/// CSV serialization: `method,q,m,feasible`.
pub fn write_plan_csv<W: std::io::Write>(plans: &[Plan], mut w: W) -> std::io::Result<()> {
    writeln!(w, "method,q,m,feasible")?;
    for p in plans {
        writeln!(w, "{},{},{},{}", p.method, p.q, p.m, p.feasibility)?;
    }
    Ok(())
}

/// Inputs of the sub-Gaussian measurement bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubGaussianParams {
    /// Moment constant: E[exp(theta X)] <= exp(c theta^2). Normal X: c = 1/2.
    pub c: f64,
    /// Target RIP constant, in (0, 1).
    pub delta: f64,
    /// Failure probability, in (0, 1).
    pub xi: f64,
    /// RIP order to certify.
    pub k: usize,
    pub n: usize,
}

/// Constants derived from the moment constant c.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubGaussianConstants {
    pub gamma: f64,
    pub zeta: f64,
    pub alpha: f64,
    pub beta: f64,
    pub c_tilde: f64,
}

pub fn subgaussian_constants(c: f64) -> Result<SubGaussianConstants> {
    let c_ok = c.is_finite() && c > 0.0;
    if !c_ok {
        return Err(Error::InvalidParameter(format!(
            "moment constant must be positive, got {c}"
        )));
    }
    let gamma = 2.0;
    let zeta = 1.0 / (4.0 * c);
    let alpha = gamma * (-zeta).exp() + zeta.exp();
    let beta = zeta;
    let c_tilde = beta * beta / (2.0 * (2.0 * alpha + beta));
    Ok(SubGaussianConstants {
        gamma,
        zeta,
        alpha,
        beta,
        c_tilde,
    })
}

/// Rows needed for a random sub-Gaussian matrix to satisfy the RIP of order
/// k with constant delta, with probability at least 1 - xi:
/// ceil( (4/3 k ln(en/k) + 14k/3 + 4/3 ln(2/xi)) / (c_tilde delta^2) ).
pub fn subgaussian_m(params: &SubGaussianParams) -> Result<u64> {
    let unit_interval = |v: f64| v.is_finite() && v > 0.0 && v < 1.0;
    if !unit_interval(params.delta) {
        return Err(Error::InvalidParameter("delta must lie in (0, 1)".into()));
    }
    if !unit_interval(params.xi) {
        return Err(Error::InvalidParameter("xi must lie in (0, 1)".into()));
    }
    if params.k == 0 || params.n == 0 {
        return Err(Error::InvalidParameter("k and n must be positive".into()));
    }
    let consts = subgaussian_constants(params.c)?;
    let k = params.k as f64;
    let n = params.n as f64;
    let sum = (4.0 / 3.0) * k * (std::f64::consts::E * n / k).ln()
        + 14.0 * k / 3.0
        + (4.0 / 3.0) * (2.0 / params.xi).ln();
    let m = sum / (consts.c_tilde * params.delta * params.delta);
    Ok(m.ceil() as u64)
}

/// Degree and output count under which at least a 1 - epsilon fraction of
/// d-left-regular bipartite graphs are (k_sets, 1 - beta)-expanders:
/// d = ceil(ln(en / (2 epsilon)) / beta), m = ceil(exp(2/beta) d K).
pub fn random_expander_params(beta: f64, epsilon: f64, k_sets: usize, n: usize) -> Result<(u64, u64)> {
    let in_open = |v: f64, hi: f64| v.is_finite() && v > 0.0 && v < hi;
    if !in_open(beta, 1.0) {
        return Err(Error::InvalidParameter("beta must lie in (0, 1)".into()));
    }
    if !in_open(epsilon, 0.5) {
        return Err(Error::InvalidParameter("epsilon must lie in (0, 0.5)".into()));
    }
    if k_sets == 0 || n == 0 {
        return Err(Error::InvalidParameter("K and n must be positive".into()));
    }
    let d = ((std::f64::consts::E * n as f64 / (2.0 * epsilon)).ln() / beta).ceil();
    let m = ((2.0 / beta).exp() * d * k_sets as f64).ceil();
    if !(d.is_finite() && m.is_finite() && m < u64::MAX as f64) {
        return Err(Error::InvalidParameter(
            "random expander parameters overflow".into(),
        ));
    }
    Ok((d as u64, m as u64))
}
