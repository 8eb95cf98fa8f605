//! Compressive sensing with deterministic binary measurement matrices.
//!
//! The measurement matrix has q^2 rows and its columns are indicators of
//! polynomial graphs over the prime field F_q, so every column holds exactly
//! q ones and two distinct columns overlap in fewer than r places. That
//! overlap bound powers three decoders:
//!
//! - [`recovery`]: a noniterative decoder that recovers ultra-sparse vectors
//!   in one pass over the columns, tolerating burst-corrupted measurements
//!   and nearly sparse signals;
//! - [`expander`]: the classic iterative gap-absorption decoder, since the
//!   same matrix is the bi-adjacency of an expander graph;
//! - [`basis_pursuit`]: l1 minimization via operator splitting.
//!
//! [`planner`] computes the prime q each method needs for a given (n, k),
//! and [`experiment`] drives seeded, reproducible comparisons. Column-wise
//! work parallelizes through rayon when the default `parallel` feature is
//! on; disabling it leaves the same code running sequentially.

pub mod basis_pursuit;
pub mod error;
pub mod exec;
pub mod experiment;
pub mod expander;
pub mod field;
pub mod matrix;
pub mod planner;
pub mod recovery;
pub mod signal;
pub mod vector;

pub use basis_pursuit::{basis_pursuit_decode, BasisPursuitConfig, BpReport, BpSolver};
pub use error::{Error, Result};
pub use exec::Exec;
pub use experiment::{run_experiment, write_results_csv, ExperimentOutput, ExperimentSpec, TrialRecord};
pub use expander::{expander_decode, ExpanderConfig, ExpanderReport};
pub use field::{index_to_poly, is_prime, poly_to_index, Poly, PrimeField};
pub use matrix::{ColumnSupport, DeVoreMatrix, VerifyMode, VerifyReport};
pub use planner::{
    plan_expander, plan_l1, plan_new, plan_table, random_expander_params, smallest_prime_geq,
    subgaussian_m, write_plan_csv, Feasibility, Method, Plan, SubGaussianParams,
};
pub use recovery::{
    decode_exact, decode_robust, reduced_vector, support_test, DecodeReport, RecoveryConfig,
    ReducedVector, SupportDecision,
};
pub use signal::{gen_shot_noise, gen_sparse, subseed};
pub use vector::SparseVector;
