//! Command-line driver: plan measurements, export matrices, encode, decode,
//! verify, and run seeded benchmark sweeps.
//!
//! Exit codes: 0 success, 1 usage or verification failure, 2 infeasible
//! plan, 3 decode failure.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use polycs::basis_pursuit::{basis_pursuit_decode, BasisPursuitConfig};
use polycs::expander::{expander_decode, ExpanderConfig};
use polycs::experiment::DENSE_SUPPORT_TOL;
use polycs::planner::{plan_table, Feasibility, Method};
use polycs::recovery::{decode_exact, decode_robust, RecoveryConfig};
use polycs::{
    run_experiment, write_plan_csv, write_results_csv, DeVoreMatrix, Error, ExperimentSpec,
    SparseVector, VerifyMode,
};

const EXIT_INFEASIBLE: u8 = 2;
const EXIT_DECODE_FAILURE: u8 = 3;

#[derive(Parser)]
#[command(name = "polycs", version, about = "Binary measurement matrices and sparse recovery")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Measurement requirements per method for a given dimension and sparsity.
    Plan {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        /// Shot-noise budget (corrupted measurement count).
        #[arg(long = "M", default_value_t = 0)]
        corrupted: usize,
        /// Also write the CSV here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Export a matrix as CSV column supports.
    BuildMatrix {
        #[arg(long)]
        q: u64,
        #[arg(long, default_value_t = 3)]
        r: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Encode a sparse vector (JSON) into a measurement CSV.
    Encode {
        /// Inline spec `q=29,r=3,n=20000` or path to a build-matrix CSV.
        #[arg(long)]
        matrix: String,
        /// Sparse vector JSON: {"n": ..., "entries": [[index, value], ...]}.
        #[arg(long)]
        x: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Recover a sparse vector from a measurement CSV.
    Decode {
        /// new | expander | bp
        #[arg(long)]
        method: String,
        #[arg(long)]
        matrix: String,
        /// Measurement CSV, one value per line.
        #[arg(long)]
        y: PathBuf,
        /// new: zero/group tolerance; expander: gap tolerance;
        /// bp: residual radius for noisy measurements.
        #[arg(long)]
        tol: Option<f64>,
        /// Write the recovered sparse JSON here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a seeded experiment described by a JSON spec file.
    Bench {
        #[arg(long)]
        spec: PathBuf,
    },
    /// Check column overlaps against the design bound.
    Verify {
        #[arg(long)]
        matrix: String,
        /// Check every column pair (small matrices only).
        #[arg(long)]
        exhaustive: bool,
        /// Sampled mode: number of random pairs.
        #[arg(long, default_value_t = 100_000)]
        pairs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            let exit = err
                .downcast_ref::<Error>()
                .map(|e| match e {
                    Error::InfeasiblePlan(_) => EXIT_INFEASIBLE,
                    _ => 1,
                })
                .unwrap_or(1);
            ExitCode::from(exit)
        }
    }
}

fn run(command: Command) -> Result<u8> {
    match command {
        Command::Plan {
            n,
            k,
            corrupted,
            out,
        } => cmd_plan(n, k, corrupted, out),
        Command::BuildMatrix { q, r, n, out } => {
            let mat = DeVoreMatrix::new(q, r, n)?;
            let file = fs::File::create(&out)
                .with_context(|| format!("creating {}", out.display()))?;
            mat.write_support_csv(std::io::BufWriter::new(file))?;
            eprintln!("wrote {} columns ({} rows) to {}", n, mat.rows(), out.display());
            Ok(0)
        }
        Command::Encode { matrix, x, out } => cmd_encode(&matrix, &x, &out),
        Command::Decode {
            method,
            matrix,
            y,
            tol,
            out,
        } => cmd_decode(&method, &matrix, &y, tol, out.as_deref()),
        Command::Bench { spec } => cmd_bench(&spec),
        Command::Verify {
            matrix,
            exhaustive,
            pairs,
            seed,
        } => cmd_verify(&matrix, exhaustive, pairs, seed),
    }
}

fn cmd_plan(n: usize, k: usize, corrupted: usize, out: Option<PathBuf>) -> Result<u8> {
    let plans = plan_table(n, &[k], corrupted)?;
    let mut buf = Vec::new();
    write_plan_csv(&plans, &mut buf)?;
    print!("{}", String::from_utf8(buf.clone())?);
    if let Some(path) = out {
        fs::write(&path, &buf).with_context(|| format!("writing {}", path.display()))?;
    }
    for p in &plans {
        if p.feasibility != Feasibility::Feasible {
            eprintln!(
                "plan {}: q = {} gives m = {} against n = {} ({})",
                p.method, p.q, p.m, p.n, p.feasibility
            );
        }
    }
    if plans.iter().all(|p| p.feasibility == Feasibility::Feasible) {
        Ok(0)
    } else {
        Ok(EXIT_INFEASIBLE)
    }
}

fn cmd_encode(matrix: &str, x_path: &Path, out: &Path) -> Result<u8> {
    let mat = parse_matrix_spec(matrix)?;
    let text = fs::read_to_string(x_path)
        .with_context(|| format!("reading {}", x_path.display()))?;
    let x: SparseVector = serde_json::from_str(&text).context("parsing sparse vector JSON")?;
    let x = SparseVector::new(x.n, x.entries)?; // revalidate invariants
    let y = mat.encode(&x)?;
    let mut w = std::io::BufWriter::new(
        fs::File::create(out).with_context(|| format!("creating {}", out.display()))?,
    );
    for v in &y {
        writeln!(w, "{v}")?;
    }
    eprintln!("encoded {} entries into {} measurements", x.sparsity(), y.len());
    Ok(0)
}

fn cmd_decode(
    method: &str,
    matrix: &str,
    y_path: &Path,
    tol: Option<f64>,
    out: Option<&Path>,
) -> Result<u8> {
    let method: Method = method.parse()?;
    let mat = parse_matrix_spec(matrix)?;
    let y = read_measurements(y_path)?;
    if y.len() != mat.rows() {
        bail!(
            "measurement vector has {} entries, matrix has {} rows",
            y.len(),
            mat.rows()
        );
    }

    let (estimate, failed, detail) = match method {
        Method::New => {
            let tol = tol.unwrap_or(0.0);
            let cfg = RecoveryConfig::with_tol(tol)?;
            let report = if tol > 0.0 {
                decode_robust(&mat, &y, &cfg)?
            } else {
                decode_exact(&mat, &y, &cfg)?
            };
            let failed = !report.failures.is_empty();
            let detail = format!(
                "single pass over {} columns, {} undecodable",
                report.columns_scanned,
                report.failures.len()
            );
            (report.estimate, failed, detail)
        }
        Method::Expander => {
            let cfg = ExpanderConfig {
                gap_tol: tol,
                ..ExpanderConfig::default()
            };
            let report = expander_decode(&mat, &y, &cfg)?;
            let detail = format!(
                "{} iterations, residual {:.3e}",
                report.iterations, report.residual_linf
            );
            (report.estimate, !report.converged, detail)
        }
        Method::Bp => {
            let cfg = BasisPursuitConfig::with_noise_radius(tol.unwrap_or(0.0));
            let report = basis_pursuit_decode(&mat, &y, &cfg)?;
            let estimate = SparseVector::from_dense(&report.estimate, DENSE_SUPPORT_TOL);
            let detail = format!(
                "{} iterations, primal {:.3e}, dual {:.3e}",
                report.iterations, report.primal_residual, report.dual_residual
            );
            (estimate, !report.converged, detail)
        }
    };

    let json = serde_json::to_string(&estimate)?;
    match out {
        Some(path) => fs::write(path, json + "\n")
            .with_context(|| format!("writing {}", path.display()))?,
        None => println!("{json}"),
    }
    eprintln!(
        "{method}: {} nonzero entries recovered ({detail})",
        estimate.sparsity()
    );
    if failed {
        eprintln!("{method}: decode failure");
        Ok(EXIT_DECODE_FAILURE)
    } else {
        Ok(0)
    }
}

fn cmd_bench(spec_path: &Path) -> Result<u8> {
    let text = fs::read_to_string(spec_path)
        .with_context(|| format!("reading {}", spec_path.display()))?;
    let spec: ExperimentSpec = serde_json::from_str(&text).context("parsing experiment spec")?;
    let output = run_experiment(&spec)?;
    for p in &output.plans {
        eprintln!("plan {}: q = {}, m = {} ({})", p.method, p.q, p.m, p.feasibility);
    }
    let mut buf = Vec::new();
    write_results_csv(&output.records, &mut buf)?;
    match &spec.out {
        Some(path) => {
            fs::write(path, &buf).with_context(|| format!("writing {}", path.display()))?;
            eprintln!("wrote {} rows to {}", output.records.len(), path.display());
        }
        None => print!("{}", String::from_utf8(buf)?),
    }
    for s in &output.summaries {
        eprintln!(
            "summary {} alpha={}: exact {}/{}, mean l2 err {:.3e}, mean time {:.3} ms",
            s.method, s.alpha, s.exact_count, s.trials, s.mean_l2_err, s.mean_time_ms
        );
    }
    Ok(0)
}

fn cmd_verify(matrix: &str, exhaustive: bool, pairs: usize, seed: u64) -> Result<u8> {
    let mat = parse_matrix_spec(matrix)?;
    let mode = if exhaustive {
        VerifyMode::Exhaustive
    } else {
        VerifyMode::Sampled { pairs, seed }
    };
    let report = mat.verify_main_assumption(mode)?;
    println!(
        "checked {} pairs: max inner product {} (bound {}), {} violations",
        report.pairs_checked,
        report.max_inner_product,
        mat.r() - 1,
        report.violations.len()
    );
    for &(j, t, ip) in report.violations.iter().take(10) {
        println!("violation: columns {j} and {t} share {ip} rows");
    }
    Ok(if report.violations.is_empty() { 0 } else { 1 })
}

/// Accepts `q=29,r=3,n=20000` or a path to a build-matrix CSV export.
fn parse_matrix_spec(spec: &str) -> Result<DeVoreMatrix> {
    let line = if Path::new(spec).exists() {
        let text = fs::read_to_string(spec)
            .with_context(|| format!("reading matrix file {spec}"))?;
        let header = text.lines().next().unwrap_or_default().to_string();
        let Some(rest) = header.strip_prefix("# devore ") else {
            bail!("{spec}: missing '# devore q=.. r=.. n=..' header");
        };
        rest.split_whitespace().collect::<Vec<_>>().join(",")
    } else {
        spec.to_string()
    };

    let (mut q, mut r, mut n) = (None, None, None);
    for part in line.split(',') {
        let Some((key, value)) = part.split_once('=') else {
            bail!("bad matrix spec component '{part}' (expected key=value)");
        };
        match key.trim() {
            "q" => q = Some(value.trim().parse::<u64>()?),
            "r" => r = Some(value.trim().parse::<usize>()?),
            "n" => n = Some(value.trim().parse::<usize>()?),
            other => bail!("unknown matrix spec key '{other}'"),
        }
    }
    let (Some(q), Some(r), Some(n)) = (q, r, n) else {
        bail!("matrix spec must provide q, r and n");
    };
    Ok(DeVoreMatrix::new(q, r, n)?)
}

fn read_measurements(path: &Path) -> Result<Vec<f64>> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut y = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let v: f64 = line
            .parse()
            .with_context(|| format!("{}:{}: bad value '{line}'", path.display(), lineno + 1))?;
        y.push(v);
    }
    Ok(y)
}
