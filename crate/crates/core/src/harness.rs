//! Monte Carlo experiment driver: replicated detection runs over grids of
//! sample count and noise level.
//!
//! Reproducibility contract: every replication draws from its own stream,
//! keyed by the cell's content `(n, tau)` and the replication index rather
//! than by loop position or thread. Identical configs therefore produce
//! identical results at any parallelism, and removing a cell from a grid
//! leaves every other cell's numbers untouched.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use thiserror::Error;

use crate::detect::{self, DetectError, DetectionConfig, TestReport};
use crate::dimensions::{pinned_complement, rank, DimError};
use crate::models::{evaluate, ExperimentSetup, ModelError, ModelSpec};
use crate::statkit::{sample_design, wilson_interval, RngStream, StatError};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid sweep config: {0}")]
    Config(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Detect(#[from] DetectError),
    #[error(transparent)]
    Dim(#[from] DimError),
    #[error(transparent)]
    Stat(#[from] StatError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: cannot parse sweep CSV: {reason}")]
    Parse { path: String, reason: String },
}

/// Grid sweep description.
#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub model: String,
    pub setup: ExperimentSetup,
    pub n_grid: Vec<usize>,
    pub tau_grid: Vec<f64>,
    pub replications: usize,
    pub alpha: f64,
    pub seed: u64,
    /// Worker threads for replications; 0 picks the rayon default.
    pub parallelism: usize,
}

/// Aggregated outcome of one `(n, tau)` cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CellResult {
    pub n: usize,
    pub tau: f64,
    /// Replications attempted.
    pub replications: usize,
    /// Replications rejecting the null.
    pub rejections: u64,
    /// Replications failing to reject.
    pub failures: u64,
    /// Replications abandoned for a singular score covariance; excluded
    /// from the rate.
    pub degenerate: u64,
    pub rate: f64,
    pub wilson_lo: f64,
    pub wilson_hi: f64,
    pub pvalue_mean: f64,
    pub pvalue_var: f64,
    pub mean_nu_hat: Vec<f64>,
}

/// A full sweep: per-cell aggregates plus identification.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub model: String,
    pub case: String,
    pub cells: Vec<CellResult>,
}

/// Outcome of a single replication.
#[derive(Debug, Clone, PartialEq)]
pub struct Replication {
    pub p_value: f64,
    pub reject: bool,
    pub nu_hat: Vec<f64>,
}

/// Stream id for one replication, mixed from the cell content and the
/// replication index with the splitmix64 finalizer. Stable across grid
/// composition, scheduling, and thread count.
pub fn replication_stream_id(n: usize, tau: f64, replication: usize) -> u64 {
    let mut h: u64 = 0x9E37_79B9_7F4A_7C15;
    for v in [n as u64, tau.to_bits(), replication as u64] {
        h ^= v;
        h ^= h >> 30;
        h = h.wrapping_mul(0xBF58_476D_1CE4_E5B9);
        h ^= h >> 27;
        h = h.wrapping_mul(0x94D0_49BB_1331_11EB);
        h ^= h >> 31;
    }
    h
}

/// One virtual experiment end to end: draw the design, evaluate the model,
/// build scores, and run the (pinned-aware) test.
pub fn run_replication(
    model: &ModelSpec,
    setup: &ExperimentSetup,
    n: usize,
    alpha: f64,
    rng: &mut RngStream,
) -> Result<TestReport, HarnessError> {
    let design = setup.design_ex(model);
    let x = sample_design(&design, n, rng);
    let mut q_obs = Vec::with_capacity(n);
    for row in &x {
        q_obs.push(evaluate(model, setup, row, rng)?.q_obs);
    }
    let cfg = DetectionConfig::new(
        setup.d_ex(model),
        model.qoi_dims().clone(),
        design,
        model.log_base(),
        alpha,
    )?;
    let scores = detect::stein_scores(&x, &q_obs, &cfg)?;
    let report = if setup.pinned().is_empty() {
        detect::run_test(&scores, alpha)?
    } else {
        let w_pin = pinned_complement(&setup.d_pin(model))?;
        detect::run_pinned_test(&scores, &w_pin, alpha)?
    };
    Ok(report)
}

/// Runs all replications of one cell and aggregates; also returns the raw
/// p-values of the non-degenerate replications for diagnostics.
pub fn replicate_cell(
    model: &ModelSpec,
    setup: &ExperimentSetup,
    n: usize,
    replications: usize,
    alpha: f64,
    seed: u64,
) -> Result<(CellResult, Vec<f64>), HarnessError> {
    let tau = setup.tau();
    let outcomes: Vec<Result<Option<Replication>, HarnessError>> = (0..replications)
        .into_par_iter()
        .map(|rep| {
            let mut rng = RngStream::new(seed, replication_stream_id(n, tau, rep));
            match run_replication(model, setup, n, alpha, &mut rng) {
                Ok(report) => Ok(Some(Replication {
                    p_value: report.p_value,
                    reject: report.reject,
                    nu_hat: report.nu_hat,
                })),
                Err(HarnessError::Detect(DetectError::Stat(StatError::SingularCovariance))) => {
                    Ok(None)
                }
                Err(e) => Err(e),
            }
        })
        .collect();

    let d = model.qoi_dims().len();
    let mut rejections = 0u64;
    let mut degenerate = 0u64;
    let mut pvals = Vec::with_capacity(replications);
    let mut nu_sum = vec![0.0; d];
    for outcome in outcomes {
        match outcome? {
            Some(rep) => {
                if rep.reject {
                    rejections += 1;
                }
                pvals.push(rep.p_value);
                for (acc, v) in nu_sum.iter_mut().zip(&rep.nu_hat) {
                    *acc += v;
                }
            }
            None => degenerate += 1,
        }
    }
    let valid = pvals.len() as u64;
    let failures = valid - rejections;
    let rate = if valid > 0 {
        rejections as f64 / valid as f64
    } else {
        f64::NAN
    };
    let (wilson_lo, wilson_hi) = if valid > 0 {
        wilson_interval(rejections, valid, 0.95)?
    } else {
        (f64::NAN, f64::NAN)
    };
    let pvalue_mean = if valid > 0 {
        pvals.iter().sum::<f64>() / valid as f64
    } else {
        f64::NAN
    };
    let pvalue_var = if valid > 1 {
        pvals.iter().map(|p| (p - pvalue_mean).powi(2)).sum::<f64>() / (valid as f64 - 1.0)
    } else {
        f64::NAN
    };
    let mean_nu_hat = if valid > 0 {
        nu_sum.iter().map(|s| s / valid as f64).collect()
    } else {
        vec![f64::NAN; d]
    };
    Ok((
        CellResult {
            n,
            tau,
            replications,
            rejections,
            failures,
            degenerate,
            rate,
            wilson_lo,
            wilson_hi,
            pvalue_mean,
            pvalue_var,
            mean_nu_hat,
        },
        pvals,
    ))
}

/// Runs every `(n, tau)` cell of the grid.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepResult, HarnessError> {
    let model = ModelSpec::by_name(&cfg.model)?;
    validate_config(cfg, &model)?;
    let run = || -> Result<SweepResult, HarnessError> {
        let mut cells = Vec::with_capacity(cfg.n_grid.len() * cfg.tau_grid.len());
        for &n in &cfg.n_grid {
            for &tau in &cfg.tau_grid {
                let setup = cfg.setup.clone().with_tau(tau);
                let (cell, _) =
                    replicate_cell(&model, &setup, n, cfg.replications, cfg.alpha, cfg.seed)?;
                cells.push(cell);
            }
        }
        Ok(SweepResult {
            model: cfg.model.clone(),
            case: cfg.setup.case_label(&model),
            cells,
        })
    };
    if cfg.parallelism == 0 {
        run()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.parallelism)
            .build()
            .map_err(|e| HarnessError::Config(format!("thread pool: {e}")))?;
        pool.install(run)
    }
}

fn validate_config(cfg: &SweepConfig, model: &ModelSpec) -> Result<(), HarnessError> {
    if cfg.replications == 0 {
        return Err(HarnessError::Config("replications must be >= 1".into()));
    }
    if cfg.n_grid.is_empty() || cfg.tau_grid.is_empty() {
        return Err(HarnessError::Config("empty (n, tau) grid".into()));
    }
    if !(0.0 < cfg.alpha && cfg.alpha < 1.0) {
        return Err(HarnessError::Config(format!(
            "alpha must lie in (0, 1), got {}",
            cfg.alpha
        )));
    }
    if let Some(bad) = cfg.tau_grid.iter().find(|t| t.is_nan() || **t < 0.0) {
        return Err(HarnessError::Config(format!(
            "noise levels must be nonnegative, got {bad}"
        )));
    }
    let d = model.qoi_dims().len();
    let effective_d = d - rank(&cfg.setup.d_pin(model));
    for &n in &cfg.n_grid {
        if n <= effective_d {
            return Err(HarnessError::Config(format!(
                "n = {n} does not exceed the effective dimension {effective_d}"
            )));
        }
    }
    Ok(())
}

/// Sorted `(p, rank/N)` pairs for plotting against the unit diagonal.
pub fn pvalue_ecdf(pvals: &[f64]) -> Vec<(f64, f64)> {
    let mut sorted = pvals.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("p-values are ordered"));
    let n = sorted.len() as f64;
    sorted
        .into_iter()
        .enumerate()
        .map(|(i, p)| (p, (i + 1) as f64 / n))
        .collect()
}

/// Kolmogorov-Smirnov distance between the sample and the uniform law on
/// the unit interval.
pub fn ks_uniform_distance(pvals: &[f64]) -> f64 {
    let n = pvals.len() as f64;
    pvalue_ecdf(pvals)
        .iter()
        .enumerate()
        .map(|(i, (p, ecdf))| {
            let below = (p - i as f64 / n).abs();
            let above = (ecdf - p).abs();
            below.max(above)
        })
        .fold(0.0, f64::max)
}

const CSV_FIXED_COLUMNS: usize = 12;

fn csv_header(d: usize) -> String {
    let mut header = String::from(
        "model,case,n,tau,N,rejections,degenerate,rate,wilson_lo,wilson_hi,pvalue_mean,pvalue_var",
    );
    for i in 1..=d {
        let _ = write!(header, ",nu_hat_{i}");
    }
    header
}

/// Serializes a sweep to CSV. Floats print in Rust's shortest
/// round-trippable form, so write -> read -> write is byte-stable.
pub fn emit_csv(result: &SweepResult, path: &Path) -> Result<(), HarnessError> {
    let io_err = |source: std::io::Error| HarnessError::Io {
        path: path.display().to_string(),
        source,
    };
    let d = result.cells.first().map_or(0, |c| c.mean_nu_hat.len());
    let mut out = csv_header(d);
    out.push('\n');
    for cell in &result.cells {
        let _ = write!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            result.model,
            result.case,
            cell.n,
            cell.tau,
            cell.replications,
            cell.rejections,
            cell.degenerate,
            cell.rate,
            cell.wilson_lo,
            cell.wilson_hi,
            cell.pvalue_mean,
            cell.pvalue_var
        );
        for v in &cell.mean_nu_hat {
            let _ = write!(out, ",{v}");
        }
        out.push('\n');
    }
    fs::write(path, out).map_err(io_err)
}

/// Reads back a sweep CSV produced by [`emit_csv`].
pub fn read_csv(path: &Path) -> Result<SweepResult, HarnessError> {
    let io_err = |source: std::io::Error| HarnessError::Io {
        path: path.display().to_string(),
        source,
    };
    let parse_err = |reason: String| HarnessError::Parse {
        path: path.display().to_string(),
        reason,
    };
    let text = fs::read_to_string(path).map_err(io_err)?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| parse_err("missing header".into()))?;
    let d = header
        .split(',')
        .count()
        .checked_sub(CSV_FIXED_COLUMNS)
        .ok_or_else(|| parse_err("short header".into()))?;
    if header != csv_header(d) {
        return Err(parse_err("unexpected header".into()));
    }
    let mut model = String::new();
    let mut case = String::new();
    let mut cells = Vec::new();
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != CSV_FIXED_COLUMNS + d {
            return Err(parse_err(format!(
                "expected {} fields, got {}",
                CSV_FIXED_COLUMNS + d,
                fields.len()
            )));
        }
        model = fields[0].to_string();
        case = fields[1].to_string();
        let num = |s: &str| -> Result<f64, HarnessError> {
            s.parse::<f64>()
                .map_err(|e| parse_err(format!("bad float `{s}`: {e}")))
        };
        let int = |s: &str| -> Result<u64, HarnessError> {
            s.parse::<u64>()
                .map_err(|e| parse_err(format!("bad integer `{s}`: {e}")))
        };
        let replications = int(fields[4])? as usize;
        let rejections = int(fields[5])?;
        let degenerate = int(fields[6])?;
        cells.push(CellResult {
            n: int(fields[2])? as usize,
            tau: num(fields[3])?,
            replications,
            rejections,
            failures: replications as u64 - degenerate - rejections,
            degenerate,
            rate: num(fields[7])?,
            wilson_lo: num(fields[8])?,
            wilson_hi: num(fields[9])?,
            pvalue_mean: num(fields[10])?,
            pvalue_var: num(fields[11])?,
            mean_nu_hat: fields[CSV_FIXED_COLUMNS..]
                .iter()
                .map(|s| num(s))
                .collect::<Result<Vec<_>, _>>()?,
        });
    }
    Ok(SweepResult { model, case, cells })
}

/// Writes sorted `(p_value, ecdf)` pairs as a two-column CSV.
pub fn emit_ecdf_csv(pairs: &[(f64, f64)], path: &Path) -> Result<(), HarnessError> {
    let mut out = String::from("p_value,ecdf\n");
    for (p, e) in pairs {
        let _ = writeln!(out, "{p},{e}");
    }
    fs::write(path, out).map_err(|source| HarnessError::Io {
        path: path.display().to_string(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_null_config() -> SweepConfig {
        let model = ModelSpec::pipe();
        SweepConfig {
            model: "pipe".into(),
            setup: ExperimentSetup::with_held(&model, &[], &[], 0.0).unwrap(),
            n_grid: vec![20],
            tau_grid: vec![0.0],
            replications: 10,
            alpha: 0.05,
            seed: 7,
            parallelism: 0,
        }
    }

    #[test]
    fn replication_is_deterministic() {
        let model = ModelSpec::pipe();
        let setup = ExperimentSetup::with_held(&model, &["eps_P"], &[], 0.0).unwrap();
        let mut a_rng = RngStream::new(1, replication_stream_id(50, 0.0, 3));
        let a = run_replication(&model, &setup, 50, 0.05, &mut a_rng).unwrap();
        let mut b_rng = RngStream::new(1, replication_stream_id(50, 0.0, 3));
        let b = run_replication(&model, &setup, 50, 0.05, &mut b_rng).unwrap();
        assert_eq!(a, b);
        assert!(a.is_consistent());
    }

    #[test]
    fn sweep_is_deterministic_across_parallelism() {
        let mut cfg = tiny_null_config();
        let serial = run_sweep(&cfg).unwrap();
        cfg.parallelism = 2;
        let parallel = run_sweep(&cfg).unwrap();
        assert_eq!(serial, parallel);
    }

    #[test]
    fn removing_a_cell_leaves_others_unchanged() {
        let mut cfg = tiny_null_config();
        cfg.n_grid = vec![20, 30];
        let both = run_sweep(&cfg).unwrap();
        cfg.n_grid = vec![30];
        let only = run_sweep(&cfg).unwrap();
        assert_eq!(both.cells[1], only.cells[0]);
    }

    #[test]
    fn single_replication_cell_is_well_defined() {
        let mut cfg = tiny_null_config();
        cfg.replications = 1;
        let result = run_sweep(&cfg).unwrap();
        let cell = &result.cells[0];
        assert!(cell.rate == 0.0 || cell.rate == 1.0);
        assert!(cell.wilson_lo <= cell.rate && cell.rate <= cell.wilson_hi);
        assert_eq!(cell.rejections + cell.failures + cell.degenerate, 1);
    }

    #[test]
    fn config_validation_rejects_bad_grids() {
        let mut cfg = tiny_null_config();
        cfg.n_grid = vec![3]; // d = 3 needs n > 3
        assert!(matches!(run_sweep(&cfg), Err(HarnessError::Config(_))));
        let mut cfg = tiny_null_config();
        cfg.replications = 0;
        assert!(matches!(run_sweep(&cfg), Err(HarnessError::Config(_))));
        let mut cfg = tiny_null_config();
        cfg.tau_grid = vec![-0.5];
        assert!(matches!(run_sweep(&cfg), Err(HarnessError::Config(_))));
    }

    #[test]
    fn pinned_sweep_lowers_the_dimension_floor() {
        // Two-fluid with H pinned: effective d = 2, so n = 3 passes.
        let model = ModelSpec::two_fluid();
        let cfg = SweepConfig {
            model: "two_fluid".into(),
            setup: ExperimentSetup::with_held(&model, &["mu_o"], &["H"], 0.0).unwrap(),
            n_grid: vec![3],
            tau_grid: vec![0.0],
            replications: 2,
            alpha: 0.05,
            seed: 1,
            parallelism: 0,
        };
        assert!(run_sweep(&cfg).is_ok());
    }

    #[test]
    fn ecdf_basics() {
        assert_eq!(pvalue_ecdf(&[0.5]), vec![(0.5, 1.0)]);
        let grid: Vec<f64> = (1..=100).map(|i| i as f64 / 100.0).collect();
        for (p, e) in pvalue_ecdf(&grid) {
            assert!((p - e).abs() < 1e-12);
        }
        assert!(ks_uniform_distance(&grid) <= 0.01 + 1e-12);
    }

    #[test]
    fn ecdf_csv_schema() {
        let pairs = pvalue_ecdf(&[0.25, 0.75]);
        let path = std::env::temp_dir().join("lurkvar_ecdf_schema.csv");
        emit_ecdf_csv(&pairs, &path).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert_eq!(text, "p_value,ecdf\n0.25,0.5\n0.75,1\n");
        let _ = fs::remove_file(&path);
    }

    #[test]
    fn csv_round_trip_is_byte_identical() {
        let cfg = tiny_null_config();
        let result = run_sweep(&cfg).unwrap();
        let dir = std::env::temp_dir();
        let p1 = dir.join("lurkvar_sweep_rt1.csv");
        let p2 = dir.join("lurkvar_sweep_rt2.csv");
        emit_csv(&result, &p1).unwrap();
        let back = read_csv(&p1).unwrap();
        assert_eq!(result, back);
        emit_csv(&back, &p2).unwrap();
        assert_eq!(fs::read(&p1).unwrap(), fs::read(&p2).unwrap());
        let _ = fs::remove_file(&p1);
        let _ = fs::remove_file(&p2);
    }

    #[test]
    fn empty_results_emit_header_only() {
        let result = SweepResult {
            model: "pipe".into(),
            case: "null".into(),
            cells: vec![],
        };
        let path = std::env::temp_dir().join("lurkvar_sweep_empty.csv");
        emit_csv(&result, &path).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), 1);
        assert!(text.starts_with("model,case,n,tau,N,"));
        let _ = fs::remove_file(&path);
    }

    #[test]
    fn wilson_coverage_meta_test() {
        // Synthetic Bernoulli experiments with known rate; the 95% Wilson
        // interval must cover the truth at least 90% of the time.
        for &truth in &[0.05, 0.5, 0.9] {
            let mut covered = 0;
            let trials = 400;
            let n = 200u64;
            for t in 0..trials {
                let mut rng = RngStream::new(99, t);
                let hits = (0..n).filter(|_| rng.next_uniform() < truth).count() as u64;
                let (lo, hi) = wilson_interval(hits, n, 0.95).unwrap();
                if lo <= truth && truth <= hi {
                    covered += 1;
                }
            }
            let coverage = covered as f64 / trials as f64;
            assert!(coverage >= 0.9, "rate {truth}: coverage {coverage}");
        }
    }
}
