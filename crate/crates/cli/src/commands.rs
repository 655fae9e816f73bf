//! Subcommand implementations.
//!
//! Exit-code convention, usable in pipelines: 0 = no detection / success,
//! 2 = lurking variable detected (analytically or by test), 1 = error.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};

use lurkvar::detect::{self, DetectionConfig};
use lurkvar::dimensions::{
    check_homogeneity, nondim_vector, nullspace_basis, pinned_complement, rank, DimError,
};
use lurkvar::harness::{emit_csv, replication_stream_id, run_sweep, SweepConfig};
use lurkvar::models::{evaluate, ModelSpec};
use lurkvar::statkit::{sample_design, RngStream};

use crate::config::Resolved;

pub const EXIT_OK: u8 = 0;
pub const EXIT_ERROR: u8 = 1;
pub const EXIT_DETECTED: u8 = 2;

/// Analytic check: can the qoi be non-dimensionalized from the exposed
/// variables alone?
pub fn cmd_analyze(resolved: &Resolved) -> Result<u8> {
    let d_ex = resolved.d_ex();
    let verdict = check_homogeneity(&d_ex, &resolved.qoi_dims)?;
    if verdict.homogeneous {
        println!(
            "homogeneous: qoi dimensions are reachable from the exposed set {:?}",
            d_ex.variable_names()
        );
        Ok(EXIT_OK)
    } else {
        println!(
            "LURKING VARIABLE DETECTED (analytic): missing dimensions [{}]",
            verdict.missing_dimensions.join(", ")
        );
        println!(
            "the qoi dimensions cannot be formed from the exposed set {:?}",
            d_ex.variable_names()
        );
        Ok(EXIT_DETECTED)
    }
}

/// Prints the canonical non-dimensionalizing vector and a pi-group basis.
pub fn cmd_nondim(resolved: &Resolved) -> Result<u8> {
    let d_ex = resolved.d_ex();
    match nondim_vector(&d_ex, &resolved.qoi_dims) {
        Ok(w) => {
            println!("non-dimensionalizing vector (orthogonal to the pi subspace):");
            for (name, exp) in d_ex.variable_names().iter().zip(&w) {
                println!("  {name}^({exp})");
            }
            let basis = nullspace_basis(&d_ex);
            println!("pi-group basis ({} group(s)):", basis.len());
            for (i, v) in basis.iter().enumerate() {
                let product: Vec<String> = d_ex
                    .variable_names()
                    .iter()
                    .zip(v)
                    .filter(|(_, e)| !e.is_zero())
                    .map(|(name, e)| format!("{name}^({e})"))
                    .collect();
                println!("  pi_{}: {}", i + 1, product.join(" * "));
            }
            Ok(EXIT_OK)
        }
        Err(DimError::NotHomogeneous { missing }) => {
            println!(
                "LURKING VARIABLE DETECTED (analytic): missing dimensions [{}]",
                missing.join(", ")
            );
            Ok(EXIT_DETECTED)
        }
        Err(e) => Err(e.into()),
    }
}

/// Detection on a user-supplied data table.
pub fn cmd_detect(
    resolved: &Resolved,
    qoi_column: &str,
    data_path: &Path,
    out: Option<&PathBuf>,
    seed: u64,
) -> Result<u8> {
    let d_ex = resolved.d_ex();

    // Analytic gate first: without a non-dimensionalizing factor the
    // statistical test is meaningless and the verdict is already in.
    let verdict = check_homogeneity(&d_ex, &resolved.qoi_dims)?;
    if !verdict.homogeneous {
        println!(
            "LURKING VARIABLE DETECTED (analytic): missing dimensions [{}] - test skipped",
            verdict.missing_dimensions.join(", ")
        );
        return Ok(EXIT_DETECTED);
    }

    let design = resolved.design()?.clone();
    let exposed_names = resolved.exposed_names();
    let table = read_data_table(data_path, &exposed_names, qoi_column)?;
    let d_eff = d_ex.dims() - rank(&resolved.d_pin());
    if table.rows.len() <= d_eff {
        bail!(
            "need more samples than the effective dimension ({} rows, d = {d_eff})",
            table.rows.len()
        );
    }

    // Log-transform the physical columns with the configured base.
    for (line, row) in table.rows.iter().enumerate() {
        if let Some(slot) = row[..exposed_names.len()].iter().position(|z| *z <= 0.0) {
            bail!(
                "row {}: column {} must be positive to log-transform (got {})",
                line + 2,
                exposed_names[slot],
                row[slot]
            );
        }
    }
    let ln_base = resolved.log_base.ln();
    let x: Vec<Vec<f64>> = table
        .rows
        .iter()
        .map(|row| {
            row[..exposed_names.len()]
                .iter()
                .map(|z| z.ln() / ln_base)
                .collect()
        })
        .collect();
    let q_obs: Vec<f64> = table
        .rows
        .iter()
        .map(|row| row[exposed_names.len()])
        .collect();

    let cfg = match &resolved.w_ex {
        Some(w) => DetectionConfig::with_w_ex(
            d_ex,
            resolved.qoi_dims.clone(),
            w.clone(),
            design,
            resolved.log_base,
            resolved.alpha,
        )?,
        None => DetectionConfig::new(
            d_ex,
            resolved.qoi_dims.clone(),
            design,
            resolved.log_base,
            resolved.alpha,
        )?,
    };
    let scores = detect::stein_scores(&x, &q_obs, &cfg)?;
    let report = if resolved.pinned.is_empty() {
        detect::run_test(&scores, resolved.alpha)?
    } else {
        let w_pin = pinned_complement(&resolved.d_pin())?;
        detect::run_pinned_test(&scores, &w_pin, resolved.alpha)?
    };

    println!("{report}");
    println!("seed: {seed}");
    if let Some(path) = out {
        let mut text = report.to_key_value();
        let _ = writeln!(text, "seed={seed}");
        std::fs::write(path, text).with_context(|| format!("writing report {}", path.display()))?;
    }
    Ok(if report.reject {
        EXIT_DETECTED
    } else {
        EXIT_OK
    })
}

/// Virtual experiment: samples the design, evaluates the model, writes a
/// physical-units data table.
pub fn cmd_simulate(resolved: &Resolved, n: usize, tau: f64, seed: u64, out: &Path) -> Result<u8> {
    let model = resolved
        .model
        .as_ref()
        .ok_or_else(|| anyhow!("simulate needs a built-in model (`model` field)"))?;
    let setup = resolved.setup(tau)?;
    let design = setup.design_ex(model);
    // Stream choice matches the harness's first replication of the same
    // (n, tau) cell, so `simulate | detect` reproduces in-process results.
    let mut rng = RngStream::new(seed, replication_stream_id(n, tau, 0));
    let x = sample_design(&design, n, &mut rng);
    let base = model.log_base();

    let mut csv = resolved.exposed_names().join(",");
    csv.push(',');
    csv.push_str("qoi");
    csv.push('\n');
    for row in &x {
        let obs = evaluate(model, &setup, row, &mut rng)?;
        for v in row {
            let _ = write!(csv, "{},", base.powf(*v));
        }
        let _ = writeln!(csv, "{}", obs.q_obs);
    }
    std::fs::write(out, csv).with_context(|| format!("writing {}", out.display()))?;
    println!(
        "wrote {} rows for model `{}` to {} (seed: {seed})",
        n,
        model.name(),
        out.display()
    );
    Ok(EXIT_OK)
}

/// Monte Carlo sweep over the (n, tau) grid; writes the harness CSV schema.
pub fn cmd_sweep(
    resolved: &Resolved,
    n_grid: Vec<usize>,
    tau_grid: Vec<f64>,
    replications: usize,
    seed: u64,
    parallelism: usize,
    out: &Path,
) -> Result<u8> {
    let model = resolved
        .model
        .as_ref()
        .ok_or_else(|| anyhow!("sweep needs a built-in model (`model` field)"))?;
    let cfg = SweepConfig {
        model: model.name().to_string(),
        setup: resolved.setup(0.0)?,
        n_grid,
        tau_grid,
        replications,
        alpha: resolved.alpha,
        seed,
        parallelism,
    };
    let result = run_sweep(&cfg)?;
    emit_csv(&result, out)?;
    println!(
        "swept {} cell(s) x {} replication(s), case `{}` -> {} (seed: {seed})",
        result.cells.len(),
        replications,
        result.case,
        out.display()
    );
    Ok(EXIT_OK)
}

/// Predicted power table from the noncentral-F formula.
pub fn cmd_power(k: f64, n_grid: &[usize], d: usize, alpha: f64) -> Result<u8> {
    println!("predicted power at k = {k}, d = {d}, alpha = {alpha}");
    println!("{:>8}  {:>10}", "n", "power");
    for &n in n_grid {
        let p = detect::predict_power(k, n, d, alpha)?;
        println!("{n:>8}  {p:>10.6}");
    }
    Ok(EXIT_OK)
}

/// Lists the built-in models with their variables and designs.
pub fn cmd_models() -> Result<u8> {
    for name in ModelSpec::names() {
        let model = ModelSpec::by_name(name)?;
        println!(
            "{name}: {} variables over {:?}, log base {}",
            model.num_vars(),
            model.dim_matrix().basis().labels(),
            model.log_base()
        );
        let design = model.default_design();
        for (i, var) in model.variable_names().iter().enumerate() {
            let dims: Vec<String> = model
                .dim_matrix()
                .column(i)
                .exponents()
                .iter()
                .map(|e| e.to_string())
                .collect();
            println!(
                "  {var:8} dims ({})  log-mean {:9.4}  log-sd {:.4}",
                dims.join(","),
                design.mu()[i],
                design.sigma_diag()[i]
            );
        }
        let qoi: Vec<String> = model
            .qoi_dims()
            .exponents()
            .iter()
            .map(|e| e.to_string())
            .collect();
        println!("  qoi dims ({})", qoi.join(","));
    }
    Ok(EXIT_OK)
}

struct DataTable {
    /// One row per observation: exposed columns in declared order, then the
    /// qoi column.
    rows: Vec<Vec<f64>>,
}

fn read_data_table(path: &Path, exposed: &[String], qoi_column: &str) -> Result<DataTable> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .with_context(|| format!("opening data table {}", path.display()))?;
    let headers = reader.headers()?.clone();
    let col_index = |name: &str| -> Result<usize> {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| anyhow!("data table lacks column `{name}`"))
    };
    let mut wanted: Vec<usize> = exposed
        .iter()
        .map(|n| col_index(n))
        .collect::<Result<Vec<_>>>()?;
    wanted.push(col_index(qoi_column)?);

    let mut rows = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record?;
        let mut row = Vec::with_capacity(wanted.len());
        for &idx in &wanted {
            let cell = record
                .get(idx)
                .ok_or_else(|| anyhow!("row {}: missing value", line + 2))?;
            if cell.trim().is_empty() {
                bail!(
                    "row {}: missing value in column {}",
                    line + 2,
                    headers.get(idx).unwrap_or("?")
                );
            }
            let value: f64 = cell
                .trim()
                .parse()
                .with_context(|| format!("row {}: bad number `{cell}`", line + 2))?;
            if !value.is_finite() {
                bail!("row {}: non-finite value {value}", line + 2);
            }
            row.push(value);
        }
        rows.push(row);
    }
    Ok(DataTable { rows })
}
