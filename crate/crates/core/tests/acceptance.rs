//! Acceptance suite: one test per shipped guarantee, each printing a
//! PASS/FAIL line. Monte Carlo settings are desk scale (N <= 500
//! replications) with Wilson-interval tolerances and fixed seeds.

use lurkvar::detect::{compare_direction, run_test, stein_scores, DetectionConfig, SteinScores};
use lurkvar::dimensions::{
    check_homogeneity, nondim_vector, nullspace_basis, pinned_complement, rat, same_span, DimBasis,
    DimMatrix, DimVector, Rational,
};
use lurkvar::harness::{ks_uniform_distance, replicate_cell, run_sweep, SweepConfig};
use lurkvar::models::{colebrook_f, two_fluid_qoi, ExperimentSetup, ModelSpec};
use lurkvar::statkit::{
    f_cdf, f_quantile, noncentral_f_cdf, sample_design, GaussianDesign, RngStream,
};

fn pipe_matrix() -> DimMatrix {
    DimMatrix::from_ints(
        &["rho_F", "U_F", "d_P", "mu_F", "eps_P"],
        &[
            &[1, -3, 0],
            &[0, 1, -1],
            &[0, 1, 0],
            &[1, -1, -1],
            &[0, 1, 0],
        ],
        DimBasis::mlt(),
    )
    .unwrap()
}

fn report(criterion: &str, pass: bool, detail: &str) {
    println!(
        "{}: criterion {criterion} - {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {criterion}: {detail}");
}

#[test]
fn criterion_1_type_i_error_pipe() {
    let started = std::time::Instant::now();
    let model = ModelSpec::pipe();
    let cfg = SweepConfig {
        model: "pipe".into(),
        setup: ExperimentSetup::with_held(&model, &[], &[], 0.0).unwrap(),
        n_grid: vec![100, 400, 1600],
        tau_grid: vec![0.0, 100.0],
        replications: 200,
        alpha: 0.05,
        seed: 0xACCE_0001,
        parallelism: 0,
    };
    let result = run_sweep(&cfg).unwrap();
    let mut all_cover = true;
    let mut detail = String::new();
    for cell in &result.cells {
        let covers = cell.wilson_lo <= 0.05 && 0.05 <= cell.wilson_hi;
        all_cover &= covers;
        detail.push_str(&format!(
            "(n={}, tau={}): rate {:.3} CI [{:.3}, {:.3}]; ",
            cell.n, cell.tau, cell.rate, cell.wilson_lo, cell.wilson_hi
        ));
    }
    let within_budget = started.elapsed() <= std::time::Duration::from_secs(180);
    report(
        "1 (Type I error, pipe)",
        all_cover && within_budget,
        &format!(
            "every Wilson CI must cover 0.05 -> {detail}(runtime {:.1?} <= 3 min: {within_budget})",
            started.elapsed()
        ),
    );
}

#[test]
fn criterion_2_pvalue_uniformity() {
    let model = ModelSpec::pipe();
    let setup = ExperimentSetup::with_held(&model, &[], &[], 100.0).unwrap();
    let (_, pvals) = replicate_cell(&model, &setup, 400, 500, 0.05, 0xACCE_0002).unwrap();
    let n = pvals.len() as f64;
    let mean = pvals.iter().sum::<f64>() / n;
    let var = pvals.iter().map(|p| (p - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let ks = ks_uniform_distance(&pvals);
    let ks_critical = 1.628 / n.sqrt();
    let pass = (mean - 0.5).abs() <= 0.04 && (var - 1.0 / 12.0).abs() <= 0.012 && ks < ks_critical;
    report(
        "2 (p-value uniformity)",
        pass,
        &format!(
            "mean {mean:.4} (0.5 +/- 0.04), var {var:.4} (0.0833 +/- 0.012), KS {ks:.4} < {ks_critical:.4}"
        ),
    );
}

#[test]
fn criterion_3_power_trend_pipe() {
    let model = ModelSpec::pipe();
    let cfg = SweepConfig {
        model: "pipe".into(),
        setup: ExperimentSetup::with_held(&model, &["eps_P"], &[], 0.0).unwrap(),
        n_grid: vec![100, 400, 1600, 6400],
        tau_grid: vec![0.0],
        replications: 100,
        alpha: 0.05,
        seed: 0xACCE_0003,
        parallelism: 0,
    };
    let result = run_sweep(&cfg).unwrap();
    let rates: Vec<f64> = result.cells.iter().map(|c| c.rate).collect();
    let top = result.cells.last().unwrap();
    let mut nondecreasing = true;
    for w in result.cells.windows(2) {
        // Nondecreasing up to CI slack: the next CI must reach at least the
        // bottom of the previous one.
        if w[1].wilson_hi < w[0].wilson_lo {
            nondecreasing = false;
        }
    }
    let pass = top.rate >= 0.90 && nondecreasing;
    report(
        "3 (power trend, pipe eps_P lurking)",
        pass,
        &format!(
            "rates {rates:?}; rate(6400) = {:.3} >= 0.90, nondecreasing {nondecreasing}",
            top.rate
        ),
    );
}

#[test]
fn criterion_4_undetectable_inner_fluid() {
    let model = ModelSpec::two_fluid();
    let cfg = SweepConfig {
        model: "two_fluid".into(),
        setup: ExperimentSetup::with_held(&model, &["mu_i", "rho_i"], &[], 0.0).unwrap(),
        n_grid: vec![100, 400, 1600, 6400],
        tau_grid: vec![0.25, 0.5],
        replications: 200,
        alpha: 0.05,
        seed: 0xACCE_0004,
        parallelism: 0,
    };
    let result = run_sweep(&cfg).unwrap();
    let mut all_cover = true;
    let mut detail = String::new();
    for cell in &result.cells {
        let covers = cell.wilson_lo <= 0.05 && 0.05 <= cell.wilson_hi;
        all_cover &= covers;
        detail.push_str(&format!(
            "(n={}, tau={}): {:.3} [{:.3}, {:.3}]; ",
            cell.n, cell.tau, cell.rate, cell.wilson_lo, cell.wilson_hi
        ));
    }
    report(
        "4 (undetectable inner-fluid lurkers)",
        all_cover,
        &format!("every CI must overlap 0.05 -> {detail}"),
    );
}

#[test]
fn criterion_5_pinned_procedure_power_parity() {
    let model = ModelSpec::two_fluid();
    let unpinned = ExperimentSetup::with_held(&model, &["mu_o"], &[], 0.0).unwrap();
    let (cell_u, _) = replicate_cell(&model, &unpinned, 6400, 100, 0.05, 0xACCE_0005).unwrap();
    let pinned = ExperimentSetup::with_held(&model, &["mu_o"], &["H"], 0.0).unwrap();
    let (cell_p, _) = replicate_cell(&model, &pinned, 6400, 100, 0.05, 0xACCE_0005).unwrap();
    let gap = (cell_u.rate - cell_p.rate).abs();
    report(
        "5 (pinned-variable power parity)",
        gap <= 0.15,
        &format!(
            "unpinned {:.3} vs H-pinned {:.3}, |gap| {gap:.3} <= 0.15",
            cell_u.rate, cell_p.rate
        ),
    );
}

#[test]
fn criterion_6_dimension_vector_direction() {
    let model = ModelSpec::two_fluid();
    let unpinned = ExperimentSetup::with_held(&model, &["mu_o"], &[], 0.0).unwrap();
    let (cell, _) = replicate_cell(&model, &unpinned, 6400, 50, 0.05, 0xACCE_0006).unwrap();
    let d_lu = unpinned.d_lu(&model);
    let cosine = compare_direction(&cell.mean_nu_hat, &d_lu, None).unwrap();

    let pinned = ExperimentSetup::with_held(&model, &["mu_o"], &["H"], 0.0).unwrap();
    let w_pin = pinned_complement(&pinned.d_pin(&model)).unwrap();
    // Projected comparison vector W W' D_LU: its Length entry must vanish.
    let target = d_lu.column(0).to_f64();
    let coeffs: Vec<f64> = (0..w_pin[0].len())
        .map(|c| (0..3).map(|k| w_pin[k][c] * target[k]).sum())
        .collect();
    let projected_len: f64 = (0..w_pin[0].len()).map(|c| w_pin[1][c] * coeffs[c]).sum();
    // And the pinned run's embedded nu_hat has no Length component either.
    let (cell_pin, _) = replicate_cell(&model, &pinned, 6400, 50, 0.05, 0xACCE_0006).unwrap();

    let pass =
        cosine >= 0.95 && projected_len.abs() < 1e-10 && cell_pin.mean_nu_hat[1].abs() < 1e-10;
    report(
        "6 (dimension-vector direction)",
        pass,
        &format!(
            "cosine(mean nu_hat, viscosity) = {cosine:.4} >= 0.95; projected Length components {:.2e}, {:.2e}",
            projected_len.abs(),
            cell_pin.mean_nu_hat[1].abs()
        ),
    );
}

#[test]
fn criterion_7_exact_algebra() {
    let full = pipe_matrix();
    let rv =
        |ints: &[i64]| -> Vec<Rational> { ints.iter().copied().map(Rational::from_int).collect() };

    // Nullspace spans: Reynolds number rho*U*d/mu and relative roughness
    // eps/d for the full matrix; Reynolds alone when roughness is dropped.
    let span_full = same_span(
        &nullspace_basis(&full),
        &[rv(&[1, 1, 1, -1, 0]), rv(&[0, 0, -1, 0, 1])],
    );
    let reduced = full.select(&[0, 1, 2, 3]);
    let span_reduced = same_span(&nullspace_basis(&reduced), &[rv(&[1, 1, 1, -1])]);

    // Theorem-1 vector for the full matrix and the per-length gradient.
    let dq_grad = DimVector::from_ints(&[1, -2, -2], DimBasis::mlt()).unwrap();
    let u = nondim_vector(&full, &dq_grad).unwrap();
    let solves_primal = full.mul_vec(&u).unwrap() == dq_grad.exponents().to_vec();
    let solves_orth = nullspace_basis(&full).iter().all(|v| {
        v.iter()
            .zip(&u)
            .map(|(a, b)| *a * *b)
            .sum::<Rational>()
            .is_zero()
    });

    // Analytic verdicts against a pressure qoi, Delta P = (1,-1,-2).
    let dq_p = DimVector::from_ints(&[1, -1, -2], DimBasis::mlt()).unwrap();
    let bad = check_homogeneity(&full.select(&[2, 1]), &dq_p).unwrap();
    let verdict_bad = !bad.homogeneous && bad.missing_dimensions == vec!["M".to_string()];
    let good_mat = full.select(&[0, 1]);
    let good = check_homogeneity(&good_mat, &dq_p).unwrap();
    let dynamic_pressure = nondim_vector(&good_mat, &dq_p).unwrap() == vec![rat(1, 1), rat(2, 1)];
    let verdict_good = good.homogeneous && dynamic_pressure;

    let pass =
        span_full && span_reduced && solves_primal && solves_orth && verdict_bad && verdict_good;
    report(
        "7 (exact algebra suite)",
        pass,
        &format!(
            "spans ({span_full}, {span_reduced}), Theorem-1 systems ({solves_primal}, {solves_orth}), verdicts ({verdict_bad}, {verdict_good})"
        ),
    );
}

#[test]
fn criterion_8_numerical_kernels() {
    // F(d, d) median is exactly 1.
    let mut median_ok = true;
    for d in [2u64, 3, 7, 20] {
        if (f_quantile(d, d, 0.5).unwrap() - 1.0).abs() >= 1e-10 {
            median_ok = false;
        }
    }

    // Noncentral F at zero noncentrality equals the central CDF.
    let mut degenerate_ok = true;
    for &x in &[0.1, 0.5, 1.0, 2.0, 5.0] {
        for &(d1, d2) in &[(3u64, 97u64), (5, 50), (1, 10)] {
            let diff =
                (noncentral_f_cdf(d1, d2, 0.0, x).unwrap() - f_cdf(d1, d2, x).unwrap()).abs();
            if diff >= 1e-10 {
                degenerate_ok = false;
            }
        }
    }

    // Colebrook: residual below 1e-10 and bisection agreement 1e-8 on the
    // 5x5 grid Re in [4e3, 1e8] (log-spaced), R in [0, 0.05].
    let mut colebrook_ok = true;
    for i in 0..5 {
        let re = 4e3 * (1e8_f64 / 4e3).powf(i as f64 / 4.0);
        for j in 0..5 {
            let rr = 0.05 * j as f64 / 4.0;
            let f = colebrook_f(re, rr).unwrap();
            let resid = (1.0 / f.sqrt() + 2.0 * (rr / 3.7 + 2.51 / (re * f.sqrt())).log10()).abs();
            let h = |f: f64| 1.0 / f.sqrt() + 2.0 * (rr / 3.7 + 2.51 / (re * f.sqrt())).log10();
            let (mut lo, mut hi) = (1e-4, 1.0);
            for _ in 0..100 {
                let mid = 0.5 * (lo + hi);
                if h(mid) > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            if resid >= 1e-10 || (f - 0.5 * (lo + hi)).abs() >= 1e-8 {
                colebrook_ok = false;
            }
        }
    }

    // Two-fluid closed form vs direct integration of the inner profile on
    // 100 random parameter points, relative 1e-8.
    let mut two_fluid_ok = true;
    let mut rng = RngStream::new(808, 0);
    for _ in 0..100 {
        let g = 0.1 + 10.0 * rng.next_uniform();
        let big_h = 0.5 + 2.0 * rng.next_uniform();
        let h = 0.49 * big_h * rng.next_uniform();
        let mu_o = 0.05 + rng.next_uniform();
        let mu_i = mu_o * (1.0 + 50.0 * rng.next_uniform());
        let q = two_fluid_qoi(g, h, big_h, mu_o, mu_i, 1.0, 1.0).unwrap();
        // Analytic antiderivative of the quadratic inner profile.
        let c1 = g * big_h / (2.0 * mu_i);
        let c0 = (big_h * h - h * h) * g / 2.0 * (1.0 / mu_o - 1.0 / mu_i);
        let anti = |y: f64| -g / (6.0 * mu_i) * y.powi(3) + 0.5 * c1 * y * y + c0 * y;
        let oracle = anti(big_h - h) - anti(h);
        if (q - oracle).abs() / oracle.abs().max(1e-30) >= 1e-8 {
            two_fluid_ok = false;
        }
    }

    let pass = median_ok && degenerate_ok && colebrook_ok && two_fluid_ok;
    report(
        "8 (numerical kernels)",
        pass,
        &format!(
            "F median {median_ok}, noncentral degenerate {degenerate_ok}, Colebrook {colebrook_ok}, two-fluid {two_fluid_ok}"
        ),
    );
}

#[test]
fn criterion_9_stein_exactness_and_scale_invariance() {
    // Linear dimensionless response: Stein's lemma is exact, so the score
    // mean must recover D_EX a within 3 standard errors at n = 1e5.
    let d = pipe_matrix();
    let dq = DimVector::from_ints(&[1, -2, -2], DimBasis::mlt()).unwrap();
    let design = GaussianDesign::new(
        vec![0.1682, 5.7565, 0.3965, -11.3102, -2.0999],
        vec![0.0561, 0.3838, 0.0448, 0.0676, 0.0676],
    )
    .unwrap();
    let cfg = DetectionConfig::new(d, dq, design.clone(), 10.0, 0.05).unwrap();
    let a = [0.4, -0.8, 0.3, 0.1, -0.5];
    let n = 100_000;
    let mut rng = RngStream::new(0xACCE_0009, 0);
    let x = sample_design(&design, n, &mut rng);
    let w: Vec<f64> = cfg.w_ex().iter().map(Rational::to_f64).collect();
    let ln10 = 10.0_f64.ln();
    let q: Vec<f64> = x
        .iter()
        .map(|row| {
            let pi: f64 = a.iter().zip(row).map(|(ai, xi)| ai * xi).sum::<f64>() + 3.0;
            let wx: f64 = w.iter().zip(row).map(|(wi, xi)| wi * xi).sum();
            pi * (ln10 * wx).exp()
        })
        .collect();
    let scores = stein_scores(&x, &q, &cfg).unwrap();
    let d_f = cfg.d_ex().to_f64_rows();
    let mut stein_ok = true;
    let mut detail = String::new();
    for comp in 0..3 {
        let want: f64 = (0..5).map(|j| d_f[comp][j] * a[j]).sum();
        let mean: f64 = scores.rows().iter().map(|g| g[comp]).sum::<f64>() / n as f64;
        let var: f64 = scores
            .rows()
            .iter()
            .map(|g| (g[comp] - mean).powi(2))
            .sum::<f64>()
            / (n as f64 - 1.0);
        let se = (var / n as f64).sqrt();
        if (mean - want).abs() >= 3.0 * se {
            stein_ok = false;
        }
        detail.push_str(&format!("{:.4}/{:.4}+-{:.4} ", mean, want, 3.0 * se));
    }

    // Scale invariance: x -> c x with the design, base rescaled to match;
    // responses held fixed.
    let report_base = run_test(&scores, 0.05).unwrap();
    let c = 3.7;
    let x_scaled: Vec<Vec<f64>> = x
        .iter()
        .map(|row| row.iter().map(|v| c * v).collect())
        .collect();
    let cfg_scaled = DetectionConfig::with_w_ex(
        cfg.d_ex().clone(),
        cfg.dq().clone(),
        cfg.w_ex().to_vec(),
        design.scaled(c),
        10.0_f64.powf(1.0 / c),
        0.05,
    )
    .unwrap();
    let report_scaled = run_test(&stein_scores(&x_scaled, &q, &cfg_scaled).unwrap(), 0.05).unwrap();
    let t2_rel = (report_base.t2 - report_scaled.t2).abs() / report_base.t2.max(1.0);
    let scale_ok = t2_rel < 1e-8 && (report_base.p_value - report_scaled.p_value).abs() < 1e-8;

    let pass = stein_ok && scale_ok;
    report(
        "9 (Stein exactness and scale invariance)",
        pass,
        &format!("score means vs targets: {detail}; t2 relative shift {t2_rel:.2e}"),
    );
}

// Smoke check that the suite's own helpers stay honest.
#[test]
fn stein_scores_from_rows_round_trip() {
    let rows = vec![vec![1.0, 2.0], vec![3.0, 4.0]];
    let s = SteinScores::from_rows(rows.clone());
    assert_eq!(s.rows(), rows.as_slice());
    assert!(!s.projected());
}
