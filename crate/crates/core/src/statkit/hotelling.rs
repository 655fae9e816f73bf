//! Hotelling's T-squared statistic and its F reference distribution.

use super::fdist::f_cdf;
use super::StatError;

/// Sample mean and unbiased covariance of a row-per-observation matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleStats {
    pub mean: Vec<f64>,
    pub cov: Vec<Vec<f64>>,
    pub n: usize,
}

impl SampleStats {
    /// Computes the mean vector and the (n-1)-divisor covariance.
    #[allow(clippy::needless_range_loop)]
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, StatError> {
        let n = rows.len();
        if n < 2 {
            return Err(StatError::TooFewSamples { n, d: 1 });
        }
        let d = rows[0].len();
        if let Some(bad) = rows.iter().find(|r| r.len() != d) {
            return Err(StatError::Domain(format!(
                "ragged input: row with {} entries among rows of {d}",
                bad.len()
            )));
        }
        let mut mean = vec![0.0; d];
        for row in rows {
            for (m, x) in mean.iter_mut().zip(row) {
                *m += x;
            }
        }
        for m in mean.iter_mut() {
            *m /= n as f64;
        }
        let mut cov = vec![vec![0.0; d]; d];
        for row in rows {
            for i in 0..d {
                let di = row[i] - mean[i];
                for j in i..d {
                    cov[i][j] += di * (row[j] - mean[j]);
                }
            }
        }
        let denom = (n - 1) as f64;
        for i in 0..d {
            for j in i..d {
                cov[i][j] /= denom;
                cov[j][i] = cov[i][j];
            }
        }
        Ok(SampleStats { mean, cov, n })
    }
}

/// Solve the symmetric positive semidefinite system `A x = b` by an LDL^T
/// factorization without pivoting.
///
/// Declares [`StatError::SingularCovariance`] when a pivot falls below
/// 1e-12 times the largest pivot seen, which catches constant responses and
/// degenerate designs instead of amplifying them into garbage.
pub fn solve_spd(a: &[Vec<f64>], b: &[f64]) -> Result<Vec<f64>, StatError> {
    let d = a.len();
    if d == 0 {
        return Ok(Vec::new());
    }
    let mut l = vec![vec![0.0; d]; d];
    let mut diag = vec![0.0; d];
    let mut max_pivot = 0.0_f64;
    for j in 0..d {
        let mut dj = a[j][j];
        for k in 0..j {
            dj -= l[j][k] * l[j][k] * diag[k];
        }
        max_pivot = max_pivot.max(dj.abs());
        if !dj.is_finite() || dj.abs() <= 1e-12 * max_pivot {
            return Err(StatError::SingularCovariance);
        }
        diag[j] = dj;
        l[j][j] = 1.0;
        for i in j + 1..d {
            let mut v = a[i][j];
            for k in 0..j {
                v -= l[i][k] * l[j][k] * diag[k];
            }
            l[i][j] = v / dj;
        }
    }
    // Forward substitution L y = b, then D z = y, then L^T x = z.
    let mut x = b.to_vec();
    for i in 0..d {
        for k in 0..i {
            x[i] -= l[i][k] * x[k];
        }
    }
    for i in 0..d {
        x[i] /= diag[i];
    }
    for i in (0..d).rev() {
        for k in i + 1..d {
            x[i] -= l[k][i] * x[k];
        }
    }
    Ok(x)
}

/// Hotelling's statistic `t^2 = n ybar' S^-1 ybar` for the rows of `g`.
///
/// Requires `n > d` observations and a nonsingular sample covariance. An
/// exactly zero mean short-circuits to `t^2 = 0` without touching the
/// covariance, so an identically zero response (where S is singular too)
/// still yields the correct statistic.
pub fn hotelling_t2(g: &[Vec<f64>]) -> Result<(f64, SampleStats), StatError> {
    let n = g.len();
    let d = if n == 0 { 0 } else { g[0].len() };
    if n <= d || n < 2 {
        return Err(StatError::TooFewSamples { n, d });
    }
    let stats = SampleStats::from_rows(g)?;
    if stats.mean.iter().all(|&m| m == 0.0) {
        return Ok((0.0, stats));
    }
    let x = solve_spd(&stats.cov, &stats.mean)?;
    let t2 = n as f64 * stats.mean.iter().zip(&x).map(|(m, xi)| m * xi).sum::<f64>();
    Ok((t2.max(0.0), stats))
}

/// Null p-value of a T-squared statistic: under no effect,
/// `t^2 (n-d) / (d (n-1))` is F(d, n-d) distributed.
pub fn t2_pvalue(t2: f64, d: usize, n: usize) -> Result<f64, StatError> {
    if n <= d || d == 0 {
        return Err(StatError::TooFewSamples { n, d });
    }
    let (df1, df2) = (d as f64, (n - d) as f64);
    let f_stat = t2 * df2 / (df1 * (n as f64 - 1.0));
    Ok(1.0 - f_cdf(d as u64, (n - d) as u64, f_stat)?)
}
