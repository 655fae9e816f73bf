//! Lurking-variable detection procedures.
//!
//! The test works on score vectors
//! `g_i = D_EX Sigma^-1 (x_i - mu) pi_obs(x_i)` built from log-space design
//! points and the non-dimensionalized response. By Stein's lemma the mean
//! of `g` estimates `D_EX` times the average response gradient, which is
//! exactly zero when no dimensional lurking variable is present; Hotelling's
//! T-squared then supplies the reference distribution. A pinned variant
//! first projects the scores onto the orthogonal complement of the pinned
//! dimensions.

use thiserror::Error;

use crate::dimensions::{self, DimError, DimMatrix, DimVector, Rational};
use crate::statkit::{
    f_quantile, hotelling_t2, noncentral_f_cdf, solve_spd, t2_pvalue, GaussianDesign, StatError,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DetectError {
    #[error(transparent)]
    Dim(#[from] DimError),
    #[error(transparent)]
    Stat(#[from] StatError),
    #[error("shape mismatch: {0}")]
    Mismatch(String),
    #[error("k must lie in [0, 1) (got {0})")]
    KOutOfRange(f64),
    #[error("alpha must lie in (0, 1) (got {0})")]
    AlphaOutOfRange(f64),
    #[error("log base must be positive and different from 1 (got {0})")]
    BadLogBase(f64),
    #[error("direction comparison needs nonzero vectors")]
    ZeroVector,
    #[error("direction comparison expects a single lurking column (got {0})")]
    MultiColumn(usize),
    #[error("pinned test expects unprojected scores")]
    AlreadyProjected,
}

/// Everything one detection experiment needs: the exposed dimension matrix,
/// the quantity of interest's dimensions, the (validated) non-dimensionalizing
/// vector, the sampling design, the log base of the design coordinates, the
/// significance level, and optionally the pinned dimension matrix.
#[derive(Debug, Clone)]
pub struct DetectionConfig {
    d_ex: DimMatrix,
    dq: DimVector,
    w_ex: Vec<Rational>,
    design: GaussianDesign,
    log_base: f64,
    alpha: f64,
    d_pin: Option<DimMatrix>,
}

impl DetectionConfig {
    /// Builds a config with the canonical (pi-subspace orthogonal)
    /// non-dimensionalizing vector. Fails with the analytic lurking-variable
    /// signal when `dq` is outside the exposed columnspace.
    pub fn new(
        d_ex: DimMatrix,
        dq: DimVector,
        design: GaussianDesign,
        log_base: f64,
        alpha: f64,
    ) -> Result<Self, DetectError> {
        let w_ex = dimensions::nondim_vector(&d_ex, &dq)?;
        Self::with_w_ex(d_ex, dq, w_ex, design, log_base, alpha)
    }

    /// Builds a config with a caller-supplied non-dimensionalizing vector,
    /// validating `D_EX w = d(q)` exactly.
    pub fn with_w_ex(
        d_ex: DimMatrix,
        dq: DimVector,
        w_ex: Vec<Rational>,
        design: GaussianDesign,
        log_base: f64,
        alpha: f64,
    ) -> Result<Self, DetectError> {
        if design.dim() != d_ex.num_vars() {
            return Err(DetectError::Mismatch(format!(
                "design covers {} variables but D_EX has {}",
                design.dim(),
                d_ex.num_vars()
            )));
        }
        if !(0.0 < alpha && alpha < 1.0) {
            return Err(DetectError::AlphaOutOfRange(alpha));
        }
        if log_base.is_nan() || log_base <= 0.0 || log_base == 1.0 {
            return Err(DetectError::BadLogBase(log_base));
        }
        let image = d_ex.mul_vec(&w_ex)?;
        if image != dq.exponents() {
            return Err(DetectError::Mismatch(
                "w_ex does not non-dimensionalize the qoi (D_EX w != d(q))".into(),
            ));
        }
        Ok(DetectionConfig {
            d_ex,
            dq,
            w_ex,
            design,
            log_base,
            alpha,
            d_pin: None,
        })
    }

    pub fn with_pinned(mut self, d_pin: DimMatrix) -> Result<Self, DetectError> {
        if d_pin.basis() != self.d_ex.basis() {
            return Err(DetectError::Mismatch(
                "pinned matrix basis differs from exposed".into(),
            ));
        }
        self.d_pin = Some(d_pin);
        Ok(self)
    }

    pub fn d_ex(&self) -> &DimMatrix {
        &self.d_ex
    }

    pub fn dq(&self) -> &DimVector {
        &self.dq
    }

    pub fn w_ex(&self) -> &[Rational] {
        &self.w_ex
    }

    pub fn design(&self) -> &GaussianDesign {
        &self.design
    }

    pub fn log_base(&self) -> f64 {
        self.log_base
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn d_pin(&self) -> Option<&DimMatrix> {
        self.d_pin.as_ref()
    }
}

/// Score vectors, one row per observation.
#[derive(Debug, Clone, PartialEq)]
pub struct SteinScores {
    g: Vec<Vec<f64>>,
    projected: bool,
}

impl SteinScores {
    /// Wraps externally computed raw (unprojected) score rows.
    pub fn from_rows(g: Vec<Vec<f64>>) -> Self {
        SteinScores {
            g,
            projected: false,
        }
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.g
    }

    pub fn n(&self) -> usize {
        self.g.len()
    }

    /// Number of score components: the base-dimension count when raw, the
    /// complement dimension after a pinned projection.
    pub fn dim(&self) -> usize {
        self.g.first().map_or(0, Vec::len)
    }

    pub fn projected(&self) -> bool {
        self.projected
    }
}

/// Full outcome of one hypothesis test.
#[derive(Debug, Clone, PartialEq)]
pub struct TestReport {
    pub t2: f64,
    pub dof_num: usize,
    pub dof_den: usize,
    pub critical: f64,
    pub p_value: f64,
    pub reject: bool,
    pub alpha: f64,
    /// Mean score vector, the estimate of nu. For pinned tests this is
    /// embedded back into base-dimension coordinates (components along the
    /// pinned directions are zero by construction).
    pub nu_hat: Vec<f64>,
    /// Unit-normalized `nu_hat`; absent when the estimate is exactly zero.
    pub nu_hat_unit: Option<Vec<f64>>,
    pub n: usize,
}

impl TestReport {
    /// Cross-checks the three equivalent forms of the decision rule; the
    /// float slack covers p-values and critical values sitting exactly on
    /// the boundary.
    pub fn is_consistent(&self) -> bool {
        let by_stat = self.t2 >= self.critical;
        let by_p = self.p_value <= self.alpha;
        let near_boundary = (self.p_value - self.alpha).abs() < 1e-12
            || (self.t2 - self.critical).abs() < 1e-9 * self.critical.max(1.0);
        (self.reject == by_stat) && (by_stat == by_p || near_boundary)
    }

    /// Flat `key=value` serialization, one entry per line.
    pub fn to_key_value(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("t2={}\n", self.t2));
        out.push_str(&format!("dof_num={}\n", self.dof_num));
        out.push_str(&format!("dof_den={}\n", self.dof_den));
        out.push_str(&format!("critical={}\n", self.critical));
        out.push_str(&format!("p_value={}\n", self.p_value));
        out.push_str(&format!("reject={}\n", self.reject));
        out.push_str(&format!("alpha={}\n", self.alpha));
        out.push_str(&format!("n={}\n", self.n));
        for (i, v) in self.nu_hat.iter().enumerate() {
            out.push_str(&format!("nu_hat_{}={}\n", i + 1, v));
        }
        if let Some(unit) = &self.nu_hat_unit {
            for (i, v) in unit.iter().enumerate() {
                out.push_str(&format!("nu_hat_unit_{}={}\n", i + 1, v));
            }
        }
        out
    }
}

impl std::fmt::Display for TestReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(
            f,
            "Hotelling T2 test: t2 = {:.6}, critical = {:.6} (F_{{{},{}}} at alpha = {})",
            self.t2, self.critical, self.dof_num, self.dof_den, self.alpha
        )?;
        writeln!(f, "p-value = {:.6e}  (n = {})", self.p_value, self.n)?;
        writeln!(
            f,
            "verdict: {}",
            if self.reject {
                "REJECT no-lurking-variable null"
            } else {
                "fail to reject (no lurking variable detected)"
            }
        )?;
        write!(f, "nu_hat = [")?;
        for (i, v) in self.nu_hat.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v:.6}")?;
        }
        write!(f, "]")
    }
}

/// Builds the score matrix from log-space inputs and the raw dimensional
/// responses.
///
/// `x` holds one row per observation in the design's log coordinates;
/// `q_obs` the matching dimensional responses. Each response is
/// non-dimensionalized with the power product encoded by `w_ex` in the
/// configured base, `pi_i = q_i * base^(-w_ex . x_i)`, and the score is
/// `g_i = D_EX diag(1/sigma^2) (x_i - mu) (pi_i - pibar)`.
///
/// The responses enter centered about their sample mean. The weight
/// `(x_i - mu)` has zero mean, so centering does not move the score mean
/// (the quantity the test is about), but it removes the constant response
/// component from the score variance. Without it the constant dominates
/// the covariance and the test needs roughly an order of magnitude more
/// samples for the same power.
pub fn stein_scores(
    x: &[Vec<f64>],
    q_obs: &[f64],
    cfg: &DetectionConfig,
) -> Result<SteinScores, DetectError> {
    if x.len() != q_obs.len() {
        return Err(DetectError::Mismatch(format!(
            "{} input rows vs {} responses",
            x.len(),
            q_obs.len()
        )));
    }
    let p = cfg.d_ex.num_vars();
    let d = cfg.d_ex.dims();
    let d_f = cfg.d_ex.to_f64_rows();
    let w_f: Vec<f64> = cfg.w_ex.iter().map(Rational::to_f64).collect();
    let mu = cfg.design.mu();
    let inv_var: Vec<f64> = cfg
        .design
        .sigma_diag()
        .iter()
        .map(|s| 1.0 / (s * s))
        .collect();
    let ln_base = cfg.log_base.ln();

    let mut pis = Vec::with_capacity(x.len());
    for (row, &q) in x.iter().zip(q_obs) {
        if row.len() != p {
            return Err(DetectError::Mismatch(format!(
                "input row has {} entries, design has {p}",
                row.len()
            )));
        }
        let w_dot_x: f64 = w_f.iter().zip(row).map(|(w, xi)| w * xi).sum();
        pis.push(q * (-ln_base * w_dot_x).exp());
    }
    let pibar = pis.iter().sum::<f64>() / (pis.len().max(1)) as f64;

    let mut g = Vec::with_capacity(x.len());
    for (row, &pi) in x.iter().zip(&pis) {
        let centered = pi - pibar;
        let weighted: Vec<f64> = (0..p)
            .map(|j| inv_var[j] * (row[j] - mu[j]) * centered)
            .collect();
        let gi: Vec<f64> = (0..d)
            .map(|i| (0..p).map(|j| d_f[i][j] * weighted[j]).sum())
            .collect();
        g.push(gi);
    }
    Ok(SteinScores {
        g,
        projected: false,
    })
}

fn mean_rows(rows: &[Vec<f64>]) -> Vec<f64> {
    let n = rows.len();
    let d = rows.first().map_or(0, Vec::len);
    let mut m = vec![0.0; d];
    for row in rows {
        for (mi, x) in m.iter_mut().zip(row) {
            *mi += x;
        }
    }
    for mi in m.iter_mut() {
        *mi /= n as f64;
    }
    m
}

fn build_report(
    rows: &[Vec<f64>],
    alpha: f64,
    nu_hat: Vec<f64>,
) -> Result<TestReport, DetectError> {
    if !(0.0 < alpha && alpha < 1.0) {
        return Err(DetectError::AlphaOutOfRange(alpha));
    }
    let (t2, stats) = hotelling_t2(rows)?;
    let n = stats.n;
    let d = rows[0].len();
    let critical = d as f64 * (n as f64 - 1.0) / (n - d) as f64
        * f_quantile(d as u64, (n - d) as u64, 1.0 - alpha)?;
    let p_value = t2_pvalue(t2, d, n)?;
    let norm = nu_hat.iter().map(|v| v * v).sum::<f64>().sqrt();
    let nu_hat_unit = if norm == 0.0 {
        None
    } else {
        Some(nu_hat.iter().map(|v| v / norm).collect())
    };
    Ok(TestReport {
        t2,
        dof_num: d,
        dof_den: n - d,
        critical,
        p_value,
        reject: t2 >= critical,
        alpha,
        nu_hat,
        nu_hat_unit,
        n,
    })
}

/// Standard test: no pinned variables, scores used as built.
pub fn run_test(scores: &SteinScores, alpha: f64) -> Result<TestReport, DetectError> {
    let nu_hat = mean_rows(scores.rows());
    build_report(scores.rows(), alpha, nu_hat)
}

/// Pinned-variable test.
///
/// Projects every raw score through `W_PI` (from
/// [`crate::dimensions::pinned_complement`], `dims` rows by `dims - r_PI`
/// columns) and tests in the complement, so the numerator degrees of freedom
/// drop from `d` to `d - r_PI`. The reported `nu_hat` is embedded back into
/// base-dimension coordinates as `W_PI (projected mean)`.
pub fn run_pinned_test(
    scores_raw: &SteinScores,
    w_pin: &[Vec<f64>],
    alpha: f64,
) -> Result<TestReport, DetectError> {
    if scores_raw.projected() {
        return Err(DetectError::AlreadyProjected);
    }
    let d = scores_raw.dim();
    if w_pin.len() != d {
        return Err(DetectError::Mismatch(format!(
            "W_PI has {} rows, scores have {d} components",
            w_pin.len()
        )));
    }
    let d_proj = w_pin.first().map_or(0, Vec::len);
    let projected: Vec<Vec<f64>> = scores_raw
        .rows()
        .iter()
        .map(|g| {
            (0..d_proj)
                .map(|c| (0..d).map(|k| w_pin[k][c] * g[k]).sum())
                .collect()
        })
        .collect();
    let proj_mean = mean_rows(&projected);
    let embedded: Vec<f64> = (0..d)
        .map(|k| (0..d_proj).map(|c| w_pin[k][c] * proj_mean[c]).sum())
        .collect();
    build_report(&projected, alpha, embedded)
}

/// Predicted test power at effect size `k`, sample count `n`, and score
/// dimension `d`.
///
/// The noncentrality is `Delta = n (k + k^2 / (1 - k))` and the power is the
/// noncentral-F mass above the central critical value.
pub fn predict_power(k: f64, n: usize, d: usize, alpha: f64) -> Result<f64, DetectError> {
    if !(0.0..1.0).contains(&k) {
        return Err(DetectError::KOutOfRange(k));
    }
    if !(0.0 < alpha && alpha < 1.0) {
        return Err(DetectError::AlphaOutOfRange(alpha));
    }
    if n <= d || d == 0 {
        return Err(DetectError::Stat(StatError::TooFewSamples { n, d }));
    }
    let delta = n as f64 * (k + k * k / (1.0 - k));
    let crit = f_quantile(d as u64, (n - d) as u64, 1.0 - alpha)?;
    Ok(1.0 - noncentral_f_cdf(d as u64, (n - d) as u64, delta, crit)?)
}

/// Plug-in estimate of the effect size `k = nu' E[g g']^-1 nu` from scores,
/// clamped to `[0, 1 - 1e-12]` so it can feed [`predict_power`] directly.
#[allow(clippy::needless_range_loop)]
pub fn estimate_k(scores: &SteinScores) -> Result<f64, DetectError> {
    let n = scores.n();
    let d = scores.dim();
    if n <= d || d == 0 {
        return Err(DetectError::Stat(StatError::TooFewSamples { n, d }));
    }
    let mut second = vec![vec![0.0; d]; d];
    for row in scores.rows() {
        for i in 0..d {
            for j in i..d {
                second[i][j] += row[i] * row[j];
            }
        }
    }
    for i in 0..d {
        for j in i..d {
            second[i][j] /= n as f64;
            second[j][i] = second[i][j];
        }
    }
    let mean = mean_rows(scores.rows());
    let x = solve_spd(&second, &mean)?;
    let k: f64 = mean.iter().zip(&x).map(|(m, xi)| m * xi).sum();
    Ok(k.clamp(0.0, 1.0 - 1e-12))
}

/// Cosine similarity between an estimated dimension vector and the lurking
/// column, optionally projected through `W_PI W_PI'` to mirror a pinned run.
pub fn compare_direction(
    nu_hat: &[f64],
    d_lu: &DimMatrix,
    w_pin: Option<&[Vec<f64>]>,
) -> Result<f64, DetectError> {
    if d_lu.num_vars() != 1 {
        return Err(DetectError::MultiColumn(d_lu.num_vars()));
    }
    let mut target: Vec<f64> = d_lu.column(0).to_f64();
    if let Some(w) = w_pin {
        let d = target.len();
        if w.len() != d {
            return Err(DetectError::Mismatch(format!(
                "W_PI has {} rows, expected {d}",
                w.len()
            )));
        }
        let cols = w.first().map_or(0, Vec::len);
        let coeffs: Vec<f64> = (0..cols)
            .map(|c| (0..d).map(|k| w[k][c] * target[k]).sum())
            .collect();
        target = (0..d)
            .map(|k| (0..cols).map(|c| w[k][c] * coeffs[c]).sum())
            .collect();
    }
    if nu_hat.len() != target.len() {
        return Err(DetectError::Mismatch(format!(
            "nu_hat has {} entries, lurking column has {}",
            nu_hat.len(),
            target.len()
        )));
    }
    let nn: f64 = nu_hat.iter().map(|v| v * v).sum::<f64>().sqrt();
    let nt: f64 = target.iter().map(|v| v * v).sum::<f64>().sqrt();
    if nn == 0.0 || nt == 0.0 {
        return Err(DetectError::ZeroVector);
    }
    let dot: f64 = nu_hat.iter().zip(&target).map(|(a, b)| a * b).sum();
    Ok(dot / (nn * nt))
}
