//! Wilson score interval for a binomial proportion.

use super::special::normal_quantile;
use super::StatError;

/// Wilson confidence interval for `successes / trials` at the given
/// two-sided confidence level.
///
/// Bounds are `(N_r + z^2/2 +- z sqrt(N_r N_f / N + z^2/4)) / (N + z^2)`
/// with `N_f = N - N_r`. The interval stays inside [0, 1] and behaves well
/// at rates near the endpoints, where the normal approximation does not.
pub fn wilson_interval(successes: u64, trials: u64, conf: f64) -> Result<(f64, f64), StatError> {
    if trials == 0 {
        return Err(StatError::Domain("wilson_interval requires N >= 1".into()));
    }
    if successes > trials {
        return Err(StatError::Domain(format!(
            "wilson_interval requires N_r <= N (got {successes} > {trials})"
        )));
    }
    if !(0.0 < conf && conf < 1.0) {
        return Err(StatError::Domain(format!(
            "wilson_interval requires conf in (0, 1) (got {conf})"
        )));
    }
    let z = normal_quantile(0.5 * (1.0 + conf))?;
    let z2 = z * z;
    let n = trials as f64;
    let nr = successes as f64;
    let nf = (trials - successes) as f64;
    let center = nr + 0.5 * z2;
    let half = z * (nr * nf / n + 0.25 * z2).sqrt();
    let denom = n + z2;
    Ok((
        ((center - half) / denom).max(0.0),
        ((center + half) / denom).min(1.0),
    ))
}
