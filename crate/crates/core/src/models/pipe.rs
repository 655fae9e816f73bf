//! Rough pipe flow: pressure gradient from friction-factor correlations.
//!
//! Laminar flow follows the Poiseuille relation `f = 32/Re`; from the
//! turbulent onset (`Re >= 3000`, a strict threshold with no blending) the
//! Colebrook equation
//! `1/sqrt(f) = -2 log10(R/3.7 + 2.51/(Re sqrt(f)))`
//! is solved for the friction factor, with `R` the relative roughness. The
//! dimensional response is `dP/L = f * (rho U^2 / 2) / d`.

use super::ModelError;

/// Laminar friction factor, `f = 32 / Re`.
pub fn poiseuille_f(re: f64) -> f64 {
    32.0 / re
}

/// Turbulent friction factor from the Colebrook equation.
///
/// Fixed-point iteration on `y = 1/sqrt(f)`; the returned factor satisfies
/// the defining equation with residual below 1e-10, otherwise a
/// [`ModelError::NoConvergence`] is surfaced.
pub fn colebrook_f(re: f64, relative_roughness: f64) -> Result<f64, ModelError> {
    const MAX_ITER: usize = 200;
    if re.is_nan() || re <= 0.0 || relative_roughness.is_nan() || relative_roughness < 0.0 {
        return Err(ModelError::NonPositiveInput(format!(
            "colebrook_f requires Re > 0 and R >= 0 (got Re={re}, R={relative_roughness})"
        )));
    }
    let step = |y: f64| -> f64 { -2.0 * (relative_roughness / 3.7 + 2.51 * y / re).log10() };
    let mut y = 4.0;
    for iteration in 0..MAX_ITER {
        let next = step(y);
        if !next.is_finite() || next <= 0.0 {
            return Err(ModelError::NoConvergence {
                what: "Colebrook fixed point",
                iterations: iteration + 1,
            });
        }
        let done = (next - y).abs() < 1e-13 * next.max(1.0);
        y = next;
        if done {
            let residual = (y - step(y)).abs();
            if residual < 1e-10 {
                return Ok(1.0 / (y * y));
            }
        }
    }
    Err(ModelError::NoConvergence {
        what: "Colebrook fixed point",
        iterations: MAX_ITER,
    })
}

/// Pressure gradient `dP/L` for given density, bulk velocity, diameter,
/// viscosity, and roughness lengthscale.
pub fn pipe_qoi(rho: f64, u: f64, d: f64, mu: f64, eps: f64) -> Result<f64, ModelError> {
    for (name, v) in [("rho", rho), ("U", u), ("d", d), ("mu", mu), ("eps", eps)] {
        if v.is_nan() || v <= 0.0 {
            return Err(ModelError::NonPositiveInput(format!(
                "pipe_qoi requires positive inputs (got {name}={v})"
            )));
        }
    }
    let re = rho * u * d / mu;
    let f = if re < 3000.0 {
        poiseuille_f(re)
    } else {
        colebrook_f(re, eps / d)?
    };
    Ok(f * (0.5 * rho * u * u) / d)
}
