//! Two-fluid channel flow: a viscous inner fluid lubricated by outer
//! layers of thickness `h` against each plate of a gap of height `H`.
//!
//! Steady incompressible laminar flow gives a piecewise-parabolic velocity
//! profile; integrating the inner profile over `[h, H-h]` yields the flow
//! rate per unit depth
//!
//! `Q_d = -(G / 2 mu_i) [ ((H-h)^3 - h^3)/3 - H((H-h)^2 - h^2)/2
//!        - ((mu_o - mu_i)/mu_o)(h^2 - hH)(H - 2h) ]`
//!
//! with `G` the applied pressure gradient. Positive `G` drives positive
//! flow. The densities do not enter: they cancel out of the steady momentum
//! balance, and the arguments exist only so a study can (pointlessly) vary
//! them.

use super::ModelError;

/// Flow rate per unit channel depth.
pub fn two_fluid_qoi(
    grad_p: f64,
    h: f64,
    big_h: f64,
    mu_o: f64,
    mu_i: f64,
    _rho_o: f64,
    _rho_i: f64,
) -> Result<f64, ModelError> {
    if [big_h, mu_o, mu_i].iter().any(|v| v.is_nan() || *v <= 0.0) {
        return Err(ModelError::NonPositiveInput(format!(
            "two_fluid_qoi requires H, mu_o, mu_i > 0 (got H={big_h}, mu_o={mu_o}, mu_i={mu_i})"
        )));
    }
    if !(0.0 <= h && h < big_h / 2.0) {
        return Err(ModelError::Geometry {
            h,
            half_gap: big_h / 2.0,
        });
    }
    let inner = big_h - h;
    let bracket = (inner.powi(3) - h.powi(3)) / 3.0
        - 0.5 * big_h * (inner.powi(2) - h.powi(2))
        - (mu_o - mu_i) / mu_o * (h * h - h * big_h) * (big_h - 2.0 * h);
    Ok(-0.5 * grad_p / mu_i * bracket)
}
