//! Statistical kernels: seeded RNG streams, Gaussian designs, F-family
//! distributions, Hotelling's T-squared machinery, and Wilson intervals.
//!
//! Everything here is self-contained and pure apart from [`RngStream`],
//! which is single-owner mutable; concurrent work takes one stream each.

mod fdist;
mod hotelling;
mod rng;
pub mod special;
mod wilson;

use thiserror::Error;

pub use fdist::{f_cdf, f_quantile, noncentral_f_cdf};
pub use hotelling::{hotelling_t2, solve_spd, t2_pvalue, SampleStats};
pub use rng::RngStream;
pub use wilson::wilson_interval;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StatError {
    #[error("{what} failed to converge after {iterations} iterations")]
    NoConvergence {
        what: &'static str,
        iterations: usize,
    },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("sample covariance is singular (degenerate design or constant response)")]
    SingularCovariance,
    #[error("need more samples than dimensions (n={n}, d={d})")]
    TooFewSamples { n: usize, d: usize },
}

/// Independent log-space Gaussian sampling design with diagonal covariance.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianDesign {
    mu: Vec<f64>,
    sigma_diag: Vec<f64>,
}

impl GaussianDesign {
    /// Means and per-component standard deviations; every deviation must be
    /// strictly positive so the design covariance is invertible.
    pub fn new(mu: Vec<f64>, sigma_diag: Vec<f64>) -> Result<Self, StatError> {
        if mu.len() != sigma_diag.len() {
            return Err(StatError::Domain(format!(
                "design mean and sd lengths differ ({} vs {})",
                mu.len(),
                sigma_diag.len()
            )));
        }
        if let Some(bad) = sigma_diag.iter().find(|s| s.is_nan() || **s <= 0.0) {
            return Err(StatError::Domain(format!(
                "design standard deviations must be strictly positive (got {bad})"
            )));
        }
        Ok(GaussianDesign { mu, sigma_diag })
    }

    pub fn dim(&self) -> usize {
        self.mu.len()
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    pub fn sigma_diag(&self) -> &[f64] {
        &self.sigma_diag
    }

    /// Restriction to a subset of components, in the given order.
    pub fn select(&self, indices: &[usize]) -> GaussianDesign {
        GaussianDesign {
            mu: indices.iter().map(|&i| self.mu[i]).collect(),
            sigma_diag: indices.iter().map(|&i| self.sigma_diag[i]).collect(),
        }
    }

    /// Componentwise affine rescale of the log coordinates (used to move
    /// between logarithm bases).
    pub fn scaled(&self, factor: f64) -> GaussianDesign {
        GaussianDesign {
            mu: self.mu.iter().map(|m| m * factor).collect(),
            sigma_diag: self.sigma_diag.iter().map(|s| s * factor).collect(),
        }
    }
}

/// Draw `n` independent rows from the design, each component
/// `mu_j + sigma_j * Z`. Row-major, components in design order, so the
/// draw sequence is fully determined by the stream.
pub fn sample_design(design: &GaussianDesign, n: usize, rng: &mut RngStream) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| {
            design
                .mu
                .iter()
                .zip(&design.sigma_diag)
                .map(|(&m, &s)| rng.next_normal(m, s))
                .collect()
        })
        .collect()
}
