//! Lurking-variable detection for physical experiments.
//!
//! A lurking variable affects a measured response but is absent from the
//! analysis; when it is held fixed, no residual plot will ever expose it.
//! Dimensional analysis supplies the structure that makes a formal check
//! possible: if the response cannot be non-dimensionalized by the exposed
//! variables, something is missing (an analytic certificate), and even when
//! it can, the mean of suitably weighted score vectors must vanish unless a
//! dimensional lurking variable is present (a statistical test).
//!
//! The crate is organized as:
//!
//! - [`dimensions`]: exact rational dimension-matrix algebra (ranks,
//!   nullspaces, non-dimensionalizing vectors, pinned complements);
//! - [`statkit`]: seeded RNG streams, Gaussian designs, F distributions,
//!   Hotelling's T-squared, Wilson intervals;
//! - [`detect`]: score construction, the standard and pinned hypothesis
//!   tests, dimension-vector diagnostics, and the power predictor;
//! - [`models`]: built-in truth models (rough pipe flow, two-fluid channel
//!   flow) used as virtual experiments;
//! - [`harness`]: replicated Monte Carlo sweeps over sample size and noise
//!   with CSV emission.

pub mod detect;
pub mod dimensions;
pub mod harness;
pub mod models;
pub mod statkit;
