//! Built-in physical truth models used as virtual experiments.
//!
//! Each model carries its dimension matrix, the dimensions of its response,
//! log-space nominal values, and a default sampling design. An
//! [`ExperimentSetup`] partitions the variables into exposed (varied by the
//! experiment), lurking (present in the physics but withheld from the
//! analysis), and pinned (known but deliberately fixed); lurking and pinned
//! variables are held at their nominal values for every evaluation.

mod pipe;
mod two_fluid;

use thiserror::Error;

pub use pipe::{colebrook_f, pipe_qoi, poiseuille_f};
pub use two_fluid::two_fluid_qoi;

use crate::dimensions::{DimBasis, DimMatrix, DimVector};
use crate::statkit::{GaussianDesign, RngStream, StatError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("{what} failed to converge after {iterations} iterations")]
    NoConvergence {
        what: &'static str,
        iterations: usize,
    },
    #[error("outer layer too thick: h = {h} must be below H/2 = {half_gap}")]
    Geometry { h: f64, half_gap: f64 },
    #[error("{0}")]
    NonPositiveInput(String),
    #[error("unknown model `{0}` (known: {})", ModelSpec::names().join(", "))]
    UnknownModel(String),
    #[error(transparent)]
    Stat(#[from] StatError),
    #[error("setup is not an exact partition: {0}")]
    BadPartition(String),
    #[error("expected {expected} exposed inputs, got {got}")]
    InputLength { expected: usize, got: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ModelKind {
    Pipe,
    TwoFluid,
}

/// A named ground-truth model: variables, dimensions, nominal operating
/// point, and default sampling design (all log-space values in `log_base`).
#[derive(Debug, Clone)]
pub struct ModelSpec {
    name: &'static str,
    kind: ModelKind,
    d: DimMatrix,
    dq: DimVector,
    nominal_log: Vec<f64>,
    default_design: GaussianDesign,
    log_base: f64,
}

impl ModelSpec {
    /// Rough pipe flow over (M, L, T): density, bulk velocity, diameter,
    /// viscosity, roughness, responding with the pressure gradient dP/L.
    /// The sampling design is in base-10 logs and concentrates on turbulent
    /// conditions; nominal values sit at the design means.
    pub fn pipe() -> ModelSpec {
        let basis = DimBasis::mlt();
        let d = DimMatrix::from_ints(
            &["rho_F", "U_F", "d_P", "mu_F", "eps_P"],
            &[
                &[1, -3, 0],
                &[0, 1, -1],
                &[0, 1, 0],
                &[1, -1, -1],
                &[0, 1, 0],
            ],
            basis.clone(),
        )
        .expect("static pipe matrix");
        let dq = DimVector::from_ints(&[1, -2, -2], basis).expect("static pipe qoi");
        let mu = vec![0.1682, 5.7565, 0.3965, -11.3102, -2.0999];
        let sigma = vec![0.0561, 0.3838, 0.0448, 0.0676, 0.0676];
        ModelSpec {
            name: "pipe",
            kind: ModelKind::Pipe,
            d,
            dq,
            nominal_log: mu.clone(),
            default_design: GaussianDesign::new(mu, sigma).expect("static pipe design"),
            log_base: 10.0,
        }
    }

    /// Two-fluid channel flow over (M, L, T): pressure gradient, outer layer
    /// thickness, gap height, outer and inner viscosities, outer and inner
    /// densities, responding with the flow rate per unit depth. Natural-log
    /// design; the viscosity ratio at the nominal point is about 32.
    pub fn two_fluid() -> ModelSpec {
        let basis = DimBasis::mlt();
        let d = DimMatrix::from_ints(
            &["gradP", "h", "H", "mu_o", "mu_i", "rho_o", "rho_i"],
            &[
                &[1, -2, -2],
                &[0, 1, 0],
                &[0, 1, 0],
                &[1, -1, -1],
                &[1, -1, -1],
                &[1, -3, 0],
                &[1, -3, 0],
            ],
            basis.clone(),
        )
        .expect("static two-fluid matrix");
        let dq = DimVector::from_ints(&[0, 2, -1], basis).expect("static two-fluid qoi");
        let mu = vec![1.0397, -1.7533, 0.3466, 0.3466, 3.8005, 0.3466, 1.4979];
        let sigma = vec![0.3466, 0.1831, 0.1155, 0.1155, 0.0372, 0.1155, 0.0372];
        ModelSpec {
            name: "two_fluid",
            kind: ModelKind::TwoFluid,
            d,
            dq,
            nominal_log: mu.clone(),
            default_design: GaussianDesign::new(mu, sigma).expect("static two-fluid design"),
            log_base: std::f64::consts::E,
        }
    }

    pub fn by_name(name: &str) -> Result<ModelSpec, ModelError> {
        match name {
            "pipe" => Ok(ModelSpec::pipe()),
            "two_fluid" => Ok(ModelSpec::two_fluid()),
            other => Err(ModelError::UnknownModel(other.to_string())),
        }
    }

    pub fn names() -> Vec<&'static str> {
        vec!["pipe", "two_fluid"]
    }

    pub fn name(&self) -> &'static str {
        self.name
    }

    pub fn dim_matrix(&self) -> &DimMatrix {
        &self.d
    }

    pub fn qoi_dims(&self) -> &DimVector {
        &self.dq
    }

    pub fn variable_names(&self) -> &[String] {
        self.d.variable_names()
    }

    pub fn num_vars(&self) -> usize {
        self.d.num_vars()
    }

    pub fn nominal_log(&self) -> &[f64] {
        &self.nominal_log
    }

    pub fn default_design(&self) -> &GaussianDesign {
        &self.default_design
    }

    pub fn log_base(&self) -> f64 {
        self.log_base
    }

    /// The deterministic response at a physical (not log) input vector given
    /// in variable order.
    pub fn qoi(&self, z: &[f64]) -> Result<f64, ModelError> {
        if z.len() != self.num_vars() {
            return Err(ModelError::InputLength {
                expected: self.num_vars(),
                got: z.len(),
            });
        }
        match self.kind {
            ModelKind::Pipe => pipe_qoi(z[0], z[1], z[2], z[3], z[4]),
            ModelKind::TwoFluid => two_fluid_qoi(z[0], z[1], z[2], z[3], z[4], z[5], z[6]),
        }
    }
}

/// Partition of a model's variables plus the observation noise level.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSetup {
    exposed: Vec<usize>,
    lurking: Vec<usize>,
    pinned: Vec<usize>,
    tau: f64,
    design_override: Option<GaussianDesign>,
}

impl ExperimentSetup {
    /// Explicit index partition; must cover every variable exactly once and
    /// expose at least one.
    pub fn new(
        model: &ModelSpec,
        exposed: Vec<usize>,
        lurking: Vec<usize>,
        pinned: Vec<usize>,
        tau: f64,
    ) -> Result<Self, ModelError> {
        let p = model.num_vars();
        let mut seen = vec![false; p];
        for &idx in exposed.iter().chain(&lurking).chain(&pinned) {
            if idx >= p {
                return Err(ModelError::BadPartition(format!(
                    "index {idx} out of range for {p} variables"
                )));
            }
            if seen[idx] {
                return Err(ModelError::BadPartition(format!(
                    "variable `{}` assigned twice",
                    model.variable_names()[idx]
                )));
            }
            seen[idx] = true;
        }
        if let Some(unassigned) = seen.iter().position(|s| !s) {
            return Err(ModelError::BadPartition(format!(
                "variable `{}` unassigned",
                model.variable_names()[unassigned]
            )));
        }
        if exposed.is_empty() {
            return Err(ModelError::BadPartition("no exposed variables".into()));
        }
        if tau.is_nan() || tau < 0.0 {
            return Err(ModelError::BadPartition(format!(
                "noise level must be nonnegative (got {tau})"
            )));
        }
        Ok(ExperimentSetup {
            exposed,
            lurking,
            pinned,
            tau,
            design_override: None,
        })
    }

    /// Partition by withheld names: everything not named lurking or pinned
    /// is exposed, in model order.
    pub fn with_held(
        model: &ModelSpec,
        lurking_names: &[&str],
        pinned_names: &[&str],
        tau: f64,
    ) -> Result<Self, ModelError> {
        let to_idx = |names: &[&str]| -> Result<Vec<usize>, ModelError> {
            names
                .iter()
                .map(|n| {
                    model
                        .dim_matrix()
                        .index_of(n)
                        .map_err(|_| ModelError::BadPartition(format!("unknown variable `{n}`")))
                })
                .collect()
        };
        let lurking = to_idx(lurking_names)?;
        let pinned = to_idx(pinned_names)?;
        let exposed = (0..model.num_vars())
            .filter(|i| !lurking.contains(i) && !pinned.contains(i))
            .collect();
        ExperimentSetup::new(model, exposed, lurking, pinned, tau)
    }

    pub fn exposed(&self) -> &[usize] {
        &self.exposed
    }

    pub fn lurking(&self) -> &[usize] {
        &self.lurking
    }

    pub fn pinned(&self) -> &[usize] {
        &self.pinned
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn with_tau(mut self, tau: f64) -> Self {
        self.tau = tau;
        self
    }

    /// Replace the exposed-variable design (lengths must match the exposed
    /// set).
    pub fn with_design_override(mut self, design: GaussianDesign) -> Result<Self, ModelError> {
        if design.dim() != self.exposed.len() {
            return Err(ModelError::BadPartition(format!(
                "design override covers {} variables, exposed set has {}",
                design.dim(),
                self.exposed.len()
            )));
        }
        self.design_override = Some(design);
        Ok(self)
    }

    /// Sampling design over the exposed variables, in the model's log base.
    pub fn design_ex(&self, model: &ModelSpec) -> GaussianDesign {
        self.design_override
            .clone()
            .unwrap_or_else(|| model.default_design().select(&self.exposed))
    }

    /// Exposed columns of the dimension matrix.
    pub fn d_ex(&self, model: &ModelSpec) -> DimMatrix {
        model.dim_matrix().select(&self.exposed)
    }

    /// Lurking columns of the dimension matrix.
    pub fn d_lu(&self, model: &ModelSpec) -> DimMatrix {
        model.dim_matrix().select(&self.lurking)
    }

    /// Pinned columns of the dimension matrix.
    pub fn d_pin(&self, model: &ModelSpec) -> DimMatrix {
        model.dim_matrix().select(&self.pinned)
    }

    /// Label used in sweep outputs: `null`, `lurk_<names>`, with
    /// `_pin_<names>` appended when variables are pinned.
    pub fn case_label(&self, model: &ModelSpec) -> String {
        let names = model.variable_names();
        let join = |idx: &[usize]| {
            idx.iter()
                .map(|&i| names[i].as_str())
                .collect::<Vec<_>>()
                .join("+")
        };
        let mut label = if self.lurking.is_empty() {
            "null".to_string()
        } else {
            format!("lurk_{}", join(&self.lurking))
        };
        if !self.pinned.is_empty() {
            label.push_str(&format!("_pin_{}", join(&self.pinned)));
        }
        label
    }
}

/// One virtual measurement: the exposed log-space inputs used and the noisy
/// dimensional response.
#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    pub x_ex: Vec<f64>,
    pub q_obs: f64,
}

/// Runs the virtual experiment at one design point.
///
/// The full physical input vector is assembled from `base^x` for exposed
/// variables and `base^nominal` for lurking and pinned ones, the model's
/// response is evaluated, and zero-mean Gaussian noise with standard
/// deviation `tau` is added (no draw is consumed when `tau` is zero).
pub fn evaluate(
    model: &ModelSpec,
    setup: &ExperimentSetup,
    x_ex: &[f64],
    rng: &mut RngStream,
) -> Result<Observation, ModelError> {
    if x_ex.len() != setup.exposed().len() {
        return Err(ModelError::InputLength {
            expected: setup.exposed().len(),
            got: x_ex.len(),
        });
    }
    let base = model.log_base();
    let mut z = vec![0.0; model.num_vars()];
    for (slot, &idx) in setup.exposed().iter().enumerate() {
        z[idx] = base.powf(x_ex[slot]);
    }
    for &idx in setup.lurking().iter().chain(setup.pinned()) {
        z[idx] = base.powf(model.nominal_log()[idx]);
    }
    let mut q = model.qoi(&z)?;
    if setup.tau() > 0.0 {
        q += setup.tau() * rng.next_standard_normal();
    }
    Ok(Observation {
        x_ex: x_ex.to_vec(),
        q_obs: q,
    })
}
