//! JSON run configuration (`schema: 1`) and its resolution into library
//! types.
//!
//! A config either names a built-in model (which supplies variables,
//! dimensions, qoi, design, and log base, each overridable) or declares
//! everything explicitly. Exponents may be written as integers or as
//! `"num/den"` strings.

use anyhow::{anyhow, bail, Context, Result};
use serde::Deserialize;

use lurkvar::dimensions::{DimBasis, DimMatrix, DimVector, Rational};
use lurkvar::models::{ExperimentSetup, ModelSpec};
use lurkvar::statkit::GaussianDesign;

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum RationalSpec {
    Int(i64),
    Text(String),
}

impl RationalSpec {
    pub fn to_rational(&self) -> Result<Rational> {
        match self {
            RationalSpec::Int(n) => Ok(Rational::from_int(*n)),
            RationalSpec::Text(s) => s
                .parse::<Rational>()
                .map_err(|e| anyhow!("bad exponent `{s}`: {e}")),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
pub struct VarDecl {
    pub name: String,
    pub dims: Vec<RationalSpec>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct DesignConfig {
    pub mu: Vec<f64>,
    pub sigma: Vec<f64>,
    pub log_base: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema: u32,
    #[serde(default)]
    pub model: Option<String>,
    #[serde(default)]
    pub dimensions: Option<Vec<String>>,
    #[serde(default)]
    pub variables: Option<Vec<VarDecl>>,
    #[serde(default)]
    pub qoi: Option<Vec<RationalSpec>>,
    #[serde(default)]
    pub exposed: Option<Vec<String>>,
    #[serde(default)]
    pub lurking: Option<Vec<String>>,
    #[serde(default)]
    pub pinned: Option<Vec<String>>,
    #[serde(default)]
    pub design: Option<DesignConfig>,
    #[serde(default)]
    pub w_ex: Option<Vec<RationalSpec>>,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default)]
    pub tau: f64,
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default)]
    pub n_grid: Option<Vec<usize>>,
    #[serde(default)]
    pub tau_grid: Option<Vec<f64>>,
    #[serde(default = "default_replications")]
    pub replications: usize,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub parallelism: usize,
    #[serde(default = "default_qoi_column")]
    pub qoi_column: String,
}

fn default_alpha() -> f64 {
    0.05
}

fn default_replications() -> usize {
    200
}

fn default_qoi_column() -> String {
    "qoi".into()
}

impl RunConfig {
    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let cfg: RunConfig = serde_json::from_str(&text)
            .with_context(|| format!("parsing config {}", path.display()))?;
        if cfg.schema != 1 {
            bail!("unsupported config schema {} (expected 1)", cfg.schema);
        }
        Ok(cfg)
    }
}

/// A config resolved against the model registry: the full dimension system
/// plus the variable partition, ready for any command.
pub struct Resolved {
    pub model: Option<ModelSpec>,
    pub matrix: DimMatrix,
    pub qoi_dims: DimVector,
    pub exposed: Vec<usize>,
    pub lurking: Vec<usize>,
    pub pinned: Vec<usize>,
    /// Design over the exposed variables, in `log_base` coordinates.
    pub design: Option<GaussianDesign>,
    pub log_base: f64,
    pub alpha: f64,
    pub w_ex: Option<Vec<Rational>>,
}

impl Resolved {
    pub fn d_ex(&self) -> DimMatrix {
        self.matrix.select(&self.exposed)
    }

    pub fn d_pin(&self) -> DimMatrix {
        self.matrix.select(&self.pinned)
    }

    pub fn exposed_names(&self) -> Vec<String> {
        self.exposed
            .iter()
            .map(|&i| self.matrix.variable_names()[i].clone())
            .collect()
    }

    pub fn design(&self) -> Result<&GaussianDesign> {
        self.design
            .as_ref()
            .ok_or_else(|| anyhow!("this command needs a sampling design (mu, sigma, log_base)"))
    }

    /// Experiment setup for a named model (errors for declaration-only
    /// configs).
    pub fn setup(&self, tau: f64) -> Result<ExperimentSetup> {
        let model = self
            .model
            .as_ref()
            .ok_or_else(|| anyhow!("this command needs a built-in model (`model` field)"))?;
        let mut setup = ExperimentSetup::new(
            model,
            self.exposed.clone(),
            self.lurking.clone(),
            self.pinned.clone(),
            tau,
        )?;
        if let Some(design) = &self.design {
            if design != &model.default_design().select(&self.exposed) {
                setup = setup.with_design_override(design.clone())?;
            }
        }
        Ok(setup)
    }
}

pub fn resolve(cfg: &RunConfig) -> Result<Resolved> {
    let model = cfg.model.as_deref().map(ModelSpec::by_name).transpose()?;

    // Dimension system: explicit declarations win over the model's.
    let (matrix, qoi_dims) = if let Some(decls) = &cfg.variables {
        let basis = DimBasis::new(
            cfg.dimensions
                .clone()
                .unwrap_or_else(|| vec!["M".into(), "L".into(), "T".into()]),
        );
        let mut names = Vec::new();
        let mut cols = Vec::new();
        for decl in decls {
            let exps = decl
                .dims
                .iter()
                .map(RationalSpec::to_rational)
                .collect::<Result<Vec<_>>>()
                .with_context(|| format!("variable `{}`", decl.name))?;
            names.push(decl.name.clone());
            cols.push(DimVector::new(exps, basis.clone())?);
        }
        let matrix = DimMatrix::new(names, cols, basis.clone())?;
        let qoi = cfg
            .qoi
            .as_ref()
            .ok_or_else(|| anyhow!("declared variables need a `qoi` dimension vector"))?;
        let qoi_dims = DimVector::new(
            qoi.iter()
                .map(RationalSpec::to_rational)
                .collect::<Result<Vec<_>>>()?,
            basis,
        )?;
        (matrix, qoi_dims)
    } else if let Some(model) = &model {
        if cfg.dimensions.is_some() {
            bail!("`dimensions` requires explicit `variables`");
        }
        let qoi_dims = match &cfg.qoi {
            Some(q) => DimVector::new(
                q.iter()
                    .map(RationalSpec::to_rational)
                    .collect::<Result<Vec<_>>>()?,
                model.dim_matrix().basis().clone(),
            )?,
            None => model.qoi_dims().clone(),
        };
        (model.dim_matrix().clone(), qoi_dims)
    } else {
        bail!("config needs either `model` or `variables` + `qoi`");
    };

    // Partition. Default: everything not lurking/pinned is exposed.
    let to_indices = |names: &Option<Vec<String>>| -> Result<Vec<usize>> {
        names
            .clone()
            .unwrap_or_default()
            .iter()
            .map(|n| Ok(matrix.index_of(n)?))
            .collect()
    };
    let lurking = to_indices(&cfg.lurking)?;
    let pinned = to_indices(&cfg.pinned)?;
    let exposed = match &cfg.exposed {
        Some(names) => names
            .iter()
            .map(|n| Ok(matrix.index_of(n)?))
            .collect::<Result<Vec<usize>>>()?,
        None => (0..matrix.num_vars())
            .filter(|i| !lurking.contains(i) && !pinned.contains(i))
            .collect(),
    };
    // The partition must be exact: no duplicates, nothing unassigned.
    let mut seen = vec![false; matrix.num_vars()];
    for &i in exposed.iter().chain(&lurking).chain(&pinned) {
        if seen[i] {
            bail!(
                "variable `{}` assigned to more than one group",
                matrix.variable_names()[i]
            );
        }
        seen[i] = true;
    }
    if let Some(missing) = seen.iter().position(|s| !s) {
        bail!(
            "variable `{}` not assigned to exposed/lurking/pinned",
            matrix.variable_names()[missing]
        );
    }

    // Design over exposed variables.
    let (design, log_base) = match &cfg.design {
        Some(d) => {
            if d.mu.len() != exposed.len() || d.sigma.len() != exposed.len() {
                bail!(
                    "design must cover the {} exposed variables (got mu: {}, sigma: {})",
                    exposed.len(),
                    d.mu.len(),
                    d.sigma.len()
                );
            }
            if d.log_base.is_nan() || d.log_base <= 0.0 || d.log_base == 1.0 {
                bail!("log_base must be positive and not 1");
            }
            (
                Some(GaussianDesign::new(d.mu.clone(), d.sigma.clone())?),
                d.log_base,
            )
        }
        None => match &model {
            Some(m) => (Some(m.default_design().select(&exposed)), m.log_base()),
            None => (None, std::f64::consts::E),
        },
    };

    if !(0.0 < cfg.alpha && cfg.alpha < 1.0) {
        bail!("alpha must lie in (0, 1), got {}", cfg.alpha);
    }
    if cfg.tau.is_nan() || cfg.tau < 0.0 {
        bail!("tau must be nonnegative, got {}", cfg.tau);
    }

    let w_ex = cfg
        .w_ex
        .as_ref()
        .map(|w| {
            w.iter()
                .map(RationalSpec::to_rational)
                .collect::<Result<Vec<_>>>()
        })
        .transpose()?;

    Ok(Resolved {
        model,
        matrix,
        qoi_dims,
        exposed,
        lurking,
        pinned,
        design,
        log_base,
        alpha: cfg.alpha,
        w_ex,
    })
}
