//! JSON experiment configuration.

use std::path::{Path, PathBuf};

use gsdca::datagen::{Family, SynthSpec};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "GSDCA_OUT_DIR";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub problem: ProblemSource,
    #[serde(default)]
    pub loss: LossChoice,
    pub penalty: PenaltyChoice,
    pub lambda: LambdaChoice,
    /// λ̃ of the split; ignored in direct mode.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_tilde: Option<f64>,
    #[serde(default)]
    pub mode: ModeChoice,
    /// Numeric λ and λ̃ are given for the sum-scaled objective `Σf_i + λg`
    /// and are divided by `n` for the mean-scaled objective used here.
    #[serde(default)]
    pub sum_scaled: bool,
    /// Loss correction γ_ς; defaults to the generator's corruption variance.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub correction: Option<f64>,
    /// Radius ρ of the constraint `R(w) ≤ ρ`; absent means unconstrained.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    pub solvers: Vec<SolverSpec>,
    pub epochs: usize,
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub reference: ReferencePolicy,
    /// Record A, B, C for SDCA runs.
    #[serde(default)]
    pub potentials: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ProblemSource {
    Synthetic(SynthConfig),
    File {
        path: PathBuf,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        dim: Option<usize>,
        #[serde(default)]
        normalize: bool,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthConfig {
    pub family: FamilyConfig,
    pub n: usize,
    pub p: usize,
    #[serde(default)]
    pub s: usize,
    #[serde(default)]
    pub b: f64,
    #[serde(default = "default_sigma")]
    pub sigma: f64,
    pub seed: u64,
    /// Column-normalize the generated design.
    #[serde(default)]
    pub normalize: bool,
}

fn default_sigma() -> f64 {
    1.0
}

impl SynthConfig {
    pub fn to_spec(&self) -> SynthSpec {
        SynthSpec {
            family: self.family.to_family(),
            n: self.n,
            p: self.p,
            s: self.s,
            b: self.b,
            sigma: self.sigma,
            seed: self.seed,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FamilyConfig {
    Lasso,
    Group {
        group_size: usize,
        active_groups: usize,
    },
    Corrected {
        gamma: f64,
    },
    Scad,
}

impl FamilyConfig {
    pub fn to_family(self) -> Family {
        match self {
            FamilyConfig::Lasso => Family::Lasso,
            FamilyConfig::Group {
                group_size,
                active_groups,
            } => Family::Group {
                group_size,
                active_groups,
            },
            FamilyConfig::Corrected { gamma } => Family::Corrected { gamma },
            FamilyConfig::Scad => Family::Scad,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossChoice {
    #[default]
    Squared,
    Logistic,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PenaltyChoice {
    L1,
    /// Contiguous groups of `group_size` features.
    Group {
        group_size: usize,
    },
    Scad {
        zeta: f64,
    },
    /// `½||w||² + ||w||₁`
    ElasticL1,
    ElasticGroup {
        group_size: usize,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LambdaChoice {
    Value(f64),
    /// `"auto"`: the noise-level bound for the penalty family.
    Rule(LambdaRule),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LambdaRule {
    Auto,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeChoice {
    #[default]
    Split,
    Direct,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverName {
    Sdca,
    ProxGd,
    ProxSgd,
    Rda,
    ProxSvrg,
    Saga,
    ProxSag,
}

impl SolverName {
    pub fn as_str(self) -> &'static str {
        match self {
            SolverName::Sdca => "sdca",
            SolverName::ProxGd => "prox-gd",
            SolverName::ProxSgd => "prox-sgd",
            SolverName::Rda => "rda",
            SolverName::ProxSvrg => "prox-svrg",
            SolverName::Saga => "saga",
            SolverName::ProxSag => "prox-sag",
        }
    }

    /// Solvers run with a constant rate and tuned on the `2/2^k` grid.
    pub fn has_constant_rate(self) -> bool {
        !matches!(self, SolverName::ProxSgd | SolverName::Rda)
    }
}

impl std::str::FromStr for SolverName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_value(serde_json::Value::String(s.to_owned()))
            .map_err(|_| Error::Config(format!("unknown solver `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StepChoice {
    Value(f64),
    Rule(StepRule),
}

impl Default for StepChoice {
    fn default() -> Self {
        StepChoice::Rule(StepRule::Theory)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepRule {
    /// The solver's textbook step (for SDCA, the largest step with a guarantee).
    Theory,
    /// Grid search on the first seed.
    Tune,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSpec {
    pub kind: SolverName,
    #[serde(default)]
    pub step: StepChoice,
    /// SVRG inner loop length (default `2n`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inner_len: Option<usize>,
}

impl SolverSpec {
    pub fn new(kind: SolverName, step: StepChoice) -> Self {
        Self {
            kind,
            step,
            inner_len: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReferencePolicy {
    #[serde(default = "yes")]
    pub enabled: bool,
    #[serde(default = "default_ref_tol")]
    pub tol: f64,
    #[serde(default = "default_ref_iter")]
    pub max_iter: usize,
    /// Abort when `tol` is not reached (otherwise the shortfall is recorded).
    #[serde(default)]
    pub strict: bool,
}

fn yes() -> bool {
    true
}

fn default_ref_tol() -> f64 {
    1e-12
}

fn default_ref_iter() -> usize {
    1_000_000
}

impl Default for ReferencePolicy {
    fn default() -> Self {
        Self {
            enabled: true,
            tol: default_ref_tol(),
            max_iter: default_ref_iter(),
            strict: false,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.solvers.is_empty() {
            return bad("at least one solver is required".into());
        }
        if self.seeds.is_empty() {
            return bad("at least one seed is required".into());
        }
        if self.epochs == 0 {
            return bad("epochs must be at least 1".into());
        }
        if let LambdaChoice::Value(l) = self.lambda {
            if !(l > 0.0) || !l.is_finite() {
                return bad(format!("lambda must be positive, got {l}"));
            }
        }
        if self.mode == ModeChoice::Split {
            match self.lambda_tilde {
                Some(l) if l > 0.0 && l.is_finite() => {}
                Some(l) => return bad(format!("lambda_tilde must be positive, got {l}")),
                None => return bad("split mode needs lambda_tilde".into()),
            }
        }
        for s in &self.solvers {
            if let StepChoice::Value(v) = s.step {
                if !(v > 0.0) || !v.is_finite() {
                    return bad(format!(
                        "{} step must be positive, got {v}",
                        s.kind.as_str()
                    ));
                }
            }
            if s.inner_len == Some(0) {
                return bad("inner_len must be at least 1".into());
            }
        }
        let mut kinds: Vec<_> = self.solvers.iter().map(|s| s.kind.as_str()).collect();
        kinds.sort_unstable();
        if kinds.windows(2).any(|w| w[0] == w[1]) {
            return bad("each solver may appear only once".into());
        }
        if let ProblemSource::Synthetic(s) = &self.problem {
            s.to_spec().validate()?;
        }
        Ok(())
    }

    /// `--out`, then the config, then the environment, then `./gsdca-out/<name>`.
    pub fn resolve_output_dir(&self, cli: Option<&Path>) -> PathBuf {
        if let Some(p) = cli {
            return p.to_path_buf();
        }
        if let Some(p) = &self.output_dir {
            return p.clone();
        }
        match std::env::var_os(OUT_DIR_ENV) {
            Some(dir) if !dir.is_empty() => PathBuf::from(dir).join(&self.name),
            _ => PathBuf::from("gsdca-out").join(&self.name),
        }
    }

    /// Replaces the solver seed list with a single seed.
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seeds = vec![seed];
        self
    }
}

/// Reads a config, or the resolved config embedded in a run manifest.
pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::File {
        path: path.to_path_buf(),
        source,
    })?;
    let value: serde_json::Value = serde_json::from_str(&text)?;
    let cfg_value = match value.get("resolved_config") {
        Some(inner) => inner.clone(),
        None => value,
    };
    let cfg: ExperimentConfig = serde_json::from_value(cfg_value)?;
    cfg.validate()?;
    Ok(cfg)
}
