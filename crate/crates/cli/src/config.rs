//! Pipeline configuration. Every command reads its section from an optional TOML file;
//! command-line flags override individual values afterwards.

use std::f64::consts::FRAC_PI_2;
use std::path::Path;

use anyhow::{bail, Context, Result};
use confluent_core::graph::TangentMode;
use confluent_core::metrics::{BranchProbe, MatchTolerance, DEFAULT_STEP};
use confluent_core::synth::{SamplerConfig, TreeGenConfig};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub corpus: CorpusConfig,
    pub generator: TreeGenConfig,
    pub sampler: SamplerConfig,
    pub graph: GraphConfig,
    pub evaluation: EvalConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CorpusConfig {
    pub trees: usize,
    /// Base seed; per-tree generator and sampler seeds are derived from it.
    pub seed: u64,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        Self { trees: 15, seed: 0 }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum GraphMode {
    #[default]
    Confluent,
    Geodesic,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Flavor {
    #[default]
    Isotropic,
    Anisotropic,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Tangents {
    Oriented,
    #[default]
    Unoriented,
}

impl From<Tangents> for TangentMode {
    fn from(t: Tangents) -> Self {
        match t {
            Tangents::Oriented => TangentMode::Oriented,
            Tangents::Unoriented => TangentMode::Unoriented,
        }
    }
}

/// Root of a reconstruction: a sample index or the sample nearest to a location.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RootSelector {
    Index(usize),
    Nearest([f64; 3]),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GraphConfig {
    pub mode: GraphMode,
    pub flavor: Flavor,
    /// Neighbours per node (the candidate count for the anisotropic flavour).
    pub k: usize,
    /// Neighbours kept per node by the anisotropic flavour.
    pub k_final: usize,
    pub aspect_ratio_sq: f64,
    pub epsilon: f64,
    pub elastic_lambda: f64,
    /// Tangent handling of the geodesic baseline.
    pub tangents: Tangents,
    /// `None` uses the corpus root location, or fails for single files.
    pub root: Option<RootSelector>,
}

impl Default for GraphConfig {
    fn default() -> Self {
        Self {
            mode: GraphMode::Confluent,
            flavor: Flavor::Isotropic,
            k: 500,
            k_final: 4,
            aspect_ratio_sq: 10.0,
            epsilon: FRAC_PI_2,
            elastic_lambda: 0.0,
            tangents: Tangents::Unoriented,
            root: None,
        }
    }
}

impl GraphConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon <= std::f64::consts::PI) {
            bail!("epsilon must lie in (0, π], got {}", self.epsilon);
        }
        if !(self.elastic_lambda >= 0.0) {
            bail!("elastic_lambda must be non-negative, got {}", self.elastic_lambda);
        }
        if self.k == 0 || self.k_final == 0 {
            bail!("neighbour counts must be positive");
        }
        if self.flavor == Flavor::Anisotropic && !(self.aspect_ratio_sq > 0.0) {
            bail!("aspect_ratio_sq must be positive, got {}", self.aspect_ratio_sq);
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalConfig {
    pub zeta: f64,
    pub uses_radius: bool,
    pub step: f64,
    pub probe_start: f64,
    pub probe_end: f64,
    /// Tolerances swept for the ROC tables.
    pub sweep: Vec<f64>,
}

impl Default for EvalConfig {
    fn default() -> Self {
        let tol = MatchTolerance::default();
        let probe = BranchProbe::default();
        Self {
            zeta: tol.zeta,
            uses_radius: tol.uses_radius,
            step: DEFAULT_STEP,
            probe_start: probe.start,
            probe_end: probe.end,
            sweep: vec![0.25, 0.5, tol.zeta, 1.0, 1.5, 2.0, 3.0],
        }
    }
}

impl EvalConfig {
    pub fn tolerance(&self, zeta: f64) -> MatchTolerance {
        MatchTolerance { zeta, uses_radius: self.uses_radius }
    }

    pub fn probe(&self) -> BranchProbe {
        BranchProbe { start: self.probe_start, end: self.probe_end }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.zeta > 0.0) || self.sweep.iter().any(|z| !(*z > 0.0)) {
            bail!("match tolerances must be positive");
        }
        if !(self.step > 0.0) {
            bail!("resampling step must be positive, got {}", self.step);
        }
        if !(self.probe_start >= 0.0 && self.probe_end > self.probe_start) {
            bail!("branch probe needs 0 <= start < end, got [{}, {}]", self.probe_start, self.probe_end);
        }
        Ok(())
    }
}

impl PipelineConfig {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }
}
