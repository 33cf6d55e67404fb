//! JSON scenario configuration.
//!
//! Operators are nested arrays of `[re, im]` pairs, row-major. A metric
//! descriptor selects one of the built-in constructions or an explicit
//! matrix. Joint measurements come from a named family or explicit effects.

use std::sync::Arc;

use anyhow::{bail, Context};
use qwidths::num_complex::Complex64 as C64;
use serde::Deserialize;

use qwidths::linalg::{CMatrix, HermitianOperator};
use qwidths::observables::{
    family_explicit, family_qubit_covariant, family_smeared, family_trivial,
    ProbabilityDistribution,
};
use qwidths::{FiniteMetricSpace, JointPovm, Pvm};

pub type OperatorData = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub dimension: usize,
    #[serde(default)]
    pub pvm_a: Option<PvmConfig>,
    #[serde(default)]
    pub pvm_b: Option<PvmConfig>,
    #[serde(default)]
    pub joint_povm: Option<JointPovmConfig>,
    #[serde(default)]
    pub epsilons: Option<Vec<[f64; 2]>>,
    #[serde(default)]
    pub checks: Option<Vec<String>>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub tolerance: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PvmConfig {
    pub elements: Vec<OperatorData>,
    pub metric: MetricConfig,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "type", content = "params", rename_all = "lowercase")]
#[serde(deny_unknown_fields)]
pub enum MetricConfig {
    Discrete { n: usize },
    Cyclic { n: usize, scale: f64 },
    Hamming { n: usize },
    Explicit { labels: Vec<String>, matrix: Vec<Vec<f64>> },
}

#[derive(Debug, Deserialize)]
#[serde(tag = "family", content = "params", rename_all = "snake_case")]
#[serde(deny_unknown_fields)]
pub enum JointPovmConfig {
    /// `M_xy = A_x q_y` with `q` over the B outcomes (uniform by default).
    Trivial {
        #[serde(default)]
        weights: Option<Vec<f64>>,
    },
    /// `M_xy = A_x^{1/2} B_y A_x^{1/2}`.
    Smeared {},
    /// Covariant qubit family with `lambda^2 + mu^2 <= 1`.
    CovariantQubit { lambda: f64, mu: f64 },
    /// Explicit effects, A index outermost.
    Explicit { elements: Vec<OperatorData> },
}

pub fn load(path: &std::path::Path) -> anyhow::Result<Config> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read config {}", path.display()))?;
    let cfg: Config = serde_json::from_str(&text)
        .with_context(|| format!("cannot parse config {}", path.display()))?;
    Ok(cfg)
}

pub fn build_metric(metric: &MetricConfig) -> anyhow::Result<Arc<FiniteMetricSpace>> {
    let space = match metric {
        MetricConfig::Discrete { n } => FiniteMetricSpace::discrete(*n),
        MetricConfig::Cyclic { n, scale } => FiniteMetricSpace::cyclic(*n, *scale),
        MetricConfig::Hamming { n } => FiniteMetricSpace::hamming_rescaled(*n),
        MetricConfig::Explicit { labels, matrix } => {
            FiniteMetricSpace::explicit(labels.clone(), matrix.clone())?
        }
    };
    Ok(Arc::new(space))
}

fn build_operator(data: &OperatorData, dim: usize) -> anyhow::Result<HermitianOperator> {
    if data.len() != dim || data.iter().any(|row| row.len() != dim) {
        bail!("operator must be a {dim}x{dim} array of [re, im] pairs");
    }
    let m = CMatrix::from_fn(dim, dim, |i, j| C64::new(data[i][j][0], data[i][j][1]));
    Ok(HermitianOperator::new(m)?)
}

pub fn build_pvm(cfg: &PvmConfig, dim: usize) -> anyhow::Result<Pvm> {
    let space = build_metric(&cfg.metric)?;
    let elements: anyhow::Result<Vec<HermitianOperator>> = cfg
        .elements
        .iter()
        .map(|op| build_operator(op, dim))
        .collect();
    Ok(Pvm::from_parts(space, elements?)?)
}

/// Build the joint POVM; family constructions draw on the reference PVMs.
pub fn build_joint(
    cfg: &JointPovmConfig,
    dim: usize,
    a: Option<&Pvm>,
    b: Option<&Pvm>,
) -> anyhow::Result<JointPovm> {
    match cfg {
        JointPovmConfig::Trivial { weights } => {
            let a = a.context("trivial family needs pvm_a")?;
            let b = b.context("trivial family needs pvm_b (for its outcome space)")?;
            let n = b.space().len();
            let w = weights.clone().unwrap_or(vec![1.0 / n as f64; n]);
            let q = ProbabilityDistribution::new(b.space().clone(), w)?;
            Ok(family_trivial(a, &q)?)
        }
        JointPovmConfig::Smeared {} => {
            let a = a.context("smeared family needs pvm_a")?;
            let b = b.context("smeared family needs pvm_b")?;
            Ok(family_smeared(a, b)?)
        }
        JointPovmConfig::CovariantQubit { lambda, mu } => {
            if dim != 2 {
                bail!("covariant qubit family needs dimension 2");
            }
            Ok(family_qubit_covariant(*lambda, *mu)?)
        }
        JointPovmConfig::Explicit { elements } => {
            let a = a.context("explicit joint POVM needs pvm_a (for its outcome space)")?;
            let b = b.context("explicit joint POVM needs pvm_b (for its outcome space)")?;
            let ops: anyhow::Result<Vec<HermitianOperator>> = elements
                .iter()
                .map(|op| build_operator(op, dim))
                .collect();
            Ok(family_explicit(
                a.space().clone(),
                b.space().clone(),
                ops?,
            )?)
        }
    }
}

/// Parsed objects of a config, built on demand.
pub struct Scene {
    pub dim: usize,
    pub a: Option<Pvm>,
    pub b: Option<Pvm>,
    pub m: Option<JointPovm>,
    pub epsilons: Vec<(f64, f64)>,
    pub checks: Option<Vec<String>>,
    pub seed: Option<u64>,
    pub tolerance: Option<f64>,
}

pub fn default_eps_grid() -> Vec<(f64, f64)> {
    let levels = [0.0, 0.1, 0.25];
    levels
        .iter()
        .flat_map(|&e1| levels.iter().map(move |&e2| (e1, e2)))
        .collect()
}

pub fn build_scene(cfg: &Config) -> anyhow::Result<Scene> {
    let a = cfg
        .pvm_a
        .as_ref()
        .map(|p| build_pvm(p, cfg.dimension))
        .transpose()
        .context("pvm_a")?;
    let b = cfg
        .pvm_b
        .as_ref()
        .map(|p| build_pvm(p, cfg.dimension))
        .transpose()
        .context("pvm_b")?;
    let m = cfg
        .joint_povm
        .as_ref()
        .map(|j| build_joint(j, cfg.dimension, a.as_ref(), b.as_ref()))
        .transpose()
        .context("joint_povm")?;
    let epsilons = cfg
        .epsilons
        .as_ref()
        .map(|v| v.iter().map(|&[e1, e2]| (e1, e2)).collect())
        .unwrap_or_else(default_eps_grid);
    Ok(Scene {
        dim: cfg.dimension,
        a,
        b,
        m,
        epsilons,
        checks: cfg.checks.clone(),
        seed: cfg.seed,
        tolerance: cfg.tolerance,
    })
}
