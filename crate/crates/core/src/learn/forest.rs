use ndarray::ArrayView2;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::tree::{grow, sqrt_features, FeatureSampling, GrowParams, Tree};
use crate::error::{Error, Result};
use crate::rng;

fn default_trees() -> usize {
    100
}

fn default_true() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForestConfig {
    #[serde(default = "default_trees")]
    pub trees: usize,
    /// Features tried per node; `floor(sqrt(p))` when absent.
    #[serde(default)]
    pub max_features: Option<usize>,
    #[serde(default = "default_true")]
    pub bootstrap: bool,
    #[serde(default)]
    pub feature_sampling: FeatureSampling,
}

impl Default for ForestConfig {
    fn default() -> Self {
        ForestConfig {
            trees: default_trees(),
            max_features: None,
            bootstrap: true,
            feature_sampling: FeatureSampling::PerNode,
        }
    }
}

/// Bagged fully grown classification trees.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ForestModel {
    pub num_features: usize,
    pub max_features: usize,
    pub feature_sampling: FeatureSampling,
    pub trees: Vec<Tree>,
    /// Fixed candidate features of each tree under per-tree sampling; empty
    /// lists under per-node sampling.
    pub tree_features: Vec<Vec<usize>>,
}

impl ForestModel {
    /// Mean of the trees' class-1 probabilities.
    pub fn predict_proba(&self, x: &[f64]) -> f64 {
        self.trees.iter().map(|t| t.predict(x)).sum::<f64>() / self.trees.len() as f64
    }
}

/// Multiplicity of each row in a bootstrap resample of size `m`.
pub fn bootstrap_weights<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Vec<f64> {
    let mut w = vec![0.0; m];
    for _ in 0..m {
        w[rng.random_range(0..m)] += 1.0;
    }
    w
}

pub(crate) fn resolve_max_features(requested: Option<usize>, p: usize) -> Result<usize> {
    let k = requested.unwrap_or_else(|| sqrt_features(p));
    if k == 0 || k > p {
        return Err(Error::param(format!("max_features {k} outside 1..={p}")));
    }
    Ok(k)
}

pub(crate) fn sample_features<R: Rng + ?Sized>(p: usize, k: usize, rng: &mut R) -> Vec<usize> {
    let mut f = rand::seq::index::sample(rng, p, k).into_vec();
    f.sort_unstable();
    f
}

/// Trains a forest. Tree `i` draws from stream `(seed, i)`.
pub fn train_forest(x: ArrayView2<f64>, y: &[bool], cfg: &ForestConfig, seed: u64) -> Result<ForestModel> {
    Ok(train_forest_with_oob(x, y, cfg, seed)?.0)
}

/// As [`train_forest`], also returning each tree's out-of-bag row indices.
pub fn train_forest_with_oob(
    x: ArrayView2<f64>,
    y: &[bool],
    cfg: &ForestConfig,
    seed: u64,
) -> Result<(ForestModel, Vec<Vec<usize>>)> {
    if cfg.trees == 0 {
        return Err(Error::param("a forest needs at least one tree"));
    }
    let (m, p) = x.dim();
    if y.len() != m {
        return Err(Error::SizeMismatch { expected: m, actual: y.len() });
    }
    if m == 0 {
        return Err(Error::EmptyData("no training rows".into()));
    }
    let max_features = resolve_max_features(cfg.max_features, p)?;
    let target: Vec<f64> = y.iter().map(|&b| f64::from(u8::from(b))).collect();
    let mut trees = Vec::with_capacity(cfg.trees);
    let mut tree_features = Vec::with_capacity(cfg.trees);
    let mut oob = Vec::with_capacity(cfg.trees);
    for t in 0..cfg.trees {
        let mut s = rng::stream(seed, t as u64);
        let weight = if cfg.bootstrap { bootstrap_weights(m, &mut s) } else { vec![1.0; m] };
        let fixed = match cfg.feature_sampling {
            FeatureSampling::PerNode => Vec::new(),
            FeatureSampling::PerTree => sample_features(p, max_features, &mut s),
        };
        let params = GrowParams {
            max_features,
            max_depth: None,
            candidates: (!fixed.is_empty()).then_some(fixed.as_slice()),
        };
        trees.push(grow(x, &target, None, &weight, &params, &mut s)?);
        oob.push((0..m).filter(|&i| weight[i] == 0.0).collect());
        tree_features.push(fixed);
    }
    Ok((
        ForestModel {
            num_features: p,
            max_features,
            feature_sampling: cfg.feature_sampling,
            trees,
            tree_features,
        },
        oob,
    ))
}
