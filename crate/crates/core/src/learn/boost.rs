use ndarray::ArrayView2;
use serde::{Deserialize, Serialize};

use super::forest::{resolve_max_features, sample_features};
use super::tree::{grow, FeatureSampling, GrowParams, Tree};
use crate::error::{Error, Result};
use crate::rng;

const LOGIT_CLIP: f64 = 1e-6;

fn default_stages() -> usize {
    100
}

fn default_lr() -> f64 {
    0.4
}

fn default_depth() -> usize {
    3
}

fn default_sampling() -> FeatureSampling {
    FeatureSampling::PerTree
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoostConfig {
    #[serde(default = "default_stages")]
    pub stages: usize,
    #[serde(default = "default_lr")]
    pub learning_rate: f64,
    #[serde(default = "default_depth")]
    pub max_depth: usize,
    #[serde(default)]
    pub max_features: Option<usize>,
    #[serde(default = "default_sampling")]
    pub feature_sampling: FeatureSampling,
}

impl Default for BoostConfig {
    fn default() -> Self {
        BoostConfig {
            stages: default_stages(),
            learning_rate: default_lr(),
            max_depth: default_depth(),
            max_features: None,
            feature_sampling: default_sampling(),
        }
    }
}

/// Logistic-loss gradient boosting with Newton-step leaves.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoostModel {
    pub num_features: usize,
    pub init: f64,
    pub learning_rate: f64,
    pub trees: Vec<Tree>,
    pub tree_features: Vec<Vec<usize>>,
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

impl BoostModel {
    pub fn decision(&self, x: &[f64]) -> f64 {
        self.init + self.learning_rate * self.trees.iter().map(|t| t.predict(x)).sum::<f64>()
    }

    pub fn predict_proba(&self, x: &[f64]) -> f64 {
        sigmoid(self.decision(x))
    }
}

pub fn train_boost(x: ArrayView2<f64>, y: &[bool], cfg: &BoostConfig, seed: u64) -> Result<BoostModel> {
    Ok(train_boost_with_history(x, y, cfg, seed)?.0)
}

/// Mean training log-loss before boosting and after each stage.
pub fn train_boost_with_history(
    x: ArrayView2<f64>,
    y: &[bool],
    cfg: &BoostConfig,
    seed: u64,
) -> Result<(BoostModel, Vec<f64>)> {
    let (m, p) = x.dim();
    if y.len() != m {
        return Err(Error::SizeMismatch { expected: m, actual: y.len() });
    }
    if m == 0 {
        return Err(Error::EmptyData("no training rows".into()));
    }
    if !(cfg.learning_rate > 0.0) {
        return Err(Error::param("learning rate must be positive"));
    }
    let max_features = resolve_max_features(cfg.max_features, p)?;
    let labels: Vec<f64> = y.iter().map(|&b| f64::from(u8::from(b))).collect();
    let rate = (labels.iter().sum::<f64>() / m as f64).clamp(LOGIT_CLIP, 1.0 - LOGIT_CLIP);
    let init = (rate / (1.0 - rate)).ln();
    let mut f = vec![init; m];
    let weight = vec![1.0; m];
    let mut history = vec![log_loss(&f, &labels)];
    let mut trees = Vec::with_capacity(cfg.stages);
    let mut tree_features = Vec::with_capacity(cfg.stages);
    for stage in 0..cfg.stages {
        let mut s = rng::stream(seed, stage as u64);
        let prob: Vec<f64> = f.iter().map(|&z| sigmoid(z)).collect();
        let residual: Vec<f64> = labels.iter().zip(&prob).map(|(t, q)| t - q).collect();
        let hess: Vec<f64> = prob.iter().map(|q| q * (1.0 - q)).collect();
        let fixed = match cfg.feature_sampling {
            FeatureSampling::PerTree => sample_features(p, max_features, &mut s),
            FeatureSampling::PerNode => Vec::new(),
        };
        let params = GrowParams {
            max_features,
            max_depth: Some(cfg.max_depth),
            candidates: (!fixed.is_empty()).then_some(fixed.as_slice()),
        };
        let tree = grow(x, &residual, Some(&hess), &weight, &params, &mut s)?;
        for (i, fi) in f.iter_mut().enumerate() {
            *fi += cfg.learning_rate * tree.predict(x.row(i).as_slice().expect("standard layout"));
        }
        history.push(log_loss(&f, &labels));
        trees.push(tree);
        tree_features.push(fixed);
    }
    Ok((
        BoostModel {
            num_features: p,
            init,
            learning_rate: cfg.learning_rate,
            trees,
            tree_features,
        },
        history,
    ))
}

fn log_loss(f: &[f64], labels: &[f64]) -> f64 {
    // log(1 + e^-z) for the true class, computed stably
    let softplus = |z: f64| if z > 0.0 { z + (-z).exp().ln_1p() } else { z.exp().ln_1p() };
    f.iter().zip(labels).map(|(&z, &t)| if t > 0.5 { softplus(-z) } else { softplus(z) }).sum::<f64>() / f.len() as f64
}
