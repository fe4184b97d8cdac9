//! Native binary classifiers, metrics and impurity importance.

mod boost;
mod forest;
mod importance;
mod metrics;
mod net;
mod tree;

use std::fs;
use std::path::Path;

use ndarray::{Array2, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use crate::dataset::kfold_split;
use crate::error::{Error, Result};
use crate::rng;

pub use boost::{train_boost, train_boost_with_history, BoostConfig, BoostModel};
pub use forest::{bootstrap_weights, train_forest, train_forest_with_oob, ForestConfig, ForestModel};
pub use importance::{gini_importance, importance_over_splits, SplitImportance};
pub use metrics::{evaluate, format_rate, Confusion, Metrics};
pub use net::{gradient_check, train_net, NetConfig, NetModel, NormMode, Optimizer};
pub use tree::{sqrt_features, train_tree, FeatureSampling, Tree, TreeNode};

/// Which classifier to train and with what settings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ClassifierConfig {
    Forest(ForestConfig),
    Boost(BoostConfig),
    Net(NetConfig),
}

impl ClassifierConfig {
    pub fn name(&self) -> &'static str {
        match self {
            ClassifierConfig::Forest(_) => "forest",
            ClassifierConfig::Boost(_) => "boost",
            ClassifierConfig::Net(_) => "net",
        }
    }

    /// Default settings for `forest`, `boost` or `net`.
    pub fn by_name(name: &str) -> Result<ClassifierConfig> {
        match name {
            "forest" => Ok(ClassifierConfig::Forest(ForestConfig::default())),
            "boost" => Ok(ClassifierConfig::Boost(BoostConfig::default())),
            "net" => Ok(ClassifierConfig::Net(NetConfig::default())),
            other => Err(Error::param(format!("unknown classifier {other:?}"))),
        }
    }
}

/// A fitted classifier of any kind.
#[derive(Clone, Debug, PartialEq)]
pub enum TrainedModel {
    Forest(ForestModel),
    Boost(BoostModel),
    Net(NetModel),
}

/// Trains the configured classifier; all randomness derives from `seed`.
pub fn train(config: &ClassifierConfig, x: ArrayView2<f64>, y: &[bool], seed: u64) -> Result<TrainedModel> {
    Ok(match config {
        ClassifierConfig::Forest(c) => TrainedModel::Forest(train_forest(x, y, c, seed)?),
        ClassifierConfig::Boost(c) => TrainedModel::Boost(train_boost(x, y, c, seed)?),
        ClassifierConfig::Net(c) => TrainedModel::Net(train_net(x, y, c, seed)?),
    })
}

const MODEL_FORMAT: &str = "syncpred-model";

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum Header {
    Forest { format: String, model: ForestModel },
    Boost { format: String, model: BoostModel },
    Net { format: String, dims: Vec<usize>, dropout: f64, values: usize },
}

impl TrainedModel {
    pub fn num_features(&self) -> usize {
        match self {
            TrainedModel::Forest(f) => f.num_features,
            TrainedModel::Boost(b) => b.num_features,
            TrainedModel::Net(n) => n.num_inputs(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            TrainedModel::Forest(_) => "forest",
            TrainedModel::Boost(_) => "boost",
            TrainedModel::Net(_) => "net",
        }
    }

    /// Probability of class 1 for each row.
    pub fn predict_proba_rows(&self, x: ArrayView2<f64>) -> Result<Vec<f64>> {
        if x.ncols() != self.num_features() {
            return Err(Error::SizeMismatch {
                expected: self.num_features(),
                actual: x.ncols(),
            });
        }
        let rows = || x.rows().into_iter().map(|r| r.to_vec());
        Ok(match self {
            TrainedModel::Forest(f) => rows().map(|r| f.predict_proba(&r)).collect(),
            TrainedModel::Boost(b) => rows().map(|r| b.predict_proba(&r)).collect(),
            TrainedModel::Net(n) => n.predict_proba_rows(x)?,
        })
    }

    pub fn predict_proba(&self, x: &[f64]) -> Result<f64> {
        let row = ArrayView2::from_shape((1, x.len()), x).map_err(|e| Error::param(e.to_string()))?;
        Ok(self.predict_proba_rows(row)?[0])
    }

    pub fn predict(&self, x: &[f64], threshold: f64) -> Result<bool> {
        Ok(self.predict_proba(x)? > threshold)
    }

    /// Metrics of `proba > 0.5` predictions.
    pub fn evaluate(&self, x: ArrayView2<f64>, y: &[bool]) -> Result<Metrics> {
        let pred: Vec<bool> = self.predict_proba_rows(x)?.into_iter().map(|p| p > 0.5).collect();
        evaluate(&pred, y)
    }

    /// One JSON header line; for networks it is followed by the parameter
    /// image as little-endian `f64`.
    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let format = MODEL_FORMAT.to_string();
        let (header, tail) = match self {
            TrainedModel::Forest(f) => (Header::Forest { format, model: f.clone() }, Vec::new()),
            TrainedModel::Boost(b) => (Header::Boost { format, model: b.clone() }, Vec::new()),
            TrainedModel::Net(n) => {
                let tail = n.to_le_bytes();
                (
                    Header::Net {
                        format,
                        dims: n.dims.clone(),
                        dropout: n.dropout,
                        values: tail.len() / 8,
                    },
                    tail,
                )
            }
        };
        let mut out = serde_json::to_vec(&header)?;
        out.push(b'\n');
        out.extend(tail);
        Ok(out)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<TrainedModel> {
        let cut = bytes
            .iter()
            .position(|&b| b == b'\n')
            .ok_or_else(|| Error::Parse("model file has no header line".into()))?;
        let header: Header = serde_json::from_slice(&bytes[..cut])?;
        let tail = &bytes[cut + 1..];
        let (format, model) = match header {
            Header::Forest { format, model } => (format, TrainedModel::Forest(model)),
            Header::Boost { format, model } => (format, TrainedModel::Boost(model)),
            Header::Net { format, dims, dropout, values } => {
                if tail.len() != 8 * values {
                    return Err(Error::SizeMismatch {
                        expected: 8 * values,
                        actual: tail.len(),
                    });
                }
                (format, TrainedModel::Net(NetModel::from_le_bytes(dims, dropout, tail)?))
            }
        };
        if format != MODEL_FORMAT {
            return Err(Error::Parse(format!("unknown model format {format:?}")));
        }
        Ok(model)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_bytes()?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<TrainedModel> {
        TrainedModel::from_bytes(&fs::read(path)?)
    }
}

/// Stratified `folds`-fold cross-validation with confusion counts pooled over
/// folds. Fold assignment uses stream `(seed, 0)`; fold `f` trains with seed
/// `derive(seed, f + 1)`.
pub fn cross_validate(config: &ClassifierConfig, x: ArrayView2<f64>, y: &[bool], folds: usize, seed: u64) -> Result<Metrics> {
    let splits = kfold_split(y, folds, &mut rng::stream(seed, 0))?;
    let mut pooled = Confusion::default();
    for (f, fold) in splits.iter().enumerate() {
        let xt = x.select(Axis(0), &fold.train);
        let yt: Vec<bool> = fold.train.iter().map(|&i| y[i]).collect();
        let model = train(config, xt.view(), &yt, rng::derive(seed, f as u64 + 1))?;
        let xs = x.select(Axis(0), &fold.test);
        let ys: Vec<bool> = fold.test.iter().map(|&i| y[i]).collect();
        pooled.merge(&model.evaluate(xs.view(), &ys)?.confusion);
    }
    Metrics::from_confusion(pooled)
}

/// Stacks equal-length rows into a matrix.
pub fn stack_rows(rows: &[Vec<f64>]) -> Result<Array2<f64>> {
    let width = rows.first().map_or(0, Vec::len);
    if let Some(bad) = rows.iter().find(|r| r.len() != width) {
        return Err(Error::SizeMismatch {
            expected: width,
            actual: bad.len(),
        });
    }
    Array2::from_shape_vec((rows.len(), width), rows.concat()).map_err(|e| Error::param(e.to_string()))
}
