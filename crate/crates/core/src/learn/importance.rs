use ndarray::{ArrayView2, Axis};

use super::{train, ClassifierConfig, TrainedModel};
use crate::dataset::stratified_holdout;
use crate::error::{Error, Result};
use crate::rng;

/// Mean decrease in impurity per feature, averaged over trees and normalized
/// to sum 1. Models without any split get the uniform vector.
pub fn gini_importance(model: &TrainedModel) -> Result<Vec<f64>> {
    let (p, trees) = match model {
        TrainedModel::Forest(f) => (f.num_features, &f.trees),
        TrainedModel::Boost(b) => (b.num_features, &b.trees),
        TrainedModel::Net(_) => {
            return Err(Error::UnsupportedModel("impurity importance needs a tree-based model".into()));
        }
    };
    let mut total = vec![0.0; p];
    for t in trees {
        for (acc, v) in total.iter_mut().zip(&t.importance) {
            *acc += v;
        }
    }
    let sum: f64 = total.iter().sum();
    if sum > 0.0 {
        Ok(total.into_iter().map(|v| v / sum).collect())
    } else {
        Ok(vec![1.0 / p as f64; p])
    }
}

/// Importances and held-out accuracy from one train/test split.
#[derive(Clone, Debug, PartialEq)]
pub struct SplitImportance {
    pub split: usize,
    pub importance: Vec<f64>,
    pub test_accuracy: f64,
}

/// Retrains on `splits` stratified holdout splits and records the importance
/// vector of each fit. Split `s` uses streams derived from `(seed, s)`.
pub fn importance_over_splits(
    config: &ClassifierConfig,
    x: ArrayView2<f64>,
    y: &[bool],
    splits: usize,
    test_fraction: f64,
    seed: u64,
) -> Result<Vec<SplitImportance>> {
    if matches!(config, ClassifierConfig::Net(_)) {
        return Err(Error::UnsupportedModel("impurity importance needs a tree-based model".into()));
    }
    (0..splits)
        .map(|split| {
            let split_seed = rng::derive(seed, split as u64);
            let fold = stratified_holdout(y, test_fraction, &mut rng::stream(split_seed, 0))?;
            let xt = x.select(Axis(0), &fold.train);
            let yt: Vec<bool> = fold.train.iter().map(|&i| y[i]).collect();
            let model = train(config, xt.view(), &yt, rng::derive(split_seed, 1))?;
            let xs = x.select(Axis(0), &fold.test);
            let ys: Vec<bool> = fold.test.iter().map(|&i| y[i]).collect();
            Ok(SplitImportance {
                split,
                importance: gini_importance(&model)?,
                test_accuracy: model.evaluate(xs.view(), &ys)?.accuracy,
            })
        })
        .collect()
}
