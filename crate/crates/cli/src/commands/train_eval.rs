use std::path::PathBuf;

use anyhow::Result;
use serde::{Deserialize, Serialize};
use syncpred_core::learn::{cross_validate, format_rate};
use syncpred_core::predict::baseline_evaluate;
use syncpred_core::{ClassifierConfig, Metrics};

use super::{csv_with_header, load_dataset, provenance, resolve_r, Invocation};
use crate::config;

/// Classifier inputs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Inputs {
    Dynamics,
    DynamicsFeatures,
    /// The five graph features alone; independent of `r`.
    Features,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainEvalConfig {
    pub seed: u64,
    pub dataset: PathBuf,
    pub classifiers: Vec<ClassifierConfig>,
    /// Empty means the dataset's stored training iteration.
    pub r_values: Vec<usize>,
    pub inputs: Vec<Inputs>,
    pub folds: usize,
}

impl Default for TrainEvalConfig {
    fn default() -> Self {
        TrainEvalConfig {
            seed: 0,
            dataset: PathBuf::from("data"),
            classifiers: ["forest", "boost", "net"]
                .iter()
                .map(|n| ClassifierConfig::by_name(n).expect("known name"))
                .collect(),
            r_values: Vec::new(),
            inputs: vec![Inputs::Dynamics, Inputs::DynamicsFeatures],
            folds: 5,
        }
    }
}

pub const METRICS_FILE: &str = "metrics.csv";

pub fn run(inv: &Invocation) -> Result<Vec<String>> {
    let cfg: TrainEvalConfig = config::load(&TrainEvalConfig::default(), inv.config, inv.overrides, inv.seed.map(|s| (&["seed"][..], s)))?;
    let ds = load_dataset(&cfg.dataset)?;
    let name = cfg.dataset.file_name().map_or_else(|| cfg.dataset.display().to_string(), |n| n.to_string_lossy().into_owned());
    let idx: Vec<usize> = (0..ds.len()).collect();
    let y = ds.labels();
    let mut w = csv_with_header(inv.out, METRICS_FILE, &provenance("train-eval", cfg.seed, &cfg)?)?;
    w.write_record(["dataset", "classifier", "r", "with_features", "accuracy", "precision", "recall"])?;
    let mut lines = Vec::new();
    let mut emit = |w: &mut csv::Writer<_>, clf: &str, r: &str, feats: &str, m: &Metrics| -> Result<()> {
        w.write_record([
            name.as_str(),
            clf,
            r,
            feats,
            &m.accuracy.to_string(),
            &format_rate(m.precision),
            &format_rate(m.recall),
        ])?;
        lines.push(format!("{clf:>8} r={r:<4} features={feats:<5} accuracy {:.4}", m.accuracy));
        Ok(())
    };
    for &r in &resolve_r(&cfg.r_values, &ds) {
        let base = baseline_evaluate(&ds, &idx, r, cfg.seed)?;
        emit(&mut w, "baseline", &r.to_string(), "false", &base)?;
        for inputs in cfg.inputs.iter().filter(|i| **i != Inputs::Features) {
            let with_features = *inputs == Inputs::DynamicsFeatures;
            let x = ds.design_matrix(&idx, r, with_features)?;
            for clf in &cfg.classifiers {
                let m = cross_validate(clf, x.view(), &y, cfg.folds, cfg.seed)?;
                emit(&mut w, clf.name(), &r.to_string(), &with_features.to_string(), &m)?;
            }
        }
    }
    if cfg.inputs.contains(&Inputs::Features) {
        let x = ds.feature_matrix(&idx)?;
        for clf in &cfg.classifiers {
            let m = cross_validate(clf, x.view(), &y, cfg.folds, cfg.seed)?;
            emit(&mut w, clf.name(), "", "only", &m)?;
        }
    }
    w.flush()?;
    lines.push(format!("wrote {}", inv.out.join(METRICS_FILE).display()));
    Ok(lines)
}
