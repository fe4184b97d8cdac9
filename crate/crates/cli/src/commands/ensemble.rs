use std::path::PathBuf;

use anyhow::Result;
use serde::{Deserialize, Serialize};
use syncpred_core::dataset::stratified_holdout;
use syncpred_core::learn::{format_rate, ClassifierConfig, NetConfig};
use syncpred_core::predict::{ensemble_evaluate, ensemble_train, EnsembleParams};
use syncpred_core::rng;

use super::{csv_with_header, load_dataset, provenance, resolve_r, Invocation};
use crate::config;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleConfig {
    pub seed: u64,
    pub dataset: PathBuf,
    pub classifier: ClassifierConfig,
    pub n0: usize,
    /// Subgraphs per test sample; also per training sample unless
    /// `k_train` is set.
    pub k_values: Vec<usize>,
    pub k_train: Option<usize>,
    /// Empty means the dataset's stored training iteration.
    pub r_values: Vec<usize>,
    pub with_features: bool,
    pub theta: f64,
    pub test_fraction: f64,
}

impl Default for EnsembleConfig {
    fn default() -> Self {
        EnsembleConfig {
            seed: 0,
            dataset: PathBuf::from("data"),
            classifier: ClassifierConfig::Net(NetConfig::default()),
            n0: 30,
            k_values: vec![1, 2, 4, 8],
            k_train: None,
            r_values: Vec::new(),
            with_features: false,
            theta: 0.5,
            test_fraction: 0.2,
        }
    }
}

pub const REPORT_FILE: &str = "ensemble.csv";

pub fn run(inv: &Invocation) -> Result<Vec<String>> {
    let cfg: EnsembleConfig = config::load(&EnsembleConfig::default(), inv.config, inv.overrides, inv.seed.map(|s| (&["seed"][..], s)))?;
    let ds = load_dataset(&cfg.dataset)?;
    let split = stratified_holdout(&ds.labels(), cfg.test_fraction, &mut rng::stream(cfg.seed, 0))?;
    let mut w = csv_with_header(inv.out, REPORT_FILE, &provenance("ensemble", cfg.seed, &cfg)?)?;
    w.write_record(["k", "r", "with_features", "method", "accuracy", "precision", "recall"])?;
    let mut lines = Vec::new();
    for &r in &resolve_r(&cfg.r_values, &ds) {
        for &k in &cfg.k_values {
            let params = EnsembleParams {
                n0: cfg.n0,
                k_train: cfg.k_train.unwrap_or(k),
                k_test: k,
                theta: cfg.theta,
            };
            let model = ensemble_train(&ds, &split.train, r, cfg.with_features, &params, &cfg.classifier, cfg.seed)?;
            let (ens, base) = ensemble_evaluate(&model, &ds, &split.test, r, cfg.with_features, &params, cfg.seed)?;
            for (method, m) in [("ensemble", &ens), ("baseline", &base)] {
                w.write_record([
                    k.to_string(),
                    r.to_string(),
                    cfg.with_features.to_string(),
                    method.to_string(),
                    m.accuracy.to_string(),
                    format_rate(m.precision),
                    format_rate(m.recall),
                ])?;
            }
            lines.push(format!(
                "k={k} r={r}: ensemble accuracy {:.4} recall {}, baseline accuracy {:.4} recall {}",
                ens.accuracy,
                format_rate(ens.recall),
                base.accuracy,
                format_rate(base.recall)
            ));
        }
    }
    w.flush()?;
    lines.push(format!("wrote {}", inv.out.join(REPORT_FILE).display()));
    Ok(lines)
}
