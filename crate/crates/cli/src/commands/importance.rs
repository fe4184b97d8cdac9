use std::path::PathBuf;

use anyhow::{ensure, Result};
use serde::{Deserialize, Serialize};
use syncpred_core::dataset::column_names;
use syncpred_core::learn::{importance_over_splits, BoostConfig, ClassifierConfig};

use super::{csv_with_header, load_dataset, provenance, Invocation};
use crate::config;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImportanceConfig {
    pub seed: u64,
    pub dataset: PathBuf,
    pub classifier: ClassifierConfig,
    /// Iterations of dynamics in the input; the stored value when absent.
    pub r: Option<usize>,
    pub with_features: bool,
    pub splits: usize,
    pub test_fraction: f64,
}

impl Default for ImportanceConfig {
    fn default() -> Self {
        ImportanceConfig {
            seed: 0,
            dataset: PathBuf::from("data"),
            classifier: ClassifierConfig::Boost(BoostConfig::default()),
            r: None,
            with_features: true,
            splits: 50,
            test_fraction: 0.2,
        }
    }
}

pub const IMPORTANCE_FILE: &str = "importance.csv";

pub fn run(inv: &Invocation) -> Result<Vec<String>> {
    let cfg: ImportanceConfig = config::load(&ImportanceConfig::default(), inv.config, inv.overrides, inv.seed.map(|s| (&["seed"][..], s)))?;
    let ds = load_dataset(&cfg.dataset)?;
    let r = cfg.r.unwrap_or(ds.spec.training_iter);
    let idx: Vec<usize> = (0..ds.len()).collect();
    let x = ds.design_matrix(&idx, r, cfg.with_features)?;
    let n = ds.samples.first().map_or(0, |s| s.num_nodes());
    let names = column_names(n, r, cfg.with_features);
    ensure!(names.len() == x.ncols(), "column names do not match the design matrix");
    let runs = importance_over_splits(&cfg.classifier, x.view(), &ds.labels(), cfg.splits, cfg.test_fraction, cfg.seed)?;
    let mut w = csv_with_header(inv.out, IMPORTANCE_FILE, &provenance("importance", cfg.seed, &cfg)?)?;
    w.write_record(["split", "feature", "importance"])?;
    let mut mean = vec![0.0; names.len()];
    for run in &runs {
        for (j, (name, v)) in names.iter().zip(&run.importance).enumerate() {
            w.write_record([run.split.to_string(), name.clone(), v.to_string()])?;
            mean[j] += v / runs.len() as f64;
        }
    }
    w.flush()?;
    let mut order: Vec<usize> = (0..names.len()).collect();
    order.sort_by(|&a, &b| mean[b].total_cmp(&mean[a]).then(a.cmp(&b)));
    let mut lines: Vec<String> = order
        .iter()
        .take(10)
        .map(|&j| format!("{:>12} mean importance {:.4}", names[j], mean[j]))
        .collect();
    lines.push(format!("wrote {}", inv.out.join(IMPORTANCE_FILE).display()));
    Ok(lines)
}
