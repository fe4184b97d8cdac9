use anyhow::Result;
use serde::{Deserialize, Serialize};
use syncpred_core::dataset::{build_balanced_dataset, GraphSource, IntLaw, ProbLaw};
use syncpred_core::graph::nws_expected_edges;
use syncpred_core::{DatasetSpec, Model, NwsParams};

use super::{provenance, Invocation};
use crate::config;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenConfig {
    pub dataset: DatasetSpec,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            dataset: DatasetSpec::nws(Model::Fca { kappa: 5 }, 30, 2000, 0),
        }
    }
}

pub fn run(inv: &Invocation) -> Result<Vec<String>> {
    let cfg: GenConfig = config::load(
        &GenConfig::default(),
        inv.config,
        inv.overrides,
        inv.seed.map(|s| (&["dataset", "seed"][..], s)),
    )?;
    let ds = build_balanced_dataset(&cfg.dataset)?;
    ds.save(inv.out, Some(&provenance("gen", cfg.dataset.seed, &cfg)?))?;
    let (sync, nonsync) = ds.class_counts();
    let (mean, std) = ds.edge_stats();
    let (dmean, dstd) = ds.diameter_stats();
    let mut lines = vec![
        format!("model: {}", cfg.dataset.model.kind().as_str()),
        format!("samples: {sync} synchronizing, {nonsync} non-synchronizing ({} draws)", ds.draws),
        format!("edges: mean {mean:.3}, std {std:.3}"),
        format!("diameter: mean {dmean:.3}, std {dstd:.3}"),
    ];
    if let GraphSource::Nws {
        nodes: IntLaw::Fixed(n),
        k,
        p: ProbLaw::Fixed(p),
        passes: IntLaw::Fixed(passes),
    } = cfg.dataset.source
    {
        let expected = nws_expected_edges(&NwsParams { n, k, p, passes });
        lines.push(format!("edges expected from the closed form: {expected:.3}"));
    }
    lines.push(format!("wrote {}", inv.out.display()));
    Ok(lines)
}
