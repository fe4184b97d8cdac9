use std::f64::consts::TAU;

use anyhow::Result;
use serde::{Deserialize, Serialize};
use syncpred_core::dynamics::{random_config, simulate_full, write_configs_csv, KmParams};
use syncpred_core::{rng, Graph, Model, PhaseConfig, PhaseSpace};

use super::{create_with_header, provenance, Invocation};
use crate::config;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DemoConfig {
    pub seed: u64,
    pub rows: usize,
    pub cols: usize,
    pub extra_edges: usize,
    pub kappa: u32,
    pub iterations: usize,
    pub km: KmParams,
}

impl Default for DemoConfig {
    fn default() -> Self {
        DemoConfig {
            seed: 0,
            rows: 20,
            cols: 20,
            extra_edges: 80,
            kappa: 5,
            iterations: 100,
            km: KmParams::default(),
        }
    }
}

/// Grid plus uniformly random extra edges, and one coloring shared by all
/// three models; the Kuramoto start places color `c` at phase `2 pi c / kappa`.
pub fn demo_inputs(cfg: &DemoConfig) -> Result<(Graph, PhaseConfig, PhaseConfig)> {
    let mut s = rng::from_seed(cfg.seed);
    let mut g = Graph::grid(cfg.rows, cfg.cols);
    g.add_random_edges(cfg.extra_edges, &mut s)?;
    let colors = random_config(PhaseSpace::Discrete { kappa: cfg.kappa }, g.n(), &mut s);
    let phases = PhaseConfig::Continuous(colors.values().iter().map(|c| TAU * c / f64::from(cfg.kappa)).collect());
    Ok((g, colors, phases))
}

pub fn run(inv: &Invocation) -> Result<Vec<String>> {
    let cfg: DemoConfig = config::load(&DemoConfig::default(), inv.config, inv.overrides, inv.seed.map(|s| (&["seed"][..], s)))?;
    let (g, colors, phases) = demo_inputs(&cfg)?;
    let header = provenance("demo", cfg.seed, &cfg)?;
    let runs = [
        ("km.csv", Model::Km(cfg.km), &phases),
        ("fca.csv", Model::Fca { kappa: cfg.kappa }, &colors),
        ("ghm.csv", Model::Ghm { kappa: cfg.kappa }, &colors),
    ];
    let mut lines = vec![format!("graph: {} nodes, {} edges", g.n(), g.num_edges())];
    for (file, model, x0) in runs {
        let traj = simulate_full(&model, &g, x0, cfg.iterations)?;
        let mut w = create_with_header(inv.out, file, &header)?;
        write_configs_csv(&traj.configs, &mut w)?;
        let first_sync = traj.configs.iter().position(|x| model.is_synchronized(x));
        lines.push(format!(
            "{}: {} rows, synchronized {}",
            model.kind().as_str(),
            traj.len(),
            first_sync.map_or_else(|| "never".to_string(), |t| format!("at iteration {t}"))
        ));
    }
    lines.push(format!("wrote {}", inv.out.display()));
    Ok(lines)
}
