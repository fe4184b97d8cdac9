//! Benchmark fixtures shared by the criterion targets.

use syncpred_core::dynamics::random_config;
use syncpred_core::graph::nws_generate;
use syncpred_core::{rng, Graph, Model, NwsParams, PhaseConfig};

/// A 30-node small-world graph with a uniform start for `model`.
pub fn nws30(model: &Model, seed: u64) -> (Graph, PhaseConfig) {
    let mut s = rng::from_seed(seed);
    let g = nws_generate(&NwsParams { n: 30, k: 2, p: 0.65, passes: 1 }, &mut s).expect("valid parameters");
    let x0 = random_config(model.space(), g.n(), &mut s);
    (g, x0)
}
