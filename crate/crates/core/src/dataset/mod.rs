//! Balanced labeled dynamics datasets.
//!
//! A dataset row pairs a graph with the first `r` iterations of a model's
//! trajectory on it and a label telling whether the configuration at the
//! prediction iteration `T` is concentrated.

mod io;
mod split;
mod vector;

use std::collections::HashSet;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::dynamics::{random_config, run, Model, PhaseConfig};
use crate::error::{Error, Result};
use crate::graph::{nws_generate, Graph, GraphFeatures, NwsParams};
use crate::rng::{self, Stream};

pub use io::{DatasetManifest, SampleRecord};
pub use split::{kfold_split, stratified_holdout, Fold};
pub use vector::{column_names, quartiles, vectorize_parts};

/// An integer parameter that is either fixed or drawn uniformly from an
/// inclusive range.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum IntLaw {
    Fixed(usize),
    Uniform { min: usize, max: usize },
}

impl IntLaw {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        match *self {
            IntLaw::Fixed(v) => v,
            IntLaw::Uniform { min, max } => rng.random_range(min..=max),
        }
    }

    fn validate(&self, what: &str) -> Result<()> {
        match *self {
            IntLaw::Uniform { min, max } if min > max => {
                Err(Error::param(format!("{what}: empty range {min}..={max}")))
            }
            _ => Ok(()),
        }
    }

    pub fn max(&self) -> usize {
        match *self {
            IntLaw::Fixed(v) => v,
            IntLaw::Uniform { max, .. } => max,
        }
    }

    pub fn min(&self) -> usize {
        match *self {
            IntLaw::Fixed(v) => v,
            IntLaw::Uniform { min, .. } => min,
        }
    }
}

/// Shortcut probability law: fixed, or `Normal(mu, sd)` with `mu` itself
/// uniform on `[mean_min, mean_max]`, clamped into `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ProbLaw {
    Fixed(f64),
    NormalRandomMean { mean_min: f64, mean_max: f64, sd: f64 },
}

impl ProbLaw {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            ProbLaw::Fixed(p) => p,
            ProbLaw::NormalRandomMean { mean_min, mean_max, sd } => {
                let mu = rng.random_range(mean_min..=mean_max);
                let p = Normal::new(mu, sd).expect("validated sd").sample(rng);
                p.clamp(0.0, 1.0)
            }
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            ProbLaw::Fixed(p) if !(0.0..=1.0).contains(&p) => Err(Error::param(format!("p = {p} outside [0,1]"))),
            ProbLaw::NormalRandomMean { mean_min, mean_max, sd }
                if !(mean_min <= mean_max) || !(sd >= 0.0) || !sd.is_finite() =>
            {
                Err(Error::param("invalid normal shortcut-probability law"))
            }
            _ => Ok(()),
        }
    }
}

/// Fixed graph families used for the toy separation datasets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Topology {
    Ring,
    Path,
    Complete,
    /// Random tree whose degrees never exceed `max_degree`.
    Tree { max_degree: usize },
}

impl Topology {
    fn build<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<Graph> {
        Ok(match *self {
            Topology::Ring => Graph::cycle(n),
            Topology::Path => Graph::path(n),
            Topology::Complete => Graph::complete(n),
            Topology::Tree { max_degree } => Graph::random_tree(n, max_degree, rng)?,
        })
    }
}

/// Where the graphs of a dataset come from.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GraphSource {
    /// Ring-plus-shortcut graphs with per-draw parameter laws. Graphs are
    /// kept only if their fingerprint has not been seen before.
    Nws {
        nodes: IntLaw,
        #[serde(default = "default_ring_degree")]
        k: usize,
        p: ProbLaw,
        #[serde(default = "default_passes")]
        passes: IntLaw,
    },
    /// One topology per class; each class keeps only draws whose label
    /// matches it.
    Toy { nodes: usize, sync: Topology, nonsync: Topology },
}

fn default_ring_degree() -> usize {
    2
}

fn default_passes() -> IntLaw {
    IntLaw::Fixed(1)
}

fn default_budget_factor() -> u64 {
    50
}

fn default_true() -> bool {
    true
}

/// Recipe for a balanced dataset.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetSpec {
    pub model: Model,
    pub source: GraphSource,
    /// Number of stored iterations after `X_0`.
    pub training_iter: usize,
    /// Iteration at which the label is evaluated.
    pub prediction_iter: usize,
    pub samples_per_class: usize,
    #[serde(default = "default_true")]
    pub include_graph_features: bool,
    pub seed: u64,
    /// Maximum draws per requested sample before giving up.
    #[serde(default = "default_budget_factor")]
    pub budget_factor: u64,
}

impl DatasetSpec {
    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        if self.samples_per_class == 0 {
            return Err(Error::param("samples_per_class must be at least 1"));
        }
        if self.training_iter >= self.prediction_iter {
            return Err(Error::param(format!(
                "training iteration {} must be below the prediction iteration {}",
                self.training_iter, self.prediction_iter
            )));
        }
        if self.budget_factor == 0 {
            return Err(Error::param("budget_factor must be positive"));
        }
        match self.source {
            GraphSource::Nws { nodes, k, p, passes } => {
                nodes.validate("nodes")?;
                passes.validate("passes")?;
                p.validate()?;
                NwsParams { n: nodes.min(), k, p: 0.0, passes: passes.min() }.validate()?;
            }
            GraphSource::Toy { nodes, .. } => {
                if nodes < 2 {
                    return Err(Error::param("toy graphs need at least 2 nodes"));
                }
            }
        }
        Ok(())
    }

    /// Fixed topology per class: complete vs ring (KM), path vs complete
    /// (GHM), degree-4 trees vs ring (FCA), on 30 nodes.
    pub fn toy(model: Model, samples_per_class: usize, seed: u64) -> Self {
        let (sync, nonsync, r, t) = match model {
            Model::Km(_) => (Topology::Complete, Topology::Ring, 126, 1758),
            Model::Ghm { .. } => (Topology::Path, Topology::Complete, 25, 70),
            Model::Fca { .. } => (Topology::Tree { max_degree: 4 }, Topology::Ring, 25, 70),
        };
        DatasetSpec {
            model,
            source: GraphSource::Toy { nodes: 30, sync, nonsync },
            training_iter: r,
            prediction_iter: t,
            samples_per_class,
            include_graph_features: true,
            seed,
            budget_factor: default_budget_factor(),
        }
    }

    /// Fixed-size ring-plus-shortcut recipe with one shortcut pass:
    /// `p = 0.85, r = 126, T = 1758` for KM and `p = 0.65, r = 25, T = 70`
    /// for the discrete models.
    pub fn nws(model: Model, nodes: usize, samples_per_class: usize, seed: u64) -> Self {
        let (p, r, t) = match model {
            Model::Km(_) => (0.85, 126, 1758),
            _ => (0.65, 25, 70),
        };
        DatasetSpec {
            model,
            source: GraphSource::Nws {
                nodes: IntLaw::Fixed(nodes),
                k: default_ring_degree(),
                p: ProbLaw::Fixed(p),
                passes: IntLaw::Fixed(1),
            },
            training_iter: r,
            prediction_iter: t,
            samples_per_class,
            include_graph_features: true,
            seed,
            budget_factor: default_budget_factor(),
        }
    }

    fn class_seed(&self, class: Option<bool>, index: u64) -> u64 {
        match class {
            None => rng::derive(self.seed, index),
            Some(label) => rng::derive(rng::derive(self.seed, 1 + u64::from(label)), index),
        }
    }
}

/// One labeled example.
#[derive(Clone, Debug, PartialEq)]
pub struct Sample {
    /// Seed of the draw's private stream; regenerates graph, start and label.
    pub seed: u64,
    pub graph: Graph,
    pub features: GraphFeatures,
    /// `X_0 ..= X_r`.
    pub trajectory: Vec<PhaseConfig>,
    pub quartiles: [f64; 3],
    pub label: bool,
}

impl Sample {
    pub fn num_nodes(&self) -> usize {
        self.graph.n()
    }

    pub fn stored_iters(&self) -> usize {
        self.trajectory.len() - 1
    }

    /// Flat input vector over `X_0 ..= X_r_used`, the three quartiles of `X_0`
    /// and, optionally, the five graph features.
    pub fn vectorize(&self, r_used: usize, with_features: bool) -> Result<Vec<f64>> {
        if r_used > self.stored_iters() {
            return Err(Error::param(format!(
                "requested {r_used} iterations, sample stores {}",
                self.stored_iters()
            )));
        }
        Ok(vectorize_parts(
            &self.trajectory[..=r_used],
            self.quartiles,
            with_features.then_some(&self.features),
        ))
    }
}

/// Simulates `x0` on `g` up to `horizon` and reports whether `X_horizon` is
/// concentrated.
pub fn label_sample(model: &Model, g: &Graph, x0: &PhaseConfig, horizon: usize) -> Result<bool> {
    Ok(run(model, g, x0, horizon, 0)?.concentrated_at_horizon(model))
}

/// Regenerates a sample from its draw seed. `class` selects the topology for
/// toy sources and is ignored otherwise.
pub fn draw_sample(spec: &DatasetSpec, seed: u64, class: bool) -> Result<Sample> {
    let mut s = rng::from_seed(seed);
    let graph = draw_graph(spec, class, &mut s)?;
    simulate_draw(spec, seed, graph, &mut s)
}

fn draw_graph(spec: &DatasetSpec, class: bool, s: &mut Stream) -> Result<Graph> {
    match spec.source {
        GraphSource::Nws { nodes, k, p, passes } => {
            let params = NwsParams {
                n: nodes.sample(s),
                k,
                p: p.sample(s),
                passes: passes.sample(s),
            };
            nws_generate(&params, s)
        }
        GraphSource::Toy { nodes, sync, nonsync } => {
            if class {
                sync.build(nodes, s)
            } else {
                nonsync.build(nodes, s)
            }
        }
    }
}

fn simulate_draw(spec: &DatasetSpec, seed: u64, graph: Graph, s: &mut Stream) -> Result<Sample> {
    let x0 = random_config(spec.model.space(), graph.n(), s);
    let outcome = run(&spec.model, &graph, &x0, spec.prediction_iter, spec.training_iter)?;
    let label = outcome.concentrated_at_horizon(&spec.model);
    Ok(Sample {
        seed,
        features: graph.features()?,
        quartiles: quartiles(&x0),
        trajectory: outcome.prefix,
        graph,
        label,
    })
}

/// A balanced collection of samples plus the recipe that produced it.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    pub spec: DatasetSpec,
    pub samples: Vec<Sample>,
    /// Number of draws consumed while filling both classes.
    pub draws: u64,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn labels(&self) -> Vec<bool> {
        self.samples.iter().map(|s| s.label).collect()
    }

    /// (synchronizing, non-synchronizing) counts.
    pub fn class_counts(&self) -> (usize, usize) {
        let pos = self.samples.iter().filter(|s| s.label).count();
        (pos, self.samples.len() - pos)
    }

    /// Mean and population standard deviation of edge counts.
    pub fn edge_stats(&self) -> (f64, f64) {
        mean_std(self.samples.iter().map(|s| s.graph.num_edges() as f64))
    }

    pub fn diameter_stats(&self) -> (f64, f64) {
        mean_std(self.samples.iter().map(|s| s.features.diameter as f64))
    }

    /// Rows `vectorize(sample, r_used, with_features)` for the given indices.
    pub fn design_matrix(&self, indices: &[usize], r_used: usize, with_features: bool) -> Result<ndarray::Array2<f64>> {
        let rows = indices
            .iter()
            .map(|&i| self.samples[i].vectorize(r_used, with_features))
            .collect::<Result<Vec<_>>>()?;
        crate::learn::stack_rows(&rows)
    }

    /// Rows holding only the five graph features.
    pub fn feature_matrix(&self, indices: &[usize]) -> Result<ndarray::Array2<f64>> {
        let rows: Vec<Vec<f64>> = indices.iter().map(|&i| self.samples[i].features.to_array().to_vec()).collect();
        crate::learn::stack_rows(&rows)
    }
}

fn mean_std(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = values.clone().count() as f64;
    if n == 0.0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.clone().sum::<f64>() / n;
    let var = values.map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Draws `(graph, X_0)` pairs until both classes hold `samples_per_class`
/// examples.
///
/// Draw `i` uses its own stream derived from `(spec.seed, i)`, so the result
/// is a function of the spec alone. Ring-plus-shortcut graphs are rejected
/// when their fingerprint matches an accepted graph; toy classes are filled
/// independently and keep only draws whose label matches the class.
pub fn build_balanced_dataset(spec: &DatasetSpec) -> Result<Dataset> {
    spec.validate()?;
    let want = spec.samples_per_class;
    match spec.source {
        GraphSource::Nws { .. } => {
            let budget = spec.budget_factor * 2 * want as u64;
            let mut seen = HashSet::new();
            let mut pools: [Vec<Sample>; 2] = [Vec::new(), Vec::new()];
            let mut draws = 0;
            while pools[0].len() < want || pools[1].len() < want {
                if draws >= budget {
                    return Err(starved(&pools, want, draws));
                }
                let seed = spec.class_seed(None, draws);
                draws += 1;
                let mut s = rng::from_seed(seed);
                let graph = draw_graph(spec, true, &mut s)?;
                let fp = graph.fingerprint();
                if seen.contains(&fp) {
                    continue;
                }
                let sample = simulate_draw(spec, seed, graph, &mut s)?;
                let pool = &mut pools[usize::from(sample.label)];
                if pool.len() < want {
                    seen.insert(fp);
                    pool.push(sample);
                }
            }
            Ok(Dataset {
                spec: spec.clone(),
                samples: interleave(pools),
                draws,
            })
        }
        GraphSource::Toy { .. } => {
            let budget = spec.budget_factor * want as u64;
            let mut pools: [Vec<Sample>; 2] = [Vec::new(), Vec::new()];
            let mut draws = 0;
            for class in [true, false] {
                let pool = usize::from(class);
                let mut i = 0;
                while pools[pool].len() < want {
                    if i >= budget {
                        return Err(starved(&pools, want, draws));
                    }
                    let seed = spec.class_seed(Some(class), i);
                    i += 1;
                    draws += 1;
                    let sample = draw_sample(spec, seed, class)?;
                    if sample.label == class {
                        pools[pool].push(sample);
                    }
                }
            }
            Ok(Dataset {
                spec: spec.clone(),
                samples: interleave(pools),
                draws,
            })
        }
    }
}

fn starved(pools: &[Vec<Sample>; 2], want: usize, draws: u64) -> Error {
    let (starved, have) = if pools[1].len() < want {
        ("synchronizing", pools[1].len())
    } else {
        ("non-synchronizing", pools[0].len())
    };
    Error::BudgetExhausted {
        starved,
        have,
        want,
        draws,
        sync: pools[1].len(),
        nonsync: pools[0].len(),
    }
}

/// Alternates the two classes, synchronizing first.
fn interleave(pools: [Vec<Sample>; 2]) -> Vec<Sample> {
    let [neg, pos] = pools;
    let mut out = Vec::with_capacity(neg.len() + pos.len());
    let mut neg = neg.into_iter();
    for p in pos {
        out.push(p);
        out.extend(neg.next());
    }
    out.extend(neg);
    out
}
