//! The concentration baseline and the subgraph ensemble predictor.

use ndarray::ArrayView2;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::{quartiles, vectorize_parts, Dataset, Sample};
use crate::dynamics::{Model, PhaseConfig};
use crate::error::{Error, Result};
use crate::graph::{sample_connected_subgraph, Graph};
use crate::learn::{evaluate, stack_rows, train, ClassifierConfig, Metrics, TrainedModel};
use crate::rng::{self, TAG_COIN, TAG_MODEL, TAG_SUBGRAPH};

/// True if some `X_t` with `1 <= t < traj.len()` is concentrated, otherwise a
/// fair coin from `rng`.
pub fn baseline_predict<R: Rng + ?Sized>(model: &Model, traj: &[PhaseConfig], rng: &mut R) -> bool {
    concentrated_early(model, traj) || rng.random::<bool>()
}

/// Whether some `X_t`, `t >= 1`, of the trajectory is concentrated.
pub fn concentrated_early(model: &Model, traj: &[PhaseConfig]) -> bool {
    traj.iter().skip(1).any(|x| model.is_concentrated(x))
}

/// `0.5 + x alpha / 2`: the accuracy of the baseline when a fraction `alpha`
/// of samples synchronize and a fraction `x` of those concentrate early.
pub fn baseline_expected_accuracy(alpha: f64, x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&alpha) || !(0.0..=1.0).contains(&x) {
        return Err(Error::param(format!("alpha {alpha} and x {x} must lie in [0, 1]")));
    }
    Ok(0.5 + x * alpha / 2.0)
}

/// Baseline on `X_0..X_r` of the given samples. Sample `i` flips its coin
/// from stream `(derive(seed, coin tag), i)`.
pub fn baseline_evaluate(dataset: &Dataset, indices: &[usize], r: usize, seed: u64) -> Result<Metrics> {
    let coin_seed = rng::derive(seed, TAG_COIN);
    let mut pred = Vec::with_capacity(indices.len());
    let mut truth = Vec::with_capacity(indices.len());
    for &i in indices {
        let s = &dataset.samples[i];
        let traj = prefix(s, r)?;
        pred.push(baseline_predict(&dataset.spec.model, traj, &mut rng::stream(coin_seed, i as u64)));
        truth.push(s.label);
    }
    evaluate(&pred, &truth)
}

fn prefix(s: &Sample, r: usize) -> Result<&[PhaseConfig]> {
    s.trajectory
        .get(..=r)
        .ok_or_else(|| Error::param(format!("r = {r} exceeds the {} stored iterations", s.stored_iters())))
}

/// Subgraph size, subgraph counts for training and testing, and the
/// decision threshold on the mean subgraph probability.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleParams {
    pub n0: usize,
    pub k_train: usize,
    pub k_test: usize,
    #[serde(default = "default_theta")]
    pub theta: f64,
}

fn default_theta() -> f64 {
    0.5
}

impl EnsembleParams {
    pub fn validate(&self) -> Result<()> {
        if self.n0 == 0 || self.k_train == 0 || self.k_test == 0 {
            return Err(Error::param("n0, k_train and k_test must be at least 1"));
        }
        if !(self.theta > 0.0 && self.theta < 1.0) {
            return Err(Error::param(format!("theta {} outside (0, 1)", self.theta)));
        }
        Ok(())
    }
}

/// Dynamics of one connected subgraph: the induced graph and the trajectory
/// restricted node-wise to it.
#[derive(Clone, Debug, PartialEq)]
pub struct Restriction {
    pub nodes: Vec<usize>,
    pub graph: Graph,
    pub trajectory: Vec<PhaseConfig>,
}

impl Restriction {
    /// Input vector laid out like a full sample's, using the subgraph's
    /// quartiles and features.
    pub fn vectorize(&self, with_features: bool) -> Result<Vec<f64>> {
        let features = if with_features { Some(self.graph.features()?) } else { None };
        Ok(vectorize_parts(&self.trajectory, quartiles(&self.trajectory[0]), features.as_ref()))
    }
}

/// Draws `k` connected `n0`-node subgraphs of `g` and restricts `traj` to each.
pub fn draw_restrictions<R: Rng + ?Sized>(
    g: &Graph,
    traj: &[PhaseConfig],
    n0: usize,
    k: usize,
    rng: &mut R,
) -> Result<Vec<Restriction>> {
    (0..k)
        .map(|_| {
            let (nodes, graph) = sample_connected_subgraph(g, n0, rng)?;
            let trajectory = traj.iter().map(|x| x.restrict(&nodes)).collect();
            Ok(Restriction { nodes, graph, trajectory })
        })
        .collect()
}

/// Trains `config` on `k_train` restricted copies of every training sample,
/// each labeled with its full-graph label. Sample `i` draws its subgraphs from
/// stream `(derive(seed, train tag), i)`.
pub fn ensemble_train(
    dataset: &Dataset,
    indices: &[usize],
    r: usize,
    with_features: bool,
    params: &EnsembleParams,
    config: &ClassifierConfig,
    seed: u64,
) -> Result<TrainedModel> {
    params.validate()?;
    let stream_seed = rng::derive(seed, TAG_SUBGRAPH + 1);
    let mut rows = Vec::with_capacity(indices.len() * params.k_train);
    let mut labels = Vec::with_capacity(rows.capacity());
    for &i in indices {
        let s = &dataset.samples[i];
        let traj = prefix(s, r)?;
        let mut st = rng::stream(stream_seed, i as u64);
        for part in draw_restrictions(&s.graph, traj, params.n0, params.k_train, &mut st)? {
            rows.push(part.vectorize(with_features)?);
            labels.push(s.label);
        }
    }
    let x = stack_rows(&rows)?;
    train(config, x.view(), &labels, rng::derive(seed, TAG_MODEL))
}

/// Mean class-1 probability over restricted copies.
pub fn mean_probability(model: &TrainedModel, parts: &[Restriction], with_features: bool) -> Result<f64> {
    let rows = parts.iter().map(|p| p.vectorize(with_features)).collect::<Result<Vec<_>>>()?;
    let x = stack_rows(&rows)?;
    let probs = model.predict_proba_rows(ArrayView2::from(&x))?;
    Ok(probs.iter().sum::<f64>() / probs.len() as f64)
}

/// Draws `k_test` subgraphs of `g`, averages the model's probabilities on the
/// restricted dynamics and compares the mean with `theta`.
pub fn ensemble_predict<R: Rng + ?Sized>(
    model: &TrainedModel,
    g: &Graph,
    traj: &[PhaseConfig],
    with_features: bool,
    params: &EnsembleParams,
    rng: &mut R,
) -> Result<bool> {
    params.validate()?;
    let parts = draw_restrictions(g, traj, params.n0, params.k_test, rng)?;
    Ok(mean_probability(model, &parts, with_features)? > params.theta)
}

/// Pools every subgraph's phases at each `t >= 1` and predicts
/// synchronization if a pooled configuration is concentrated, else flips a
/// coin.
pub fn subgraph_baseline_predict<R: Rng + ?Sized>(model: &Model, parts: &[Vec<PhaseConfig>], rng: &mut R) -> Result<bool> {
    let first = parts.first().ok_or_else(|| Error::EmptyData("no subgraph trajectories".into()))?;
    let steps = first.len();
    if parts.iter().any(|p| p.len() != steps) {
        return Err(Error::param("subgraph trajectories differ in length"));
    }
    let pooled_hit = (1..steps).any(|t| {
        let pooled = pool(parts.iter().map(|p| &p[t]));
        model.is_concentrated(&pooled)
    });
    Ok(pooled_hit || rng.random::<bool>())
}

fn pool<'a>(xs: impl Iterator<Item = &'a PhaseConfig>) -> PhaseConfig {
    let mut out: Option<PhaseConfig> = None;
    for x in xs {
        match (&mut out, x) {
            (None, _) => out = Some(x.clone()),
            (Some(PhaseConfig::Continuous(acc)), PhaseConfig::Continuous(p)) => acc.extend(p),
            (Some(PhaseConfig::Discrete { colors: acc, .. }), PhaseConfig::Discrete { colors, .. }) => acc.extend(colors),
            _ => unreachable!("subgraphs of one trajectory share a phase space"),
        }
    }
    out.expect("at least one subgraph")
}

/// Ensemble and pooled-baseline metrics on the test samples, both using the
/// same `k_test` subgraphs per sample. Test sample `i` draws from stream
/// `(derive(seed, test tag), i)`.
pub fn ensemble_evaluate(
    model: &TrainedModel,
    dataset: &Dataset,
    indices: &[usize],
    r: usize,
    with_features: bool,
    params: &EnsembleParams,
    seed: u64,
) -> Result<(Metrics, Metrics)> {
    params.validate()?;
    let stream_seed = rng::derive(seed, TAG_SUBGRAPH);
    let (mut ens, mut base, mut truth) = (Vec::new(), Vec::new(), Vec::new());
    for &i in indices {
        let s = &dataset.samples[i];
        let traj = prefix(s, r)?;
        let mut st = rng::stream(stream_seed, i as u64);
        let parts = draw_restrictions(&s.graph, traj, params.n0, params.k_test, &mut st)?;
        ens.push(mean_probability(model, &parts, with_features)? > params.theta);
        let trajs: Vec<Vec<PhaseConfig>> = parts.into_iter().map(|p| p.trajectory).collect();
        base.push(subgraph_baseline_predict(&dataset.spec.model, &trajs, &mut st)?);
        truth.push(s.label);
    }
    Ok((evaluate(&ens, &truth)?, evaluate(&base, &truth)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{build_balanced_dataset, DatasetSpec};
    use crate::dynamics::{simulate_full, KmParams};
    use crate::learn::{ForestConfig, TreeNode, ForestModel, FeatureSampling, Tree};
    use std::f64::consts::PI;

    fn disc(colors: &[u32]) -> PhaseConfig {
        PhaseConfig::Discrete { kappa: 5, colors: colors.to_vec() }
    }

    #[test]
    fn expected_accuracy() {
        assert_eq!(baseline_expected_accuracy(0.5, 0.0).unwrap(), 0.5);
        assert_eq!(baseline_expected_accuracy(0.5, 1.0).unwrap(), 0.75);
        assert!((baseline_expected_accuracy(0.5, 0.2).unwrap() - 0.55).abs() < 1e-15);
        assert!(baseline_expected_accuracy(1.5, 0.2).is_err());
        assert!(baseline_expected_accuracy(0.5, -0.1).is_err());
    }

    #[test]
    fn baseline_branches() {
        let fca = Model::Fca { kappa: 5 };
        let spread = disc(&[0, 1, 2, 3, 4]);
        let traj = vec![spread.clone(), spread.clone(), spread.clone(), disc(&[1, 1, 2, 2, 2])];
        let mut s = rng::from_seed(0);
        assert!((0..100).all(|_| baseline_predict(&fca, &traj, &mut s)));
        // X_0 alone never counts
        let only_start = vec![disc(&[1; 5]), spread.clone()];
        let hits = (0..10_000).filter(|_| baseline_predict(&fca, &only_start, &mut s)).count();
        assert!((hits as f64 / 1e4 - 0.5).abs() < 0.02, "{hits}");
    }

    #[test]
    fn pooled_baseline() {
        let fca = Model::Fca { kappa: 5 };
        let mut s = rng::from_seed(1);
        let same = vec![vec![disc(&[0, 4]), disc(&[2, 2])], vec![disc(&[1, 3]), disc(&[2, 2, 2])]];
        assert!(subgraph_baseline_predict(&fca, &same, &mut s).unwrap());
        // each part fits in two colors; together they span four
        let split = vec![vec![disc(&[0]), disc(&[0, 1])], vec![disc(&[0]), disc(&[2, 3])]];
        assert!(fca.is_concentrated(&split[0][1]) && fca.is_concentrated(&split[1][1]));
        let hits = (0..2000).filter(|_| subgraph_baseline_predict(&fca, &split, &mut s).unwrap()).count();
        assert!((800..1200).contains(&hits), "{hits}");
        let single = vec![vec![disc(&[0, 2]), disc(&[0, 2])]];
        let (mut a, mut b) = (rng::from_seed(9), rng::from_seed(9));
        for _ in 0..50 {
            assert_eq!(
                subgraph_baseline_predict(&fca, &single, &mut a).unwrap(),
                baseline_predict(&fca, &single[0], &mut b)
            );
        }
        assert!(subgraph_baseline_predict(&fca, &[], &mut a).is_err());
    }

    fn leaf_forest(value: f64, p: usize) -> TrainedModel {
        TrainedModel::Forest(ForestModel {
            num_features: p,
            max_features: 1,
            feature_sampling: FeatureSampling::PerNode,
            trees: vec![Tree { root: TreeNode::Leaf { value }, importance: vec![0.0; p] }],
            tree_features: vec![Vec::new()],
        })
    }

    #[test]
    fn ensemble_threshold_and_params() {
        let g = Graph::cycle(12);
        let traj = vec![disc(&[0; 12]); 3];
        let params = EnsembleParams { n0: 4, k_train: 1, k_test: 4, theta: 0.5 };
        let p = (3 * 4 + 3) + 5;
        let mut s = rng::from_seed(0);
        assert!(!ensemble_predict(&leaf_forest(0.0, p), &g, &traj, true, &EnsembleParams { theta: 0.01, ..params }, &mut s).unwrap());
        assert!(ensemble_predict(&leaf_forest(0.75, p), &g, &traj, true, &params, &mut s).unwrap());
        assert!(ensemble_predict(&leaf_forest(0.5, p), &g, &traj, true, &params, &mut s).is_ok_and(|b| !b));
        let big = EnsembleParams { n0: 13, ..params };
        assert!(ensemble_predict(&leaf_forest(0.5, p), &g, &traj, true, &big, &mut s).is_err());
        assert!(EnsembleParams { theta: 1.0, ..params }.validate().is_err());
        assert!(EnsembleParams { k_test: 0, ..params }.validate().is_err());
    }

    #[test]
    fn full_size_ensemble_is_ordinary_prediction() {
        let mut spec = DatasetSpec::nws(Model::Fca { kappa: 5 }, 14, 10, 4);
        spec.training_iter = 4;
        let ds = build_balanced_dataset(&spec).unwrap();
        let idx: Vec<usize> = (0..ds.len()).collect();
        let params = EnsembleParams { n0: 14, k_train: 1, k_test: 1, theta: 0.5 };
        let cfg = ClassifierConfig::Forest(ForestConfig { trees: 10, ..Default::default() });
        let model = ensemble_train(&ds, &idx, 4, true, &params, &cfg, 3).unwrap();
        let direct = train(&cfg, ds.design_matrix(&idx, 4, true).unwrap().view(), &ds.labels(), rng::derive(3, TAG_MODEL)).unwrap();
        assert_eq!(model, direct);
        let mut s = rng::from_seed(0);
        for smp in &ds.samples {
            let v = smp.vectorize(4, true).unwrap();
            assert_eq!(
                ensemble_predict(&model, &smp.graph, &smp.trajectory, true, &params, &mut s).unwrap(),
                model.predict(&v, 0.5).unwrap()
            );
        }
        let four = EnsembleParams { k_train: 4, n0: 6, ..params };
        let TrainedModel::Forest(f) = ensemble_train(&ds, &idx, 4, false, &four, &cfg, 3).unwrap() else { panic!() };
        assert_eq!(f.num_features, 5 * 6 + 3);
    }

    #[test]
    fn restricted_rows_keep_full_label() {
        // a winding KM ring is not synchronizing, yet a short arc of it is
        // inside a half-circle
        let n = 40;
        let g = Graph::cycle(n);
        let x0 = PhaseConfig::Continuous((0..n).map(|i| 2.0 * PI * i as f64 / n as f64).collect());
        let model = Model::Km(KmParams::default());
        let traj = simulate_full(&model, &g, &x0, 3).unwrap().configs;
        let mut s = rng::from_seed(2);
        let parts = draw_restrictions(&g, &traj, 5, 1, &mut s).unwrap();
        assert!(model.is_concentrated(&parts[0].trajectory[3]));
        assert!(!model.is_concentrated(&traj[3]));
        let sample = Sample {
            seed: 0,
            features: g.features().unwrap(),
            quartiles: quartiles(&x0),
            trajectory: traj,
            graph: g,
            label: false,
        };
        let ds = Dataset {
            spec: DatasetSpec::nws(model, n, 1, 0),
            samples: vec![sample.clone(), Sample { label: true, ..sample }],
            draws: 2,
        };
        let params = EnsembleParams { n0: 5, k_train: 3, k_test: 1, theta: 0.5 };
        let cfg = ClassifierConfig::Forest(ForestConfig { trees: 1, bootstrap: false, ..Default::default() });
        // the first sample alone: every restricted row carries label 0
        let TrainedModel::Forest(f) = ensemble_train(&ds, &[0], 3, true, &params, &cfg, 0).unwrap() else { panic!() };
        assert_eq!(f.trees[0].root, TreeNode::Leaf { value: 0.0 });
    }
}
