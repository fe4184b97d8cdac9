//! Simulation of coupled oscillators on random graphs and machine-learned
//! prediction of whether they synchronize.
//!
//! * [`graph`]: ring-plus-shortcut generators, toy topologies, statistics,
//!   fingerprints, reverse Cuthill-McKee ordering, connected subgraph sampling.
//! * [`dynamics`]: Kuramoto, firefly and Greenberg-Hastings updates, the
//!   half-circle concentration test and the color displacement encoding.
//! * [`dataset`]: balanced labeled dynamics datasets, their on-disk format,
//!   vectorization and stratified folds.
//! * [`learn`]: CART trees, random forests, gradient boosting, a feed-forward
//!   network, metrics and Gini importances.
//! * [`predict`]: the concentration baseline and the subgraph ensemble
//!   predictor.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dataset;
pub mod dynamics;
pub mod error;
pub mod graph;
pub mod learn;
pub mod predict;
pub mod rng;

pub use dataset::{Dataset, DatasetSpec, Sample};
pub use dynamics::{Model, ModelKind, PhaseConfig, PhaseSpace, Trajectory};
pub use error::{Error, Result};
pub use graph::{Graph, GraphFeatures, NwsParams};
pub use learn::{ClassifierConfig, Metrics, TrainedModel};
pub use predict::EnsembleParams;

