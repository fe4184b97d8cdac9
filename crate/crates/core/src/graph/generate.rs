use rand::Rng;
use serde::{Deserialize, Serialize};

use super::Graph;
use crate::error::{Error, Result};

/// Parameters of the ring-plus-shortcuts generator with repeated shortcut
/// passes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NwsParams {
    pub n: usize,
    /// Ring degree; every node starts joined to its `k` nearest neighbours.
    pub k: usize,
    /// Shortcut probability; each pass adds a non-edge with `p / (n - k - 1)`.
    pub p: f64,
    /// Number of shortcut passes.
    pub passes: usize,
}

impl NwsParams {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.p) {
            return Err(Error::param(format!("shortcut probability {} outside [0,1]", self.p)));
        }
        if self.k < 2 || self.k % 2 != 0 {
            return Err(Error::param(format!("ring degree {} must be even and >= 2", self.k)));
        }
        if self.k >= self.n {
            return Err(Error::param(format!(
                "ring degree {} must be below the node count {}",
                self.k, self.n
            )));
        }
        if self.passes < 1 {
            return Err(Error::param("at least one shortcut pass is required"));
        }
        Ok(())
    }

    fn shortcut_probability(&self) -> f64 {
        let denom = self.n as f64 - self.k as f64 - 1.0;
        if denom <= 0.0 {
            0.0
        } else {
            (self.p / denom).min(1.0)
        }
    }
}

/// Expected edge count of [`nws_generate`]:
/// `nk/2 + (C(n,2) - nk/2) * (1 - (1 - p/(n-k-1))^M)`.
pub fn nws_expected_edges(params: &NwsParams) -> f64 {
    let n = params.n as f64;
    let ring = (params.n * params.k / 2) as f64;
    let pairs = n * (n - 1.0) / 2.0;
    let q = params.shortcut_probability();
    ring + (pairs - ring) * (1.0 - (1.0 - q).powi(params.passes as i32))
}

/// Ring lattice with shortcuts: every pair that is not a ring edge gets
/// `passes` independent chances of `p / (n - k - 1)` to be joined.
///
/// The result always contains the ring, so it is connected.
pub fn nws_generate<R: Rng + ?Sized>(params: &NwsParams, rng: &mut R) -> Result<Graph> {
    params.validate()?;
    let mut g = Graph::ring_lattice(params.n, params.k);
    let mut candidates = Vec::new();
    for u in 0..params.n {
        for v in u + 1..params.n {
            if !g.has_edge(u, v) {
                candidates.push((u, v));
            }
        }
    }
    let q = params.shortcut_probability();
    for _ in 0..params.passes {
        for &(u, v) in &candidates {
            if rng.random::<f64>() < q {
                g.add_edge(u, v);
            }
        }
    }
    Ok(g)
}

impl Graph {
    /// Random labeled tree built by attaching each new node to a uniformly
    /// chosen earlier node whose degree is still below `max_degree`.
    pub fn random_tree<R: Rng + ?Sized>(n: usize, max_degree: usize, rng: &mut R) -> Result<Self> {
        if n > 2 && max_degree < 2 {
            return Err(Error::param("trees on more than two nodes need max degree >= 2"));
        }
        if n == 2 && max_degree < 1 {
            return Err(Error::param("max degree must be >= 1"));
        }
        let mut g = Graph::empty(n);
        let mut open: Vec<usize> = Vec::with_capacity(n);
        if n > 0 {
            open.push(0);
        }
        for v in 1..n {
            let i = rng.random_range(0..open.len());
            let parent = open[i];
            g.add_edge(parent, v);
            if g.degree(parent) >= max_degree {
                open.swap_remove(i);
            }
            open.push(v);
        }
        Ok(g)
    }

    /// Adds `count` distinct edges chosen uniformly among current non-edges.
    pub fn add_random_edges<R: Rng + ?Sized>(&mut self, count: usize, rng: &mut R) -> Result<()> {
        let n = self.n();
        let free = n * n.saturating_sub(1) / 2 - self.num_edges();
        if count > free {
            return Err(Error::param(format!("cannot add {count} edges, only {free} non-edges")));
        }
        let mut added = 0;
        while added < count {
            let u = rng.random_range(0..n);
            let v = rng.random_range(0..n);
            if u != v && self.add_edge(u, v) {
                added += 1;
            }
        }
        Ok(())
    }
}
