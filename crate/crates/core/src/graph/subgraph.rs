use rand::Rng;

use super::Graph;
use crate::error::{Error, Result};

/// Grows a connected node set of size `n0` from a uniform start node by
/// repeatedly adding a uniformly chosen node of the current frontier.
///
/// Returns the node set in ascending label order together with the induced
/// subgraph, whose node `i` is the `i`-th entry of that set. With `n0 == n`
/// the result is the whole graph with its original labels.
pub fn sample_connected_subgraph<R: Rng + ?Sized>(
    g: &Graph,
    n0: usize,
    rng: &mut R,
) -> Result<(Vec<usize>, Graph)> {
    let n = g.n();
    if n0 == 0 || n0 > n {
        return Err(Error::param(format!("subgraph size {n0} must be in 1..={n}")));
    }
    if n0 == n {
        if !g.is_connected() {
            return Err(Error::Disconnected);
        }
        return Ok(((0..n).collect(), g.clone()));
    }

    let mut in_set = vec![false; n];
    let mut in_frontier = vec![false; n];
    let mut frontier = Vec::new();
    let mut nodes = Vec::with_capacity(n0);

    let mut next = rng.random_range(0..n);
    loop {
        in_set[next] = true;
        nodes.push(next);
        if nodes.len() == n0 {
            break;
        }
        for &u in g.neighbors(next) {
            if !in_set[u] && !in_frontier[u] {
                in_frontier[u] = true;
                frontier.push(u);
            }
        }
        if frontier.is_empty() {
            return Err(Error::Disconnected);
        }
        let i = rng.random_range(0..frontier.len());
        next = frontier.swap_remove(i);
        in_frontier[next] = false;
    }

    nodes.sort_unstable();
    let sub = g.induced(&nodes);
    Ok((nodes, sub))
}
