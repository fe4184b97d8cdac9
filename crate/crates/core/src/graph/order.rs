use std::collections::VecDeque;

use super::{check_permutation, Graph};
use crate::error::Result;

/// Reverse Cuthill-McKee ordering. Entry `i` of the result is the node placed
/// at position `i`.
///
/// Each component is traversed breadth-first from its minimum-degree node,
/// visiting neighbours in increasing degree (ties by label); the final
/// sequence is reversed.
pub fn rcm_order(g: &Graph) -> Vec<usize> {
    let n = g.n();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut by_degree: Vec<usize> = (0..n).collect();
    by_degree.sort_by_key(|&v| (g.degree(v), v));

    let mut queue = VecDeque::new();
    let mut scratch = Vec::new();
    for &start in &by_degree {
        if visited[start] {
            continue;
        }
        visited[start] = true;
        queue.push_back(start);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            scratch.clear();
            scratch.extend(g.neighbors(v).iter().copied().filter(|&u| !visited[u]));
            scratch.sort_by_key(|&u| (g.degree(u), u));
            for &u in &scratch {
                visited[u] = true;
                queue.push_back(u);
            }
        }
    }
    order.reverse();
    order
}

/// Largest position gap across an edge when nodes are laid out in `order`.
pub fn bandwidth(g: &Graph, order: &[usize]) -> Result<usize> {
    check_permutation(order, g.n())?;
    let mut pos = vec![0; g.n()];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    Ok(g.edges().map(|(u, v)| pos[u].abs_diff(pos[v])).max().unwrap_or(0))
}
