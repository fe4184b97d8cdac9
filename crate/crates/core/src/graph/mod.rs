//! Undirected simple graphs: construction, statistics, fingerprints,
//! reordering and connected-subgraph sampling.

mod generate;
mod order;
mod subgraph;

use std::collections::VecDeque;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub use generate::{nws_expected_edges, nws_generate, NwsParams};
pub use order::{bandwidth, rcm_order};
pub use subgraph::sample_connected_subgraph;

/// An undirected simple graph on nodes `0..n`.
///
/// Adjacency lists are kept sorted, which makes edge lookup a binary search
/// and gives every traversal a canonical order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
    num_edges: usize,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Graph {
            adj: vec![Vec::new(); n],
            num_edges: 0,
        }
    }

    /// Builds a graph from an edge list, rejecting self-loops, duplicates and
    /// out-of-range labels.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut g = Graph::empty(n);
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::param(format!("edge ({u},{v}) out of range for {n} nodes")));
            }
            if u == v {
                return Err(Error::param(format!("self-loop at node {u}")));
            }
            if !g.add_edge(u, v) {
                return Err(Error::param(format!("duplicate edge ({u},{v})")));
            }
        }
        Ok(g)
    }

    /// Inserts `{u, v}`; returns false if it was already present.
    pub(crate) fn add_edge(&mut self, u: usize, v: usize) -> bool {
        debug_assert!(u != v);
        match self.adj[u].binary_search(&v) {
            Ok(_) => false,
            Err(pos) => {
                self.adj[u].insert(pos, v);
                let pos = self.adj[v].binary_search(&u).unwrap_err();
                self.adj[v].insert(pos, u);
                self.num_edges += 1;
                true
            }
        }
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn num_edges(&self) -> usize {
        self.num_edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, nb)| nb.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    /// Ring on `n` nodes where every node is joined to its `k` nearest
    /// neighbours (`k / 2` on each side).
    pub fn ring_lattice(n: usize, k: usize) -> Self {
        let mut g = Graph::empty(n);
        for u in 0..n {
            for j in 1..=k / 2 {
                let v = (u + j) % n;
                if u != v {
                    g.add_edge(u, v);
                }
            }
        }
        g
    }

    pub fn cycle(n: usize) -> Self {
        Graph::ring_lattice(n, 2)
    }

    pub fn path(n: usize) -> Self {
        let mut g = Graph::empty(n);
        for u in 1..n {
            g.add_edge(u - 1, u);
        }
        g
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Graph::empty(n);
        for u in 0..n {
            for v in u + 1..n {
                g.add_edge(u, v);
            }
        }
        g
    }

    /// Star with the center at node 0.
    pub fn star(n: usize) -> Self {
        let mut g = Graph::empty(n);
        for v in 1..n {
            g.add_edge(0, v);
        }
        g
    }

    /// `rows x cols` grid, node `(i, j)` labeled `i * cols + j`.
    pub fn grid(rows: usize, cols: usize) -> Self {
        let mut g = Graph::empty(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                let v = i * cols + j;
                if j + 1 < cols {
                    g.add_edge(v, v + 1);
                }
                if i + 1 < rows {
                    g.add_edge(v, v + cols);
                }
            }
        }
        g
    }

    /// Subgraph induced by `nodes`, relabeled so that `nodes[i]` becomes `i`.
    pub fn induced(&self, nodes: &[usize]) -> Self {
        let mut local = vec![usize::MAX; self.n()];
        for (i, &v) in nodes.iter().enumerate() {
            local[v] = i;
        }
        let mut g = Graph::empty(nodes.len());
        for (i, &v) in nodes.iter().enumerate() {
            for &u in &self.adj[v] {
                let j = local[u];
                if j != usize::MAX && i < j {
                    g.add_edge(i, j);
                }
            }
        }
        g
    }

    /// Relabels node `v` as `perm[v]`.
    pub fn permute(&self, perm: &[usize]) -> Result<Self> {
        check_permutation(perm, self.n())?;
        let mut g = Graph::empty(self.n());
        for (u, v) in self.edges() {
            g.add_edge(perm[u], perm[v]);
        }
        Ok(g)
    }

    pub fn is_connected(&self) -> bool {
        if self.n() == 0 {
            return true;
        }
        bfs_distances(self, 0).iter().all(|&d| d != usize::MAX)
    }

    /// Isomorphism-invariant digest built from the sorted degree sequence,
    /// the sorted multiset of sorted neighbour-degree lists, and the edge
    /// count.
    ///
    /// Isomorphic graphs always share a digest. Distinct digests prove
    /// non-isomorphism; equal digests of non-isomorphic graphs are possible
    /// but rare.
    pub fn fingerprint(&self) -> Fingerprint {
        let deg: Vec<usize> = (0..self.n()).map(|v| self.degree(v)).collect();
        let mut degrees = deg.clone();
        degrees.sort_unstable();
        let mut profiles: Vec<Vec<usize>> = (0..self.n())
            .map(|v| {
                let mut p: Vec<usize> = self.adj[v].iter().map(|&u| deg[u]).collect();
                p.sort_unstable();
                p
            })
            .collect();
        profiles.sort_unstable();

        let mut h = Sha256::new();
        h.update((self.n() as u64).to_le_bytes());
        h.update((self.num_edges as u64).to_le_bytes());
        for d in &degrees {
            h.update((*d as u64).to_le_bytes());
        }
        for p in &profiles {
            h.update((p.len() as u64).to_le_bytes());
            for d in p {
                h.update((*d as u64).to_le_bytes());
            }
        }
        let out = h.finalize();
        let mut bytes = [0u8; 8];
        bytes.copy_from_slice(&out[..8]);
        Fingerprint(u64::from_le_bytes(bytes))
    }

    pub fn features(&self) -> Result<GraphFeatures> {
        graph_features(self)
    }

    /// Writes the edge-list format: a header line `n m`, then one `u v` line
    /// per edge.
    pub fn write_edge_list<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{} {}", self.n(), self.num_edges)?;
        for (u, v) in self.edges() {
            writeln!(w, "{u} {v}")?;
        }
        Ok(())
    }

    pub fn read_edge_list<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines().filter(|l| l.as_ref().map_or(true, |s| !s.trim().is_empty()));
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("missing header line".into()))??;
        let (n, m) = parse_pair(&header)?;
        let mut edges = Vec::with_capacity(m);
        for line in lines {
            edges.push(parse_pair(&line?)?);
        }
        if edges.len() != m {
            return Err(Error::Parse(format!("header declares {m} edges, found {}", edges.len())));
        }
        Graph::from_edges(n, edges)
    }
}

fn parse_pair(line: &str) -> Result<(usize, usize)> {
    let mut it = line.split_whitespace().map(str::parse::<usize>);
    match (it.next(), it.next(), it.next()) {
        (Some(Ok(a)), Some(Ok(b)), None) => Ok((a, b)),
        _ => Err(Error::Parse(format!("expected two integers, got {line:?}"))),
    }
}

pub(crate) fn check_permutation(perm: &[usize], n: usize) -> Result<()> {
    if perm.len() != n {
        return Err(Error::SizeMismatch {
            expected: n,
            actual: perm.len(),
        });
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || seen[p] {
            return Err(Error::param("not a permutation"));
        }
        seen[p] = true;
    }
    Ok(())
}

/// Digest returned by [`Graph::fingerprint`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Fingerprint(pub u64);

/// The five summary statistics used as classifier inputs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphFeatures {
    pub num_edges: usize,
    pub min_degree: usize,
    pub max_degree: usize,
    pub diameter: usize,
    pub num_nodes: usize,
}

impl GraphFeatures {
    pub const NAMES: [&'static str; 5] = ["num_edges", "min_degree", "max_degree", "diameter", "num_nodes"];

    pub fn to_array(&self) -> [f64; 5] {
        [
            self.num_edges as f64,
            self.min_degree as f64,
            self.max_degree as f64,
            self.diameter as f64,
            self.num_nodes as f64,
        ]
    }
}

pub(crate) fn bfs_distances(g: &Graph, source: usize) -> Vec<usize> {
    let mut dist = vec![usize::MAX; g.n()];
    let mut queue = VecDeque::new();
    dist[source] = 0;
    queue.push_back(source);
    while let Some(v) = queue.pop_front() {
        for &u in g.neighbors(v) {
            if dist[u] == usize::MAX {
                dist[u] = dist[v] + 1;
                queue.push_back(u);
            }
        }
    }
    dist
}

/// Edge count, degree extremes, diameter (maximum BFS eccentricity) and node
/// count of a connected graph.
pub fn graph_features(g: &Graph) -> Result<GraphFeatures> {
    if g.n() == 0 {
        return Err(Error::EmptyData("graph has no nodes".into()));
    }
    let mut diameter = 0;
    for s in 0..g.n() {
        let dist = bfs_distances(g, s);
        for d in dist {
            if d == usize::MAX {
                return Err(Error::Disconnected);
            }
            diameter = diameter.max(d);
        }
    }
    let degrees = (0..g.n()).map(|v| g.degree(v));
    Ok(GraphFeatures {
        num_edges: g.num_edges(),
        min_degree: degrees.clone().min().unwrap_or(0),
        max_degree: degrees.max().unwrap_or(0),
        diameter,
        num_nodes: g.n(),
    })
}
