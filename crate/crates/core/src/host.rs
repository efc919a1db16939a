use std::path::Path;

use rand::Rng;
use rustc_hash::{FxHashMap, FxHashSet};

use crate::error::{Error, Result};
use crate::graphette::{bit_position, Graphette, MAX_K};

/// Large undirected simple graph that samples are drawn from.
///
/// Neighbor lists are stored in CSR form; edge tests go through a hash set, so
/// the cost of [`HostGraph::induced_bits`] does not depend on the graph size.
#[derive(Clone, Debug)]
pub struct HostGraph {
    names: Vec<String>,
    offsets: Vec<usize>,
    targets: Vec<u32>,
    edges: Vec<(u32, u32)>,
    edge_set: FxHashSet<u64>,
}

#[inline]
fn edge_key(u: u32, v: u32) -> u64 {
    let (lo, hi) = if u < v { (u, v) } else { (v, u) };
    (hi as u64) << 32 | lo as u64
}

impl HostGraph {
    /// Nodes are named `0..n`. Duplicate edges collapse; self-loops are rejected.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        Self::build((0..n).map(|i| i.to_string()).collect(), edges)
    }

    fn build<I>(names: Vec<String>, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let n = names.len();
        if n > u32::MAX as usize {
            return Err(Error::InvalidArgument(format!("{n} nodes exceed the u32 label space")));
        }
        let mut edge_set = FxHashSet::default();
        let mut edge_list = Vec::new();
        for (u, v) in edges {
            for node in [u, v] {
                if node >= n {
                    return Err(Error::NodeOutOfRange { node, n });
                }
            }
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            let (u, v) = (u as u32, v as u32);
            if edge_set.insert(edge_key(u, v)) {
                edge_list.push((u.min(v), u.max(v)));
            }
        }
        let mut degree = vec![0usize; n];
        for &(u, v) in &edge_list {
            degree[u as usize] += 1;
            degree[v as usize] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut fill = offsets[..n].to_vec();
        let mut targets = vec![0u32; offsets[n]];
        for &(u, v) in &edge_list {
            targets[fill[u as usize]] = v;
            fill[u as usize] += 1;
            targets[fill[v as usize]] = u;
            fill[v as usize] += 1;
        }
        for u in 0..n {
            targets[offsets[u]..offsets[u + 1]].sort_unstable();
        }
        Ok(Self {
            names,
            offsets,
            targets,
            edges: edge_list,
            edge_set,
        })
    }

    /// Parses whitespace-separated node-pair lines. Blank lines and lines starting
    /// with `#` are skipped. Names are interned in order of first appearance.
    pub fn parse_edge_list(text: &str) -> Result<Self> {
        let mut ids: FxHashMap<&str, usize> = FxHashMap::default();
        let mut names = Vec::new();
        let mut edges = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line_no = lineno + 1;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut fields = line.split_whitespace();
            let (Some(a), Some(b), None) = (fields.next(), fields.next(), fields.next()) else {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("expected two node names, found {line:?}"),
                });
            };
            if a == b {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("self-loop on node {a:?}"),
                });
            }
            let a = intern(&mut ids, &mut names, a);
            let b = intern(&mut ids, &mut names, b);
            edges.push((a, b));
        }
        if names.is_empty() {
            return Err(Error::EmptyGraph);
        }
        Self::build(names, edges)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse_edge_list(&std::fs::read_to_string(path)?)
    }

    pub fn empty(n: usize) -> Result<Self> {
        Self::from_edges(n, [])
    }

    pub fn complete(n: usize) -> Result<Self> {
        Self::from_edges(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))))
    }

    pub fn path(n: usize) -> Result<Self> {
        Self::from_edges(n, (1..n).map(|u| (u - 1, u)))
    }

    pub fn cycle(n: usize) -> Result<Self> {
        Self::from_edges(n, (0..n).map(|u| (u, (u + 1) % n)))
    }

    /// G(n, p): every pair is an edge independently with probability `p`.
    pub fn erdos_renyi<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidArgument(format!("edge probability {p} outside [0, 1]")));
        }
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if rng.gen_bool(p) {
                    edges.push((u, v));
                }
            }
        }
        Self::from_edges(n, edges)
    }

    /// Random graph with `m` distinct edges drawn uniformly; cheap for large sparse hosts.
    pub fn random_sparse<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> Result<Self> {
        if n < 2 || m as u128 > n as u128 * (n as u128 - 1) / 2 {
            return Err(Error::InvalidArgument(format!("cannot place {m} edges on {n} nodes")));
        }
        let mut seen = FxHashSet::default();
        let mut edges = Vec::with_capacity(m);
        while edges.len() < m {
            let u = rng.gen_range(0..n);
            let v = rng.gen_range(0..n);
            if u != v && seen.insert(edge_key(u as u32, v as u32)) {
                edges.push((u, v));
            }
        }
        Self::from_edges(n, edges)
    }

    #[inline]
    pub fn node_count(&self) -> usize {
        self.names.len()
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u != v && self.edge_set.contains(&edge_key(u as u32, v as u32))
    }

    #[inline]
    pub fn neighbors(&self, u: usize) -> &[u32] {
        &self.targets[self.offsets[u]..self.offsets[u + 1]]
    }

    #[inline]
    pub fn degree(&self, u: usize) -> usize {
        self.offsets[u + 1] - self.offsets[u]
    }

    /// Edges as `(u, v)` with `u < v`, in first-seen order.
    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn name(&self, u: usize) -> &str {
        &self.names[u]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// Subgraph induced on `nodes`, position `i` becoming graphette node `i`.
    pub fn induced_bits(&self, nodes: &[usize]) -> Result<Graphette> {
        let k = nodes.len();
        if k == 0 || k > MAX_K {
            return Err(Error::OrderOutOfRange { k, max: MAX_K });
        }
        for (i, &u) in nodes.iter().enumerate() {
            if u >= self.node_count() {
                return Err(Error::NodeOutOfRange {
                    node: u,
                    n: self.node_count(),
                });
            }
            if nodes[..i].contains(&u) {
                return Err(Error::DuplicateNode(u));
            }
        }
        let nodes: Vec<u32> = nodes.iter().map(|&u| u as u32).collect();
        Ok(Graphette::from_raw(k, self.induced_raw(&nodes)))
    }

    /// `k(k-1)/2` edge tests, no validation.
    #[inline]
    pub(crate) fn induced_raw(&self, nodes: &[u32]) -> u128 {
        let mut bits = 0u128;
        for i in 1..nodes.len() {
            for j in 0..i {
                if self.edge_set.contains(&edge_key(nodes[i], nodes[j])) {
                    bits |= 1u128 << bit_position(i, j);
                }
            }
        }
        bits
    }
}

fn intern<'t>(ids: &mut FxHashMap<&'t str, usize>, names: &mut Vec<String>, name: &'t str) -> usize {
    *ids.entry(name).or_insert_with(|| {
        names.push(name.to_string());
        names.len() - 1
    })
}
