//! Drawing k-node samples from a host graph and tallying graphettes, orbits and
//! per-node orbit degree vectors.

use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rustc_hash::{FxHashMap, FxHashSet};

use crate::canon::thread_pool;
use crate::error::{Error, Result};
use crate::graphette::MAX_K;
use crate::host::HostGraph;
use crate::store::GraphetteTable;

/// Default cap on `C(n, k)` for [`exhaustive_enumerate`].
pub const DEFAULT_ENUMERATION_BOUND: u128 = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SamplingStrategy {
    /// A uniformly random k-subset.
    Uniform,
    /// Start at a uniform node, then repeatedly add a uniform member of the
    /// neighbor set of the nodes chosen so far. An empty neighbor set falls back
    /// to a uniform unchosen node.
    LocalExpansion,
    /// Seed with both endpoints of a uniform edge, then expand as above.
    EdgeExpansion,
}

impl SamplingStrategy {
    pub fn as_str(self) -> &'static str {
        match self {
            SamplingStrategy::Uniform => "uniform",
            SamplingStrategy::LocalExpansion => "local",
            SamplingStrategy::EdgeExpansion => "edge",
        }
    }
}

impl fmt::Display for SamplingStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SamplingStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "uniform" => Ok(Self::Uniform),
            "local" | "local-expansion" => Ok(Self::LocalExpansion),
            "edge" | "edge-expansion" => Ok(Self::EdgeExpansion),
            other => Err(Error::InvalidArgument(format!(
                "unknown sampling strategy {other:?} (expected uniform, local or edge)"
            ))),
        }
    }
}

/// Reusable sampling state for one host graph, order and strategy.
pub struct SampleDrawer<'g> {
    host: &'g HostGraph,
    k: usize,
    strategy: SamplingStrategy,
    frontier: Vec<u32>,
    in_frontier: FxHashSet<u32>,
}

impl<'g> SampleDrawer<'g> {
    pub fn new(host: &'g HostGraph, k: usize, strategy: SamplingStrategy) -> Result<Self> {
        if k == 0 || k > MAX_K {
            return Err(Error::OrderOutOfRange { k, max: MAX_K });
        }
        if host.node_count() < k {
            return Err(Error::GraphTooSmall {
                n: host.node_count(),
                k,
            });
        }
        if strategy == SamplingStrategy::EdgeExpansion && host.edge_count() == 0 {
            return Err(Error::NoEdges);
        }
        Ok(Self {
            host,
            k,
            strategy,
            frontier: Vec::new(),
            in_frontier: FxHashSet::default(),
        })
    }

    /// Replaces `out` with `k` distinct node labels.
    pub fn draw<R: Rng + ?Sized>(&mut self, rng: &mut R, out: &mut Vec<u32>) {
        out.clear();
        let n = self.host.node_count();
        match self.strategy {
            SamplingStrategy::Uniform => {
                out.extend(index::sample(rng, n, self.k).into_iter().map(|u| u as u32));
            }
            SamplingStrategy::LocalExpansion => {
                self.reset_frontier();
                let start = rng.gen_range(0..n) as u32;
                self.add(start, out);
                self.expand(rng, out);
            }
            SamplingStrategy::EdgeExpansion => {
                self.reset_frontier();
                let edges = self.host.edges();
                let (u, v) = edges[rng.gen_range(0..edges.len())];
                self.add(u, out);
                if self.k > 1 {
                    self.remove_from_frontier(v);
                    self.add(v, out);
                }
                self.expand(rng, out);
            }
        }
    }

    fn reset_frontier(&mut self) {
        self.frontier.clear();
        // a hub can leave a huge table behind; clearing it would cost its capacity every draw
        if self.in_frontier.capacity() > 4096 {
            self.in_frontier = FxHashSet::default();
        } else {
            self.in_frontier.clear();
        }
    }

    fn expand<R: Rng + ?Sized>(&mut self, rng: &mut R, out: &mut Vec<u32>) {
        let n = self.host.node_count();
        while out.len() < self.k {
            let next = if self.frontier.is_empty() {
                loop {
                    let v = rng.gen_range(0..n) as u32;
                    if !out.contains(&v) {
                        break v;
                    }
                }
            } else {
                let v = self.frontier.swap_remove(rng.gen_range(0..self.frontier.len()));
                self.in_frontier.remove(&v);
                v
            };
            self.add(next, out);
        }
    }

    fn remove_from_frontier(&mut self, v: u32) {
        if self.in_frontier.remove(&v) {
            let pos = self.frontier.iter().position(|&w| w == v).unwrap();
            self.frontier.swap_remove(pos);
        }
    }

    fn add(&mut self, v: u32, out: &mut Vec<u32>) {
        out.push(v);
        if out.len() == self.k {
            return;
        }
        for &w in self.host.neighbors(v as usize) {
            if !out.contains(&w) && self.in_frontier.insert(w) {
                self.frontier.push(w);
            }
        }
    }
}

/// One draw of `k` distinct node labels.
pub fn draw_sample<R: Rng + ?Sized>(
    host: &HostGraph,
    k: usize,
    strategy: SamplingStrategy,
    rng: &mut R,
) -> Result<Vec<usize>> {
    let mut out = Vec::with_capacity(k);
    SampleDrawer::new(host, k, strategy)?.draw(rng, &mut out);
    Ok(out.into_iter().map(|u| u as usize).collect())
}

/// Tallies over a sequence of k-node samples.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SampleAccumulator {
    k: usize,
    samples: u64,
    graphette_counts: Vec<u64>,
    orbit_counts: Vec<u64>,
    /// `(node << 32 | global orbit) -> count`
    odv: FxHashMap<u64, u64>,
    seed: Option<u64>,
}

#[inline]
fn odv_key(node: u32, orbit: u32) -> u64 {
    (node as u64) << 32 | orbit as u64
}

impl SampleAccumulator {
    pub fn new(table: &GraphetteTable) -> Self {
        Self {
            k: table.k(),
            samples: 0,
            graphette_counts: vec![0; table.canonical_count()],
            orbit_counts: vec![0; table.total_orbits() as usize],
            odv: FxHashMap::default(),
            seed: None,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn samples(&self) -> u64 {
        self.samples
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn graphette_counts(&self) -> &[u64] {
        &self.graphette_counts
    }

    pub fn orbit_counts(&self) -> &[u64] {
        &self.orbit_counts
    }

    /// How often `node` occupied global orbit `orbit`.
    pub fn odv(&self, node: usize, orbit: u32) -> u64 {
        self.odv.get(&odv_key(node as u32, orbit)).copied().unwrap_or(0)
    }

    /// Nonzero `(node, orbit, count)` entries, sorted by node then orbit.
    pub fn odv_entries(&self) -> Vec<(u32, u32, u64)> {
        let mut out: Vec<_> = self
            .odv
            .iter()
            .map(|(&key, &c)| ((key >> 32) as u32, key as u32, c))
            .collect();
        out.sort_unstable();
        out
    }

    /// Identifies one sample and updates every tally.
    pub fn accumulate(&mut self, host: &HostGraph, nodes: &[usize], table: &GraphetteTable) -> Result<()> {
        if table.k() != self.k || table.canonical_count() != self.graphette_counts.len() {
            return Err(Error::SizeMismatch {
                expected: self.k,
                found: table.k(),
            });
        }
        if nodes.len() != self.k {
            return Err(Error::SizeMismatch {
                expected: self.k,
                found: nodes.len(),
            });
        }
        // validates range and distinctness
        host.induced_bits(nodes)?;
        let nodes: Vec<u32> = nodes.iter().map(|&u| u as u32).collect();
        self.accumulate_unchecked(host, &nodes, table);
        Ok(())
    }

    /// Caller guarantees `nodes` are `k` distinct labels of `host` and `table` has order `k`.
    #[inline]
    pub fn accumulate_unchecked(&mut self, host: &HostGraph, nodes: &[u32], table: &GraphetteTable) {
        let bits = host.induced_raw(nodes) as u64;
        let rec = table.table().record(bits);
        self.graphette_counts[rec.canonical_id() as usize] += 1;
        for (u, &node) in nodes.iter().enumerate() {
            let orbit = table.orbit_of_record(rec, u);
            self.orbit_counts[orbit as usize] += 1;
            *self.odv.entry(odv_key(node, orbit)).or_insert(0) += 1;
        }
        self.samples += 1;
    }

    /// Elementwise sum.
    pub fn merge(&mut self, other: &SampleAccumulator) -> Result<()> {
        if other.k != self.k
            || other.graphette_counts.len() != self.graphette_counts.len()
            || other.orbit_counts.len() != self.orbit_counts.len()
        {
            return Err(Error::SizeMismatch {
                expected: self.k,
                found: other.k,
            });
        }
        self.samples += other.samples;
        for (a, b) in self.graphette_counts.iter_mut().zip(&other.graphette_counts) {
            *a += b;
        }
        for (a, b) in self.orbit_counts.iter_mut().zip(&other.orbit_counts) {
            *a += b;
        }
        for (&key, &c) in &other.odv {
            *self.odv.entry(key).or_insert(0) += c;
        }
        Ok(())
    }
}

/// Draws `samples` samples split across `workers` independent streams.
///
/// Worker `w` uses ChaCha8 seeded with `seed` on stream `w`, so the result
/// depends only on the seed and the worker count.
pub fn sample(
    host: &HostGraph,
    table: &GraphetteTable,
    strategy: SamplingStrategy,
    samples: u64,
    seed: u64,
    workers: usize,
) -> Result<SampleAccumulator> {
    if samples == 0 {
        return Err(Error::InvalidArgument("sample count must be at least 1".into()));
    }
    // surface strategy/graph errors before spawning anything
    SampleDrawer::new(host, table.k(), strategy)?;
    let pool = thread_pool(workers)?;
    let parts: Vec<SampleAccumulator> = pool.install(|| {
        (0..workers)
            .into_par_iter()
            .map(|w| {
                let quota = samples / workers as u64 + u64::from((w as u64) < samples % workers as u64);
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(w as u64);
                let mut drawer = SampleDrawer::new(host, table.k(), strategy).expect("validated above");
                let mut acc = SampleAccumulator::new(table);
                let mut nodes = Vec::with_capacity(table.k());
                for _ in 0..quota {
                    drawer.draw(&mut rng, &mut nodes);
                    acc.accumulate_unchecked(host, &nodes, table);
                }
                acc
            })
            .collect()
    });
    let mut total = SampleAccumulator::new(table).with_seed(seed);
    for part in &parts {
        total.merge(part)?;
    }
    Ok(total)
}

/// `C(n, k)`, saturating at `u128::MAX`.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// Visits every k-subset once, in lexicographic order.
pub fn exhaustive_enumerate(host: &HostGraph, table: &GraphetteTable, bound: u128) -> Result<SampleAccumulator> {
    let n = host.node_count();
    let k = table.k();
    if n < k {
        return Err(Error::GraphTooSmall { n, k });
    }
    let subsets = binomial(n as u64, k as u64);
    if subsets > bound {
        return Err(Error::BoundExceeded { subsets, bound });
    }
    let mut acc = SampleAccumulator::new(table);
    let mut nodes = Vec::with_capacity(k);
    for combo in (0..n as u32).combinations(k) {
        nodes.clear();
        nodes.extend_from_slice(&combo);
        acc.accumulate_unchecked(host, &nodes, table);
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(k: usize) -> GraphetteTable {
        GraphetteTable::build(k, 1, 1).unwrap()
    }

    #[test]
    fn strategy_names() {
        for s in [
            SamplingStrategy::Uniform,
            SamplingStrategy::LocalExpansion,
            SamplingStrategy::EdgeExpansion,
        ] {
            assert_eq!(s.as_str().parse::<SamplingStrategy>().unwrap(), s);
        }
        assert!("bfs".parse::<SamplingStrategy>().is_err());
    }

    #[test]
    fn draws_are_distinct() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let host = HostGraph::erdos_renyi(25, 0.1, &mut rng).unwrap();
        for strategy in [
            SamplingStrategy::Uniform,
            SamplingStrategy::LocalExpansion,
            SamplingStrategy::EdgeExpansion,
        ] {
            for k in 1..=8 {
                for _ in 0..200 {
                    let s = draw_sample(&host, k, strategy, &mut rng).unwrap();
                    assert_eq!(s.len(), k);
                    assert!(s.iter().all_unique());
                    assert!(s.iter().all(|&u| u < 25));
                }
            }
        }
    }

    #[test]
    fn draw_errors() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let small = HostGraph::path(3).unwrap();
        assert!(matches!(
            draw_sample(&small, 4, SamplingStrategy::Uniform, &mut rng),
            Err(Error::GraphTooSmall { n: 3, k: 4 })
        ));
        let empty = HostGraph::empty(10).unwrap();
        assert!(matches!(
            draw_sample(&empty, 3, SamplingStrategy::EdgeExpansion, &mut rng),
            Err(Error::NoEdges)
        ));
        // local expansion still totalizes on an edgeless host
        let s = draw_sample(&empty, 10, SamplingStrategy::LocalExpansion, &mut rng).unwrap();
        assert!(s.iter().all_unique());
    }

    #[test]
    fn complete_host_is_always_triangle() {
        let host = HostGraph::complete(5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for strategy in [
            SamplingStrategy::Uniform,
            SamplingStrategy::LocalExpansion,
            SamplingStrategy::EdgeExpansion,
        ] {
            for _ in 0..50 {
                let s = draw_sample(&host, 3, strategy, &mut rng).unwrap();
                assert_eq!(host.induced_bits(&s).unwrap().bits(), 7);
            }
        }
    }

    #[test]
    fn edgeless_host_uniform_is_empty_graphette() {
        let host = HostGraph::empty(10).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let s = draw_sample(&host, 4, SamplingStrategy::Uniform, &mut rng).unwrap();
            assert_eq!(host.induced_bits(&s).unwrap().bits(), 0);
        }
    }

    #[test]
    fn accumulate_on_complete_host() {
        let t = table(3);
        let host = HostGraph::complete(5).unwrap();
        let mut acc = SampleAccumulator::new(&t);
        acc.accumulate(&host, &[0, 2, 4], &t).unwrap();
        let tri = t.catalog().id_of(7).unwrap();
        assert_eq!(acc.graphette_counts()[tri], 1);
        let orbit = t.orbits().base(tri);
        for node in [0, 2, 4] {
            assert_eq!(acc.odv(node, orbit), 1);
        }
        assert_eq!(acc.odv(1, orbit), 0);
    }

    #[test]
    fn accumulate_path_in_four_cycle() {
        let t = table(3);
        let host = HostGraph::cycle(4).unwrap();
        let mut acc = SampleAccumulator::new(&t);
        acc.accumulate(&host, &[0, 1, 2], &t).unwrap();
        // canonical path is bits=3: edges {1,0},{2,0}, centre node 0
        let path = t.catalog().id_of(3).unwrap();
        assert_eq!(acc.graphette_counts()[path], 1);
        let centre = t.orbits().global_orbit(path, 0);
        let end = t.orbits().global_orbit(path, 1);
        assert_ne!(centre, end);
        assert_eq!(acc.odv(1, centre), 1);
        assert_eq!(acc.odv(0, end), 1);
        assert_eq!(acc.odv(2, end), 1);
    }

    #[test]
    fn accumulate_errors() {
        let t = table(3);
        let host = HostGraph::cycle(4).unwrap();
        let mut acc = SampleAccumulator::new(&t);
        assert!(acc.accumulate(&host, &[0, 1], &t).is_err());
        assert!(acc.accumulate(&host, &[0, 1, 1], &t).is_err());
        assert!(acc.accumulate(&host, &[0, 1, 9], &t).is_err());
        assert!(acc.accumulate(&host, &[0, 1, 2, 3], &table(4)).is_err());
        assert_eq!(acc.samples(), 0);
    }

    #[test]
    fn enumerate_small_hosts() {
        let t = table(3);
        let path = t.catalog().id_of(3).unwrap();
        let tri = t.catalog().id_of(7).unwrap();

        let acc = exhaustive_enumerate(&HostGraph::complete(3).unwrap(), &t, DEFAULT_ENUMERATION_BOUND).unwrap();
        assert_eq!(acc.samples(), 1);
        assert_eq!(acc.graphette_counts()[tri], 1);

        let acc = exhaustive_enumerate(&HostGraph::cycle(4).unwrap(), &t, DEFAULT_ENUMERATION_BOUND).unwrap();
        assert_eq!(acc.samples(), 4);
        assert_eq!(acc.graphette_counts()[path], 4);
        assert_eq!(acc.graphette_counts()[tri], 0);

        let abc = HostGraph::parse_edge_list("a b\nb c\n").unwrap();
        let acc = exhaustive_enumerate(&abc, &t, DEFAULT_ENUMERATION_BOUND).unwrap();
        assert_eq!(acc.graphette_counts()[path], 1);
        assert_eq!(acc.odv(1, t.orbits().global_orbit(path, 0)), 1);
        assert_eq!(acc.odv(0, t.orbits().global_orbit(path, 1)), 1);
        assert_eq!(acc.odv(2, t.orbits().global_orbit(path, 1)), 1);
    }

    #[test]
    fn enumeration_bound() {
        let t = table(3);
        let host = HostGraph::empty(1000).unwrap();
        assert!(matches!(
            exhaustive_enumerate(&host, &t, DEFAULT_ENUMERATION_BOUND),
            Err(Error::BoundExceeded { .. })
        ));
        assert_eq!(binomial(1000, 3), 166_167_000);
        assert_eq!(binomial(30, 4), 27_405);
        assert_eq!(binomial(3, 5), 0);
    }

    #[test]
    fn sampling_is_reproducible() {
        let t = table(4);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let host = HostGraph::erdos_renyi(40, 0.15, &mut rng).unwrap();
        for strategy in [
            SamplingStrategy::Uniform,
            SamplingStrategy::LocalExpansion,
            SamplingStrategy::EdgeExpansion,
        ] {
            let a = sample(&host, &t, strategy, 5000, 99, 3).unwrap();
            let b = sample(&host, &t, strategy, 5000, 99, 3).unwrap();
            assert_eq!(a, b);
            assert_eq!(a.samples(), 5000);
            let c = sample(&host, &t, strategy, 5000, 100, 3).unwrap();
            assert_ne!(a, c);
        }
    }

    #[test]
    fn merge_rejects_other_orders() {
        let mut a = SampleAccumulator::new(&table(3));
        let b = SampleAccumulator::new(&table(4));
        assert!(a.merge(&b).is_err());
    }
}
