//! Automorphism groups and automorphism orbits.
//!
//! Orbits are found in three steps: generate every automorphism, split each
//! into its cycles, then merge cycles by repeatedly coloring every node of a
//! cycle with the smallest color in it until no color changes. Each orbit ends
//! up labelled by its smallest node.

use std::ops::ControlFlow;

use rayon::prelude::*;

use crate::canon::CanonicalCatalog;
use crate::error::{Error, Result};
use crate::graphette::{Graphette, MAX_K};
use crate::iso::{for_each_isomorphism, Adjacency};
use crate::perm::Permutation;

/// Largest order accepted by [`generate_automorphisms`]. `10!` permutations is
/// the most an edgeless or complete graph can produce.
pub const MAX_AUTOMORPHISM_K: usize = 10;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AutomorphismSet {
    graphette: Graphette,
    perms: Vec<Permutation>,
}

impl AutomorphismSet {
    pub fn graphette(&self) -> &Graphette {
        &self.graphette
    }

    pub fn perms(&self) -> &[Permutation] {
        &self.perms
    }

    pub fn len(&self) -> usize {
        self.perms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perms.is_empty()
    }

    pub fn contains(&self, perm: &Permutation) -> bool {
        self.perms.contains(perm)
    }
}

/// Every permutation fixing `g`.
///
/// Only degree-preserving assignments are explored, and the search runs on
/// whichever of `g` and its complement has fewer edges (both have the same
/// automorphisms).
pub fn generate_automorphisms(g: &Graphette) -> Result<AutomorphismSet> {
    if g.k() > MAX_AUTOMORPHISM_K {
        return Err(Error::OrderOutOfRange {
            k: g.k(),
            max: MAX_AUTOMORPHISM_K,
        });
    }
    let complement = g.complement();
    let sparse = if complement.edge_count() < g.edge_count() {
        complement
    } else {
        *g
    };
    let adj = Adjacency::new(&sparse);
    let mut perms = Vec::new();
    let _ = for_each_isomorphism(&adj, &adj, |p| {
        perms.push(*p);
        ControlFlow::Continue(())
    });
    Ok(AutomorphismSet { graphette: *g, perms })
}

/// Disjoint cycles of one permutation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleSet {
    cycles: Vec<Vec<usize>>,
}

impl CycleSet {
    pub fn cycles(&self) -> &[Vec<usize>] {
        &self.cycles
    }

    pub fn len(&self) -> usize {
        self.cycles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cycles.is_empty()
    }

    pub fn into_inner(self) -> Vec<Vec<usize>> {
        self.cycles
    }
}

/// Cycles `(u, π(u), π²(u), ..)` started from each unvisited node in ascending order.
pub fn split_cycles(perm: &Permutation) -> CycleSet {
    let k = perm.len();
    let mut visited = [false; MAX_K];
    let mut cycles = Vec::new();
    for u in 0..k {
        if visited[u] {
            continue;
        }
        visited[u] = true;
        let mut cycle = vec![u];
        let mut v = perm.image(u);
        while v != u {
            cycle.push(v);
            visited[v] = true;
            v = perm.image(v);
        }
        cycles.push(cycle);
    }
    CycleSet { cycles }
}

/// Orbit label of every node. A label is the smallest node index in its orbit.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct OrbitPartition {
    k: u8,
    orbit_of: [u8; MAX_K],
    /// Rank of each node's orbit among the orbits ordered by label.
    rank: [u8; MAX_K],
    orbit_count: u8,
}

impl OrbitPartition {
    /// Accepts labels only if each is the smallest member of its class.
    pub fn from_labels(labels: &[usize]) -> Result<Self> {
        let k = labels.len();
        if k == 0 || k > MAX_K {
            return Err(Error::OrderOutOfRange { k, max: MAX_K });
        }
        let mut orbit_of = [0u8; MAX_K];
        for (u, &l) in labels.iter().enumerate() {
            if l > u || labels[l] != l {
                return Err(Error::InvalidArgument(format!(
                    "orbit label {l} of node {u} is not the smallest member of its orbit"
                )));
            }
            orbit_of[u] = l as u8;
        }
        Ok(Self::from_raw(k, orbit_of))
    }

    fn from_raw(k: usize, mut orbit_of: [u8; MAX_K]) -> Self {
        orbit_of[k..].fill(0);
        let mut rank_of_label = [0u8; MAX_K];
        let mut count = 0u8;
        for u in 0..k {
            if orbit_of[u] as usize == u {
                rank_of_label[u] = count;
                count += 1;
            }
        }
        let mut rank = [0u8; MAX_K];
        for u in 0..k {
            rank[u] = rank_of_label[orbit_of[u] as usize];
        }
        Self {
            k: k as u8,
            orbit_of,
            rank,
            orbit_count: count,
        }
    }

    pub fn k(&self) -> usize {
        self.k as usize
    }

    #[inline]
    pub fn orbit_of(&self, u: usize) -> usize {
        self.orbit_of[u] as usize
    }

    /// Position of `u`'s orbit when the orbits are sorted by label.
    #[inline]
    pub fn orbit_rank(&self, u: usize) -> usize {
        self.rank[u] as usize
    }

    pub fn labels(&self) -> &[u8] {
        &self.orbit_of[..self.k()]
    }

    pub fn orbit_count(&self) -> usize {
        self.orbit_count as usize
    }

    /// Members of each orbit, orbits ordered by label.
    pub fn orbits(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.orbit_count()];
        for u in 0..self.k() {
            out[self.orbit_rank(u)].push(u);
        }
        out
    }
}

impl std::fmt::Debug for OrbitPartition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "OrbitPartition{:?}", self.labels())
    }
}

/// Merges the cycles of every automorphism into orbits.
pub fn enumerate_orbits(g: &Graphette, auts: &AutomorphismSet) -> Result<OrbitPartition> {
    if auts.graphette != *g {
        return Err(Error::MismatchedAutomorphisms);
    }
    let k = g.k();
    let cycles: Vec<Vec<usize>> = auts
        .perms
        .iter()
        .flat_map(|p| split_cycles(p).into_inner())
        .filter(|c| c.len() > 1)
        .collect();
    let mut color: [u8; MAX_K] = std::array::from_fn(|u| u as u8);
    loop {
        let mut changed = false;
        for cycle in &cycles {
            let min = cycle.iter().map(|&u| color[u]).min().unwrap_or(0);
            for &u in cycle {
                if color[u] != min {
                    color[u] = min;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    Ok(OrbitPartition::from_raw(k, color))
}

/// Automorphisms and orbits in one call.
pub fn orbit_partition(g: &Graphette) -> Result<OrbitPartition> {
    let auts = generate_automorphisms(g)?;
    enumerate_orbits(g, &auts)
}

/// Fills the catalog's orbit partitions, one canonical per task.
pub fn compute_catalog_orbits(catalog: &mut CanonicalCatalog) -> Result<()> {
    let k = catalog.k();
    catalog.orbit_partitions = catalog
        .canonicals
        .par_iter()
        .map(|&bits| orbit_partition(&Graphette::from_raw(k, bits as u128)))
        .collect::<Result<Vec<_>>>()?;
    Ok(())
}

/// Global orbit numbering: canonicals in ID order, orbits within each by label.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GlobalOrbitIndex {
    base: Vec<u32>,
    ranks: Vec<[u8; MAX_K]>,
    total: u32,
}

impl GlobalOrbitIndex {
    /// Global ID of the orbit holding node `node` of canonical `canonical_id`.
    #[inline]
    pub fn global_orbit(&self, canonical_id: usize, node: usize) -> u32 {
        self.base[canonical_id] + self.ranks[canonical_id][node] as u32
    }

    pub fn base(&self, canonical_id: usize) -> u32 {
        self.base[canonical_id]
    }

    pub fn bases(&self) -> &[u32] {
        &self.base
    }

    pub fn total(&self) -> u32 {
        self.total
    }

    /// Canonical ID owning a global orbit.
    pub fn canonical_of(&self, orbit: u32) -> usize {
        self.base.partition_point(|&b| b <= orbit) - 1
    }
}

pub fn assign_global_orbit_ids(catalog: &CanonicalCatalog) -> Result<GlobalOrbitIndex> {
    if catalog.orbit_partitions.len() != catalog.len() {
        return Err(Error::MissingOrbits {
            expected: catalog.len(),
            found: catalog.orbit_partitions.len(),
        });
    }
    let mut base = Vec::with_capacity(catalog.len());
    let mut ranks = Vec::with_capacity(catalog.len());
    let mut total = 0u32;
    for part in &catalog.orbit_partitions {
        base.push(total);
        ranks.push(part.rank);
        total += part.orbit_count() as u32;
    }
    Ok(GlobalOrbitIndex { base, ranks, total })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(k: usize, bits: u128) -> Graphette {
        Graphette::new(k, bits).unwrap()
    }

    fn perm(images: &[usize]) -> Permutation {
        Permutation::from_images(images).unwrap()
    }

    #[test]
    fn triangle_and_one_edge() {
        assert_eq!(generate_automorphisms(&g(3, 7)).unwrap().len(), 6);
        let auts = generate_automorphisms(&g(3, 1)).unwrap();
        assert_eq!(auts.len(), 2);
        assert!(auts.contains(&perm(&[0, 1, 2])));
        assert!(auts.contains(&perm(&[1, 0, 2])));
    }

    #[test]
    fn order_bound() {
        assert!(generate_automorphisms(&g(11, 0)).is_err());
    }

    #[test]
    fn split_examples() {
        let c = split_cycles(&perm(&[2, 0, 1, 3, 5, 4]));
        assert_eq!(c.cycles(), &[vec![0, 2, 1], vec![3], vec![4, 5]]);
        assert_eq!(split_cycles(&perm(&[0, 1, 2, 3])).len(), 4);
        assert_eq!(split_cycles(&perm(&[1, 0])).cycles(), &[vec![0, 1]]);
    }

    #[test]
    fn orbit_examples() {
        let p = orbit_partition(&g(3, 1)).unwrap();
        assert_eq!(p.labels(), &[0, 0, 2]);
        assert_eq!(p.orbit_count(), 2);
        assert_eq!(p.orbits(), vec![vec![0, 1], vec![2]]);
        assert_eq!(orbit_partition(&g(3, 7)).unwrap().orbit_count(), 1);
        for k in 1..=7 {
            assert_eq!(orbit_partition(&g(k, 0)).unwrap().orbit_count(), 1);
        }
    }

    #[test]
    fn mismatched_automorphisms() {
        let auts = generate_automorphisms(&g(3, 1)).unwrap();
        assert!(matches!(
            enumerate_orbits(&g(3, 3), &auts),
            Err(Error::MismatchedAutomorphisms)
        ));
    }

    #[test]
    fn labels_must_be_minimal() {
        assert!(OrbitPartition::from_labels(&[0, 0, 2]).is_ok());
        assert!(OrbitPartition::from_labels(&[1, 1, 2]).is_err());
        assert!(OrbitPartition::from_labels(&[0, 2, 2]).is_err());
        assert!(OrbitPartition::from_labels(&[]).is_err());
    }

    #[test]
    fn missing_partitions() {
        let (cat, _) = crate::canon::build_canonical_map_sequential(3).unwrap();
        assert!(matches!(
            assign_global_orbit_ids(&cat),
            Err(Error::MissingOrbits { expected: 4, found: 0 })
        ));
    }

    #[test]
    fn order_three_numbering() {
        let (mut cat, _) = crate::canon::build_canonical_map_sequential(3).unwrap();
        compute_catalog_orbits(&mut cat).unwrap();
        let idx = assign_global_orbit_ids(&cat).unwrap();
        assert_eq!(idx.total(), 6);
        assert_eq!(idx.bases(), &[0, 1, 3, 5]);
        assert_eq!(idx.canonical_of(0), 0);
        assert_eq!(idx.canonical_of(2), 1);
        assert_eq!(idx.canonical_of(5), 3);
    }
}
