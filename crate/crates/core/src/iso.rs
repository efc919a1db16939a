//! Brute-force isomorphism search restricted to degree-preserving assignments.
//!
//! Nodes of the source graph are assigned one at a time, smallest degree class
//! first. A target node is a candidate only if it has the same degree and its
//! adjacency to the already-assigned images matches. The worst case is still
//! `k^2 k!` (regular graphs), but typical graphs prune almost immediately.

use std::ops::ControlFlow;

use crate::error::{Error, Result};
use crate::graphette::{Graphette, MAX_K};
use crate::perm::Permutation;

/// Precomputed neighbor masks and degree classes of one graphette.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Adjacency {
    k: u8,
    rows: [u16; MAX_K],
    degree: [u8; MAX_K],
    /// `by_degree[d]` is the set of nodes with degree `d`.
    by_degree: [u16; MAX_K],
    key: u64,
}

impl Adjacency {
    pub(crate) fn new(g: &Graphette) -> Self {
        let k = g.k();
        let rows = g.rows();
        let mut degree = [0u8; MAX_K];
        let mut by_degree = [0u16; MAX_K];
        for u in 0..k {
            let d = rows[u].count_ones() as usize;
            degree[u] = d as u8;
            by_degree[d] |= 1 << u;
        }
        // sorted degree sequence as a histogram, 4 bits per degree value
        let mut key = k as u64;
        for (d, set) in by_degree.iter().enumerate() {
            key |= (set.count_ones() as u64) << (4 + 4 * d);
        }
        Self {
            k: k as u8,
            rows,
            degree,
            by_degree,
            key,
        }
    }

    /// Equal keys iff equal order and equal degree multiset.
    #[inline]
    pub(crate) fn degree_key(&self) -> u64 {
        self.key
    }

    #[inline]
    pub(crate) fn k(&self) -> usize {
        self.k as usize
    }
}

/// Calls `visit` with every permutation `π` satisfying `apply_permutation(g, π) = h`.
///
/// Both graphs must have the same degree key; otherwise no permutation is reported.
pub(crate) fn for_each_isomorphism<F>(g: &Adjacency, h: &Adjacency, visit: F) -> ControlFlow<()>
where
    F: FnMut(&Permutation) -> ControlFlow<()>,
{
    if g.key != h.key {
        return ControlFlow::Continue(());
    }
    let k = g.k();
    let mut order = [0u8; MAX_K];
    for (slot, u) in order.iter_mut().zip(0..k) {
        *slot = u as u8;
    }
    order[..k].sort_by_key(|&u| (g.by_degree[g.degree[u as usize] as usize].count_ones(), u));
    let mut search = Search {
        g,
        h,
        order,
        map: [0u8; MAX_K],
        used: 0,
        visit,
    };
    search.extend(0)
}

struct Search<'a, F> {
    g: &'a Adjacency,
    h: &'a Adjacency,
    order: [u8; MAX_K],
    map: [u8; MAX_K],
    used: u16,
    visit: F,
}

impl<F> Search<'_, F>
where
    F: FnMut(&Permutation) -> ControlFlow<()>,
{
    fn extend(&mut self, depth: usize) -> ControlFlow<()> {
        let k = self.g.k();
        if depth == k {
            let perm = Permutation::from_raw(k, self.map);
            return (self.visit)(&perm);
        }
        let u = self.order[depth] as usize;
        let mut candidates = self.h.by_degree[self.g.degree[u] as usize] & !self.used;
        while candidates != 0 {
            let v = candidates.trailing_zeros() as usize;
            candidates &= candidates - 1;
            if self.consistent(u, v, depth) {
                self.map[u] = v as u8;
                self.used |= 1 << v;
                self.extend(depth + 1)?;
                self.used &= !(1 << v);
            }
        }
        ControlFlow::Continue(())
    }

    #[inline]
    fn consistent(&self, u: usize, v: usize, depth: usize) -> bool {
        let gu = self.g.rows[u];
        let hv = self.h.rows[v];
        self.order[..depth].iter().all(|&w| {
            let w = w as usize;
            (gu >> w & 1) == (hv >> self.map[w] & 1)
        })
    }
}

pub(crate) fn find_isomorphism(g: &Adjacency, h: &Adjacency) -> Option<Permutation> {
    let mut found = None;
    let _ = for_each_isomorphism(g, h, |p| {
        found = Some(*p);
        ControlFlow::Break(())
    });
    found
}

/// Returns some `π` with `apply_permutation(g, π) = h`, or `None` if the graphettes
/// are not isomorphic. Edge counts and degree sequences are compared before any
/// permutation is tried.
pub fn are_isomorphic(g: &Graphette, h: &Graphette) -> Result<Option<Permutation>> {
    if g.k() != h.k() {
        return Err(Error::SizeMismatch {
            expected: g.k(),
            found: h.k(),
        });
    }
    if g.edge_count() != h.edge_count() {
        return Ok(None);
    }
    let (ga, ha) = (Adjacency::new(g), Adjacency::new(h));
    if ga.degree_key() != ha.degree_key() {
        return Ok(None);
    }
    Ok(find_isomorphism(&ga, &ha))
}
