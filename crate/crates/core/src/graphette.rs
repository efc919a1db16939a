//! Bit-vector encoding of small undirected graphs.
//!
//! A graphette on `k` nodes is stored as the lower triangle of its adjacency
//! matrix packed into `b(k) = k(k-1)/2` bits. Edge `{i, j}` with `i > j` lives
//! at bit `i(i-1)/2 + j`, least significant bit first.

use std::fmt;

use crate::error::{Error, Result};
use crate::perm::Permutation;

/// Largest order the [`Graphette`] type can represent (`b(12) = 66` bits).
pub const MAX_K: usize = 12;

/// Number of bits in the lower-triangle encoding of a `k`-node graph.
#[inline]
pub const fn bit_len(k: usize) -> usize {
    k * k.saturating_sub(1) / 2
}

/// Bit position of edge `{i, j}`. Order of the endpoints does not matter.
#[inline]
pub const fn bit_position(i: usize, j: usize) -> usize {
    let (hi, lo) = if i > j { (i, j) } else { (j, i) };
    hi * (hi - 1) / 2 + lo
}

/// Inverse of [`bit_position`]: `(i, j)` with `i > j` for every position below `b(MAX_K)`.
const PAIRS: [(u8, u8); bit_len(MAX_K)] = {
    let mut out = [(0u8, 0u8); bit_len(MAX_K)];
    let mut i = 1;
    let mut p = 0;
    while i < MAX_K {
        let mut j = 0;
        while j < i {
            out[p] = (i as u8, j as u8);
            p += 1;
            j += 1;
        }
        i += 1;
    }
    out
};

#[inline]
pub(crate) fn pair_at(position: usize) -> (usize, usize) {
    let (i, j) = PAIRS[position];
    (i as usize, j as usize)
}

#[inline]
fn mask(k: usize) -> u128 {
    let b = bit_len(k);
    if b == 0 {
        0
    } else {
        u128::MAX >> (128 - b)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Graphette {
    k: u8,
    bits: u128,
}

impl Graphette {
    pub fn new(k: usize, bits: u128) -> Result<Self> {
        check_order(k)?;
        if bits & !mask(k) != 0 {
            return Err(Error::BitsOutOfRange {
                k,
                bits,
                bit_len: bit_len(k),
            });
        }
        Ok(Self { k: k as u8, bits })
    }

    #[inline]
    pub(crate) fn from_raw(k: usize, bits: u128) -> Self {
        debug_assert!(k <= MAX_K && bits & !mask(k) == 0);
        Self { k: k as u8, bits }
    }

    pub fn empty(k: usize) -> Result<Self> {
        Self::new(k, 0)
    }

    pub fn complete(k: usize) -> Result<Self> {
        check_order(k)?;
        Ok(Self::from_raw(k, mask(k)))
    }

    /// Sets bit `p(i, j)` for every listed pair.
    pub fn encode<I>(k: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        check_order(k)?;
        let mut bits = 0u128;
        for (a, b) in edges {
            for node in [a, b] {
                if node >= k {
                    return Err(Error::NodeOutOfRange { node, n: k });
                }
            }
            if a == b {
                return Err(Error::SelfLoop(a));
            }
            bits |= 1u128 << bit_position(a, b);
        }
        Ok(Self::from_raw(k, bits))
    }

    /// Edge list `(i, j)` with `i > j`, in bit-position order.
    pub fn decode(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count());
        let mut rest = self.bits;
        while rest != 0 {
            out.push(pair_at(rest.trailing_zeros() as usize));
            rest &= rest - 1;
        }
        out
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.k as usize
    }

    #[inline]
    pub fn bits(&self) -> u128 {
        self.bits
    }

    #[inline]
    pub fn bit_len(&self) -> usize {
        bit_len(self.k())
    }

    #[inline]
    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        i != j && i < self.k() && j < self.k() && self.bits >> bit_position(i, j) & 1 == 1
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.bits.count_ones() as usize
    }

    /// Relabels node `u` as `π(u)`: the result has edge `{π(u), π(v)}` iff `{u, v}` is an edge here.
    pub fn apply_permutation(&self, perm: &Permutation) -> Result<Self> {
        if perm.len() != self.k() {
            return Err(Error::SizeMismatch {
                expected: self.k(),
                found: perm.len(),
            });
        }
        Ok(self.permuted(perm))
    }

    #[inline]
    pub(crate) fn permuted(&self, perm: &Permutation) -> Self {
        let mut out = 0u128;
        let mut rest = self.bits;
        while rest != 0 {
            let (i, j) = pair_at(rest.trailing_zeros() as usize);
            out |= 1u128 << bit_position(perm.image(i), perm.image(j));
            rest &= rest - 1;
        }
        Self { k: self.k, bits: out }
    }

    /// Per-node neighbor masks.
    pub(crate) fn rows(&self) -> [u16; MAX_K] {
        let mut rows = [0u16; MAX_K];
        let mut rest = self.bits;
        while rest != 0 {
            let (i, j) = pair_at(rest.trailing_zeros() as usize);
            rows[i] |= 1 << j;
            rows[j] |= 1 << i;
            rest &= rest - 1;
        }
        rows
    }

    /// Degree of each node, indexed by node.
    pub fn degrees(&self) -> Vec<usize> {
        let rows = self.rows();
        rows[..self.k()].iter().map(|r| r.count_ones() as usize).collect()
    }

    /// Node degrees in non-decreasing order.
    pub fn degree_sequence(&self) -> Vec<usize> {
        let mut d = self.degrees();
        d.sort_unstable();
        d
    }

    pub fn is_connected(&self) -> bool {
        let k = self.k();
        if k <= 1 {
            return true;
        }
        let rows = self.rows();
        let all = (1u16 << k) - 1;
        let mut seen = 1u16;
        let mut frontier = 1u16;
        while frontier != 0 {
            let mut next = 0u16;
            let mut f = frontier;
            while f != 0 {
                next |= rows[f.trailing_zeros() as usize];
                f &= f - 1;
            }
            frontier = next & !seen;
            seen |= next;
        }
        seen == all
    }

    pub fn complement(&self) -> Self {
        Self {
            k: self.k,
            bits: mask(self.k()) ^ self.bits,
        }
    }
}

fn check_order(k: usize) -> Result<()> {
    if k == 0 || k > MAX_K {
        return Err(Error::OrderOutOfRange { k, max: MAX_K });
    }
    Ok(())
}

impl fmt::Debug for Graphette {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graphette(k={}, bits={})", self.k, self.bits)
    }
}
