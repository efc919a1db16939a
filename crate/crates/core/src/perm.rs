use std::fmt;

use crate::error::{Error, Result};
use crate::graphette::MAX_K;

/// A bijection on `{0, .., k-1}`. Entry `u` is the image of node `u`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Permutation {
    k: u8,
    map: [u8; MAX_K],
}

impl Permutation {
    pub fn identity(k: usize) -> Result<Self> {
        check_len(k)?;
        let mut map = [0u8; MAX_K];
        for (u, slot) in map.iter_mut().enumerate().take(k) {
            *slot = u as u8;
        }
        Ok(Self { k: k as u8, map })
    }

    /// Builds a permutation from its image list, rejecting anything that is not a bijection.
    pub fn from_images(images: &[usize]) -> Result<Self> {
        let k = images.len();
        check_len(k)?;
        let mut seen = 0u16;
        let mut map = [0u8; MAX_K];
        for (u, &v) in images.iter().enumerate() {
            if v >= k {
                return Err(Error::InvalidPermutation(format!(
                    "image {v} of node {u} is out of range for k={k}"
                )));
            }
            if seen & (1 << v) != 0 {
                return Err(Error::InvalidPermutation(format!("image {v} repeated")));
            }
            seen |= 1 << v;
            map[u] = v as u8;
        }
        Ok(Self { k: k as u8, map })
    }

    /// Caller guarantees `map[..k]` is a bijection on `0..k`.
    pub(crate) fn from_raw(k: usize, mut map: [u8; MAX_K]) -> Self {
        debug_assert!(k <= MAX_K);
        map[k..].fill(0);
        Self { k: k as u8, map }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.k as usize
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.k == 0
    }

    #[inline]
    pub fn image(&self, u: usize) -> usize {
        self.map[u] as usize
    }

    pub fn images(&self) -> &[u8] {
        &self.map[..self.len()]
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.images().iter().map(|&v| v as usize).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.images().iter().enumerate().all(|(u, &v)| u == v as usize)
    }

    pub fn inverse(&self) -> Self {
        let mut map = [0u8; MAX_K];
        for (u, &v) in self.images().iter().enumerate() {
            map[v as usize] = u as u8;
        }
        Self { k: self.k, map }
    }

    /// `self ∘ other`: apply `other` first, then `self`.
    pub fn compose(&self, other: &Permutation) -> Result<Self> {
        if self.k != other.k {
            return Err(Error::SizeMismatch {
                expected: self.len(),
                found: other.len(),
            });
        }
        Ok(self.compose_unchecked(other))
    }

    #[inline]
    pub(crate) fn compose_unchecked(&self, other: &Permutation) -> Self {
        let mut map = [0u8; MAX_K];
        for (u, slot) in map.iter_mut().enumerate().take(self.len()) {
            *slot = self.map[other.map[u] as usize];
        }
        Self { k: self.k, map }
    }

    /// Smallest `λ > 0` with `π^λ(u) = u`.
    pub fn cycle_length(&self, u: usize) -> usize {
        let mut v = self.image(u);
        let mut steps = 1;
        while v != u {
            v = self.image(v);
            steps += 1;
        }
        steps
    }
}

fn check_len(k: usize) -> Result<()> {
    if k > MAX_K {
        return Err(Error::OrderOutOfRange { k, max: MAX_K });
    }
    Ok(())
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation{:?}", self.images())
    }
}

/// Comma-separated images, e.g. `2,0,1`.
impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.images().iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}
