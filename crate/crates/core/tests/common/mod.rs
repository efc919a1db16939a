//! Brute-force reference implementations. They work on plain adjacency
//! matrices and full permutation enumeration, sharing no code with the crate
//! beyond the bit layout itself.

#![allow(dead_code, clippy::needless_range_loop)]

use itertools::Itertools;

pub type Matrix = Vec<Vec<bool>>;

pub fn b(k: usize) -> usize {
    k * (k.saturating_sub(1)) / 2
}

pub fn matrix(k: usize, bits: u64) -> Matrix {
    let mut m = vec![vec![false; k]; k];
    let mut pos = 0;
    for i in 1..k {
        for j in 0..i {
            if bits >> pos & 1 == 1 {
                m[i][j] = true;
                m[j][i] = true;
            }
            pos += 1;
        }
    }
    m
}

pub fn bits_of(m: &Matrix) -> u64 {
    let k = m.len();
    let mut bits = 0;
    let mut pos = 0;
    for i in 1..k {
        for j in 0..i {
            if m[i][j] {
                bits |= 1 << pos;
            }
            pos += 1;
        }
    }
    bits
}

/// Edge `{p[u], p[v]}` in the result iff `{u, v}` in the input.
pub fn permute(k: usize, bits: u64, p: &[usize]) -> u64 {
    let m = matrix(k, bits);
    let mut out = vec![vec![false; k]; k];
    for u in 0..k {
        for v in 0..k {
            out[p[u]][p[v]] = m[u][v];
        }
    }
    bits_of(&out)
}

pub fn all_perms(k: usize) -> Vec<Vec<usize>> {
    (0..k).permutations(k).collect()
}

pub fn canonical(k: usize, bits: u64, perms: &[Vec<usize>]) -> u64 {
    perms.iter().map(|p| permute(k, bits, p)).min().unwrap_or(bits)
}

/// Sorted list of class minima.
pub fn canonicals(k: usize) -> Vec<u64> {
    let perms = all_perms(k);
    let mut seen = vec![false; 1 << b(k)];
    let mut out = Vec::new();
    for bits in 0..1u64 << b(k) {
        if seen[bits as usize] {
            continue;
        }
        out.push(bits);
        for p in &perms {
            seen[permute(k, bits, p) as usize] = true;
        }
    }
    out
}

pub fn automorphisms(k: usize, bits: u64, perms: &[Vec<usize>]) -> Vec<Vec<usize>> {
    perms.iter().filter(|p| permute(k, bits, p) == bits).cloned().collect()
}

/// Orbit label (smallest reachable node) of every node.
pub fn orbit_labels(k: usize, bits: u64, perms: &[Vec<usize>]) -> Vec<usize> {
    let auts = automorphisms(k, bits, perms);
    (0..k).map(|u| auts.iter().map(|a| a[u]).min().unwrap_or(u)).collect()
}

pub fn connected(m: &Matrix) -> bool {
    let k = m.len();
    if k == 0 {
        return true;
    }
    let mut seen = vec![false; k];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(u) = stack.pop() {
        for v in 0..k {
            if m[u][v] && !seen[v] {
                seen[v] = true;
                stack.push(v);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

/// Petersen graph: outer 5-cycle, inner pentagram, spokes.
pub fn petersen_edges() -> Vec<(usize, usize)> {
    let mut e = Vec::new();
    for i in 0..5 {
        e.push((i, (i + 1) % 5));
        e.push((5 + i, 5 + (i + 2) % 5));
        e.push((i, 5 + i));
    }
    e
}

pub fn path_edges(k: usize) -> Vec<(usize, usize)> {
    (1..k).map(|i| (i, i - 1)).collect()
}

pub fn cycle_edges(k: usize) -> Vec<(usize, usize)> {
    let mut e = path_edges(k);
    if k >= 3 {
        e.push((k - 1, 0));
    }
    e
}
