#![allow(clippy::needless_range_loop)]

mod common;

use graphette::{bit_len, Graphette, Permutation};
use proptest::prelude::*;

fn graphette(max_k: usize) -> impl Strategy<Value = Graphette> {
    (1..=max_k).prop_flat_map(|k| {
        let mask = (1u128 << bit_len(k)) - 1;
        any::<u128>().prop_map(move |b| Graphette::new(k, b & mask).unwrap())
    })
}

fn with_perm(max_k: usize) -> impl Strategy<Value = (Graphette, Permutation)> {
    graphette(max_k).prop_flat_map(|g| {
        let images: Vec<usize> = (0..g.k()).collect();
        (Just(g), Just(images).prop_shuffle()).prop_map(|(g, p)| (g, Permutation::from_images(&p).unwrap()))
    })
}

#[test]
fn encode_decode_round_trip_exhaustive() {
    for k in 1..=6 {
        for bits in 0..1u128 << bit_len(k) {
            let g = Graphette::new(k, bits).unwrap();
            let again = Graphette::encode(k, g.decode()).unwrap();
            assert_eq!(again, g);
            assert_eq!(g.edge_count(), g.decode().len());
        }
    }
}

#[test]
fn matches_reference_layout() {
    for k in 1..=5 {
        for bits in 0..1u64 << bit_len(k) {
            let g = Graphette::new(k, bits as u128).unwrap();
            let m = common::matrix(k, bits);
            for i in 0..k {
                for j in 0..k {
                    assert_eq!(g.has_edge(i, j), i != j && m[i][j]);
                }
            }
            assert_eq!(g.is_connected(), common::connected(&m));
        }
    }
}

proptest! {
    #[test]
    fn popcount_is_edge_count(g in graphette(12)) {
        prop_assert_eq!(g.bits().count_ones() as usize, g.edge_count());
        prop_assert_eq!(g.degrees().iter().sum::<usize>(), 2 * g.edge_count());
    }

    #[test]
    fn permutation_matches_reference((g, p) in with_perm(8)) {
        let h = g.apply_permutation(&p).unwrap();
        prop_assert_eq!(h.bits() as u64, common::permute(g.k(), g.bits() as u64, &p.to_vec()));
    }

    #[test]
    fn group_action((g, p) in with_perm(10), seed in any::<u64>()) {
        let k = g.k();
        let identity = Permutation::identity(k).unwrap();
        prop_assert_eq!(g.apply_permutation(&identity).unwrap(), g);

        // a second permutation derived from the seed
        let mut images: Vec<usize> = (0..k).collect();
        let mut s = seed;
        for i in (1..k).rev() {
            images.swap(i, (s % (i as u64 + 1)) as usize);
            s = s.rotate_left(7) ^ 0x9e37_79b9_7f4a_7c15;
        }
        let q = Permutation::from_images(&images).unwrap();
        let stepwise = g.apply_permutation(&p).unwrap().apply_permutation(&q).unwrap();
        let composed = g.apply_permutation(&q.compose(&p).unwrap()).unwrap();
        prop_assert_eq!(stepwise, composed);
        prop_assert_eq!(g.apply_permutation(&p).unwrap().apply_permutation(&p.inverse()).unwrap(), g);
    }

    #[test]
    fn degree_and_connectivity_invariant((g, p) in with_perm(10)) {
        let h = g.apply_permutation(&p).unwrap();
        prop_assert_eq!(h.edge_count(), g.edge_count());
        prop_assert_eq!(h.degree_sequence(), g.degree_sequence());
        prop_assert_eq!(h.is_connected(), g.is_connected());
        for u in 0..g.k() {
            prop_assert_eq!(h.degrees()[p.image(u)], g.degrees()[u]);
        }
    }

    #[test]
    fn complement_properties(g in graphette(12)) {
        let c = g.complement();
        prop_assert_eq!(c.complement(), g);
        prop_assert_eq!(c.edge_count() + g.edge_count(), bit_len(g.k()));
        prop_assert_eq!(c.bits() & g.bits(), 0);
        if g.k() >= 2 {
            // a graph and its complement are never both disconnected
            prop_assert!(g.is_connected() || c.is_connected());
        }
    }
}
