//! Canonical catalogs and full lookup tables.
//!
//! The canonical member of an isomorphism class is its numerically lowest bit
//! vector. Scanning bit vectors in ascending order and testing each against the
//! canonicals found so far elects exactly those members. Large orders split the
//! scan into contiguous ranges ("sifting"): each range finds its own local
//! minima, and a pairwise merge reduction elects the global ones.

use std::ops::Range;

use rayon::prelude::*;
use rustc_hash::FxHashMap;

use crate::error::{Error, Result};
use crate::graphette::{bit_len, Graphette, MAX_K};
use crate::iso::{find_isomorphism, Adjacency};
use crate::orbits::{generate_automorphisms, OrbitPartition};
use crate::perm::Permutation;

/// Largest order for which lookup tables can be built and stored.
pub const MAX_TABLE_K: usize = 8;
/// Largest order accepted by the single-threaded builder.
pub const MAX_SEQUENTIAL_K: usize = 7;

const ID_BITS: u32 = 14;
const ID_MASK: u64 = (1 << ID_BITS) - 1;
const CONNECTED_BIT: u64 = 1 << 14;
const PERM_SHIFT: u32 = 16;
const PERM_NODE_BITS: u32 = 3;

/// Largest canonical count a packed record can address.
pub const MAX_CANONICALS: usize = 1 << ID_BITS;

/// Number of bit vectors (and table records) for order `k`.
pub fn table_len(k: usize) -> u64 {
    1u64 << bit_len(k)
}

/// One 8-byte lookup-table record.
///
/// Bits 0-13 hold the canonical ID, bit 14 the connected flag, and bits
/// `16 + 3u .. 19 + 3u` the witness image of node `u`. All other bits are zero.
/// Built tables always store the lexicographically smallest witness.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, Debug)]
pub struct PackedRecord(u64);

impl PackedRecord {
    pub fn pack(canonical_id: u32, witness: &Permutation, connected: bool) -> Self {
        debug_assert!((canonical_id as u64) <= ID_MASK);
        debug_assert!(witness.len() <= MAX_TABLE_K);
        let mut raw = canonical_id as u64 & ID_MASK;
        if connected {
            raw |= CONNECTED_BIT;
        }
        for (u, &v) in witness.images().iter().enumerate() {
            raw |= (v as u64) << (PERM_SHIFT + PERM_NODE_BITS * u as u32);
        }
        Self(raw)
    }

    #[inline]
    pub fn from_raw(raw: u64) -> Self {
        Self(raw)
    }

    #[inline]
    pub fn raw(self) -> u64 {
        self.0
    }

    #[inline]
    pub fn canonical_id(self) -> u32 {
        (self.0 & ID_MASK) as u32
    }

    #[inline]
    pub fn connected(self) -> bool {
        self.0 & CONNECTED_BIT != 0
    }

    #[inline]
    pub fn witness_image(self, u: usize) -> usize {
        (self.0 >> (PERM_SHIFT + PERM_NODE_BITS * u as u32) & 0b111) as usize
    }

    pub fn witness(self, k: usize) -> Permutation {
        let mut map = [0u8; MAX_K];
        for (u, slot) in map.iter_mut().enumerate().take(k) {
            *slot = self.witness_image(u) as u8;
        }
        Permutation::from_raw(k, map)
    }

    /// Checks the record for order `k` against `canonical_count`. Used when loading files.
    pub(crate) fn validate(self, k: usize, canonical_count: usize) -> std::result::Result<(), String> {
        if self.canonical_id() as usize >= canonical_count {
            return Err(format!("canonical id {} >= {canonical_count}", self.canonical_id()));
        }
        let used = PERM_SHIFT + PERM_NODE_BITS * k as u32;
        let allowed = ID_MASK | CONNECTED_BIT | (((1u64 << used) - 1) & !((1u64 << PERM_SHIFT) - 1));
        if self.0 & !allowed != 0 {
            return Err(format!("reserved bits set in record {:#x}", self.0));
        }
        let mut seen = 0u16;
        for u in 0..k {
            let v = self.witness_image(u);
            if v >= k || seen & (1 << v) != 0 {
                return Err(format!("witness is not a permutation in record {:#x}", self.0));
            }
            seen |= 1 << v;
        }
        Ok(())
    }
}

/// Canonical bit vectors for one order, ascending; the index is the canonical ID.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalCatalog {
    pub(crate) k: usize,
    pub(crate) canonicals: Vec<u64>,
    pub(crate) connected: Vec<bool>,
    /// One entry per canonical once [`crate::orbits::compute_catalog_orbits`] has run.
    pub(crate) orbit_partitions: Vec<OrbitPartition>,
}

impl CanonicalCatalog {
    pub(crate) fn new(k: usize, canonicals: Vec<u64>) -> Self {
        let connected = canonicals
            .iter()
            .map(|&b| Graphette::from_raw(k, b as u128).is_connected())
            .collect();
        Self {
            k,
            canonicals,
            connected,
            orbit_partitions: Vec::new(),
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.canonicals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.canonicals.is_empty()
    }

    pub fn canonicals(&self) -> &[u64] {
        &self.canonicals
    }

    pub fn canonical(&self, id: usize) -> Graphette {
        Graphette::from_raw(self.k, self.canonicals[id] as u128)
    }

    pub fn is_connected(&self, id: usize) -> bool {
        self.connected[id]
    }

    pub fn connected_count(&self) -> usize {
        self.connected.iter().filter(|&&c| c).count()
    }

    pub fn orbit_partitions(&self) -> &[OrbitPartition] {
        &self.orbit_partitions
    }

    pub fn id_of(&self, bits: u64) -> Option<usize> {
        self.canonicals.binary_search(&bits).ok()
    }
}

/// Dense map from every bit vector of order `k` to its packed record.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LookupTable {
    pub(crate) k: usize,
    pub(crate) records: Vec<PackedRecord>,
}

impl LookupTable {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    #[inline]
    pub fn record(&self, bits: u64) -> PackedRecord {
        self.records[bits as usize]
    }

    pub fn records(&self) -> &[PackedRecord] {
        &self.records
    }
}

/// Isomorphism classes found so far, bucketed by degree sequence.
#[derive(Default)]
struct ClassIndex {
    reps: Vec<u64>,
    adjacency: Vec<Adjacency>,
    buckets: FxHashMap<u64, Vec<u32>>,
}

impl ClassIndex {
    fn find(&self, adj: &Adjacency) -> Option<(u32, Permutation)> {
        let bucket = self.buckets.get(&adj.degree_key())?;
        bucket
            .iter()
            .find_map(|&idx| find_isomorphism(adj, &self.adjacency[idx as usize]).map(|p| (idx, p)))
    }

    fn insert(&mut self, bits: u64, adj: Adjacency) -> u32 {
        let idx = self.reps.len() as u32;
        self.reps.push(bits);
        self.adjacency.push(adj);
        self.buckets.entry(adj.degree_key()).or_default().push(idx);
        idx
    }

    fn from_reps(k: usize, reps: &[u64]) -> Self {
        let mut index = Self::default();
        for &bits in reps {
            index.insert(bits, Adjacency::new(&Graphette::from_raw(k, bits as u128)));
        }
        index
    }
}

/// Result of scanning one contiguous range of bit vectors.
#[derive(Clone, Debug)]
pub struct SiftPartition {
    pub index: usize,
    pub k: usize,
    pub range: Range<u64>,
    /// Lowest member of each class met inside `range`, ascending.
    pub temp_canonicals: Vec<u64>,
    /// For each member of `range`, its temp canonical (record ID field indexes
    /// `temp_canonicals`) and a witness onto it. The connected flag is not set yet.
    pub temp_map: Vec<PackedRecord>,
}

impl SiftPartition {
    pub fn temp_canonical_of(&self, bits: u64) -> (u64, Permutation) {
        let rec = self.temp_map[(bits - self.range.start) as usize];
        (self.temp_canonicals[rec.canonical_id() as usize], rec.witness(self.k))
    }
}

fn check_table_order(k: usize, max: usize) -> Result<()> {
    if k == 0 || k > max {
        return Err(Error::OrderOutOfRange { k, max });
    }
    Ok(())
}

/// Groups the bit vectors in `range` into classes local to the range.
pub fn sift_partition(k: usize, index: usize, range: Range<u64>) -> Result<SiftPartition> {
    check_table_order(k, MAX_TABLE_K)?;
    if range.start >= range.end {
        return Err(Error::EmptyRange {
            start: range.start,
            end: range.end,
        });
    }
    if range.end > table_len(k) {
        return Err(Error::NonTiling(format!(
            "range {}..{} exceeds 2^{} bit vectors",
            range.start,
            range.end,
            bit_len(k)
        )));
    }
    let mut classes = ClassIndex::default();
    let mut temp_map = Vec::with_capacity((range.end - range.start) as usize);
    let identity = Permutation::identity(k)?;
    for bits in range.clone() {
        let adj = Adjacency::new(&Graphette::from_raw(k, bits as u128));
        let rec = match classes.find(&adj) {
            Some((idx, witness)) => PackedRecord::pack(idx, &witness, false),
            None => {
                let idx = classes.insert(bits, adj);
                if idx as usize >= MAX_CANONICALS {
                    return Err(Error::InvalidArgument(format!(
                        "more than {MAX_CANONICALS} classes in one partition"
                    )));
                }
                PackedRecord::pack(idx, &identity, false)
            }
        };
        temp_map.push(rec);
    }
    Ok(SiftPartition {
        index,
        k,
        range,
        temp_canonicals: classes.reps,
        temp_map,
    })
}

/// Scans every bit vector of order `k` in ascending order on the calling thread.
pub fn build_canonical_map_sequential(k: usize) -> Result<(CanonicalCatalog, LookupTable)> {
    check_table_order(k, MAX_SEQUENTIAL_K)?;
    let part = sift_partition(k, 0, 0..table_len(k))?;
    let catalog = CanonicalCatalog::new(k, part.temp_canonicals);
    let mut records: Vec<PackedRecord> = part
        .temp_map
        .into_iter()
        .map(|r| {
            let id = r.canonical_id();
            PackedRecord::pack(id, &r.witness(k), catalog.connected[id as usize])
        })
        .collect();
    normalize_witnesses(&catalog, &mut records)?;
    Ok((catalog, LookupTable { k, records }))
}

/// Contiguous, near-equal ranges tiling `0..total`. At most `total` ranges.
pub fn partition_ranges(total: u64, m: usize) -> Vec<Range<u64>> {
    let m = (m as u64).clamp(1, total.max(1));
    (0..m)
        .map(|i| {
            let start = (total as u128 * i as u128 / m as u128) as u64;
            let end = (total as u128 * (i + 1) as u128 / m as u128) as u64;
            start..end
        })
        .collect()
}

/// Merges per-range results into the global catalog and table.
///
/// Temp canonical lists are reduced pairwise, round after round, until one list
/// remains. In each merge every temp canonical of the right (higher) range is
/// tested against the survivors of the left range and forwarded to the one it
/// matches. Class minima can never be forwarded, so the survivors are exactly
/// the global canonicals. Forwarding witnesses are then composed back through
/// every partition's temp map.
pub fn merge_siftings(mut parts: Vec<SiftPartition>) -> Result<(CanonicalCatalog, LookupTable)> {
    let k = check_tiling(&mut parts)?;

    // forward[t] = (t', π) with apply(t, π) = t' and t' < t
    let mut forward: FxHashMap<u64, (u64, Permutation)> = FxHashMap::default();
    let mut lists: Vec<Vec<u64>> = parts.iter().map(|p| p.temp_canonicals.clone()).collect();
    while lists.len() > 1 {
        let merged: Vec<(Vec<u64>, Vec<Forward>)> = lists
            .par_chunks(2)
            .map(|pair| match pair {
                [left, right] => merge_pair(k, left, right),
                [only] => (only.clone(), Vec::new()),
                _ => unreachable!(),
            })
            .collect();
        lists = Vec::with_capacity(merged.len());
        for (list, forwards) in merged {
            for (from, to, witness) in forwards {
                forward.insert(from, (to, witness));
            }
            lists.push(list);
        }
    }
    let canonicals = lists.pop().unwrap_or_default();
    if canonicals.len() > MAX_CANONICALS {
        return Err(Error::InvalidArgument(format!(
            "{} canonicals exceed the record capacity of {MAX_CANONICALS}",
            canonicals.len()
        )));
    }
    let catalog = CanonicalCatalog::new(k, canonicals);

    let records: Vec<Vec<PackedRecord>> = parts
        .par_iter_mut()
        .map(|part| {
            let resolved: Vec<(u32, Permutation, bool)> = part
                .temp_canonicals
                .iter()
                .map(|&t| {
                    let (c, witness) = resolve(k, t, &forward);
                    let id = catalog.id_of(c).expect("resolved canonical is in catalog") as u32;
                    (id, witness, catalog.connected[id as usize])
                })
                .collect();
            std::mem::take(&mut part.temp_map)
                .into_iter()
                .map(|r| {
                    let (id, to_final, connected) = &resolved[r.canonical_id() as usize];
                    let witness = to_final.compose_unchecked(&r.witness(k));
                    PackedRecord::pack(*id, &witness, *connected)
                })
                .collect()
        })
        .collect();
    let mut records: Vec<PackedRecord> = records.into_iter().flatten().collect();
    normalize_witnesses(&catalog, &mut records)?;
    Ok((catalog, LookupTable { k, records }))
}

/// Replaces every witness by the lexicographically smallest one.
///
/// The witnesses of a bit vector onto its canonical `c` are exactly `α ∘ π` for
/// `α` in `Aut(c)`, so the minimum does not depend on which `π` the scan or the
/// merge happened to find. This makes tables identical for every partition count.
fn normalize_witnesses(catalog: &CanonicalCatalog, records: &mut [PackedRecord]) -> Result<()> {
    let k = catalog.k();
    let groups = catalog
        .canonicals
        .par_iter()
        .map(|&c| generate_automorphisms(&Graphette::from_raw(k, c as u128)))
        .collect::<Result<Vec<_>>>()?;
    records.par_iter_mut().for_each(|rec| {
        let id = rec.canonical_id();
        let pi = rec.witness(k);
        let best = groups[id as usize]
            .perms()
            .iter()
            .map(|a| a.compose_unchecked(&pi))
            .min_by(|a, b| a.images().cmp(b.images()))
            .unwrap_or(pi);
        *rec = PackedRecord::pack(id, &best, rec.connected());
    });
    Ok(())
}

/// `(from, to, π)` with `apply(from, π) = to`.
type Forward = (u64, u64, Permutation);

fn merge_pair(k: usize, left: &[u64], right: &[u64]) -> (Vec<u64>, Vec<Forward>) {
    let index = ClassIndex::from_reps(k, left);
    let mut survivors = left.to_vec();
    let mut forwards = Vec::new();
    for &t in right {
        let adj = Adjacency::new(&Graphette::from_raw(k, t as u128));
        match index.find(&adj) {
            Some((idx, witness)) => forwards.push((t, left[idx as usize], witness)),
            None => survivors.push(t),
        }
    }
    (survivors, forwards)
}

fn resolve(k: usize, t: u64, forward: &FxHashMap<u64, (u64, Permutation)>) -> (u64, Permutation) {
    let mut current = t;
    let mut witness = Permutation::from_raw(k, std::array::from_fn(|u| u as u8));
    while let Some((next, step)) = forward.get(&current) {
        witness = step.compose_unchecked(&witness);
        current = *next;
    }
    (current, witness)
}

fn check_tiling(parts: &mut [SiftPartition]) -> Result<usize> {
    let Some(first) = parts.first() else {
        return Err(Error::NonTiling("no partitions".into()));
    };
    let k = first.k;
    parts.sort_by_key(|p| p.range.start);
    let mut expected = 0u64;
    for p in parts.iter() {
        if p.k != k {
            return Err(Error::NonTiling(format!("mixed orders {k} and {}", p.k)));
        }
        if p.range.start != expected {
            return Err(Error::NonTiling(format!(
                "partition {} starts at {}, expected {expected}",
                p.index, p.range.start
            )));
        }
        if p.temp_map.len() as u64 != p.range.end - p.range.start {
            return Err(Error::NonTiling(format!(
                "partition {} maps {} members for a range of {}",
                p.index,
                p.temp_map.len(),
                p.range.end - p.range.start
            )));
        }
        expected = p.range.end;
    }
    if expected != table_len(k) {
        return Err(Error::NonTiling(format!(
            "partitions end at {expected}, expected {}",
            table_len(k)
        )));
    }
    Ok(k)
}

/// Sifts `m` contiguous ranges on `workers` threads, then merges them.
///
/// The output does not depend on `m`, `workers` or scheduling. `m` is capped at
/// the number of bit vectors.
pub fn build_canonical_map_parallel(k: usize, m: usize, workers: usize) -> Result<(CanonicalCatalog, LookupTable)> {
    check_table_order(k, MAX_TABLE_K)?;
    if m == 0 {
        return Err(Error::InvalidArgument("partition count must be at least 1".into()));
    }
    let pool = thread_pool(workers)?;
    pool.install(|| {
        let parts = partition_ranges(table_len(k), m)
            .into_par_iter()
            .enumerate()
            .map(|(i, range)| sift_partition(k, i, range))
            .collect::<Result<Vec<_>>>()?;
        merge_siftings(parts)
    })
}

pub(crate) fn thread_pool(workers: usize) -> Result<rayon::ThreadPool> {
    if workers == 0 {
        return Err(Error::InvalidArgument("worker count must be at least 1".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidArgument(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn record_packing() {
        let p = Permutation::from_images(&[7, 6, 5, 4, 3, 2, 1, 0]).unwrap();
        let r = PackedRecord::pack(12345, &p, true);
        assert_eq!(r.canonical_id(), 12345);
        assert!(r.connected());
        assert_eq!(r.witness(8), p);
        assert_eq!(r.raw() >> 40, 0);
        assert_eq!(r.raw() & (1 << 15), 0);
        assert!(r.validate(8, 12346).is_ok());
        assert!(r.validate(8, 12345).is_err());
        assert!(PackedRecord::from_raw(1 << 15).validate(8, 1).is_err());
    }

    #[test]
    fn order_eight_fits_record_layout() {
        // NC(8) = 12346 canonicals need 14 bits; 8 images x 3 bits end at bit 39
        const { assert!(12346 < MAX_CANONICALS) };
        assert_eq!(table_len(8), 1 << 28);
        assert_eq!(PERM_SHIFT + PERM_NODE_BITS * 8, 40);
        assert!(check_table_order(8, MAX_TABLE_K).is_ok());
        assert!(build_canonical_map_sequential(8).is_err());
        assert!(sift_partition(9, 0, 0..1).is_err());
    }

    #[test]
    fn sequential_small_orders() {
        let (cat, table) = build_canonical_map_sequential(3).unwrap();
        assert_eq!(cat.canonicals(), &[0, 1, 3, 7]);
        assert_eq!(table.len(), 8);
        assert_eq!(build_canonical_map_sequential(4).unwrap().0.len(), 11);
        assert!(build_canonical_map_sequential(0).is_err());
    }

    #[test]
    fn sift_upper_half_of_order_three() {
        let part = sift_partition(3, 1, 4..8).unwrap();
        assert_eq!(part.temp_canonicals, vec![4, 5, 7]);
        assert_eq!(part.temp_canonical_of(6).0, 5);
        assert_eq!(part.temp_canonical_of(7).0, 7);
        for &t in &part.temp_canonicals {
            let (rep, w) = part.temp_canonical_of(t);
            assert_eq!(rep, t);
            assert!(w.is_identity());
        }
    }

    #[test]
    fn sift_rejects_bad_ranges() {
        assert!(matches!(sift_partition(3, 0, 4..4), Err(Error::EmptyRange { .. })));
        assert!(sift_partition(3, 0, 0..9).is_err());
    }

    #[test]
    fn merge_rejects_gaps_and_overlaps() {
        let a = sift_partition(3, 0, 0..4).unwrap();
        let b = sift_partition(3, 1, 5..8).unwrap();
        assert!(matches!(merge_siftings(vec![a.clone(), b]), Err(Error::NonTiling(_))));
        let c = sift_partition(3, 1, 3..8).unwrap();
        assert!(merge_siftings(vec![a.clone(), c]).is_err());
        assert!(merge_siftings(vec![a]).is_err());
        assert!(merge_siftings(vec![]).is_err());
    }

    #[test]
    fn merge_accepts_any_part_order() {
        let parts: Vec<_> = partition_ranges(64, 5)
            .into_iter()
            .enumerate()
            .map(|(i, r)| sift_partition(4, i, r).unwrap())
            .rev()
            .collect();
        let merged = merge_siftings(parts).unwrap();
        assert_eq!(merged, build_canonical_map_sequential(4).unwrap());
    }

    #[test]
    fn ranges_tile() {
        for (total, m) in [(8u64, 3usize), (1, 16), (1024, 16), (7, 7), (10, 1)] {
            let r = partition_ranges(total, m);
            assert_eq!(r.first().unwrap().start, 0);
            assert_eq!(r.last().unwrap().end, total);
            assert!(r.windows(2).all(|w| w[0].end == w[1].start));
            assert!(r.iter().all(|x| x.start < x.end));
        }
    }

    #[test]
    fn parallel_rejects_bad_arguments() {
        assert!(build_canonical_map_parallel(4, 0, 1).is_err());
        assert!(build_canonical_map_parallel(4, 2, 0).is_err());
        assert!(build_canonical_map_parallel(9, 2, 1).is_err());
    }
}
