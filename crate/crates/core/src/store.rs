//! Table files and constant-time queries.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! offset  size  field
//!      0    10  magic "GRAPHETTE1"
//!     10     1  format version (1)
//!     11     1  k
//!     12     4  canonical count NC
//!     16     4  total orbit count
//!     20     1  layout tag length L
//!     21     L  layout tag "lower-triangle-lsb"
//!   21+L     8  record count (2^b(k))
//! catalog: NC entries of 8-byte canonical bits, 1-byte connected flag,
//!          k orbit-label bytes, 4-byte global orbit base
//! records: one 8-byte packed record per bit vector
//! footer:  4-byte CRC-32 of every preceding byte
//! ```

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::canon::{
    build_canonical_map_parallel, build_canonical_map_sequential, table_len, thread_pool, CanonicalCatalog,
    LookupTable, PackedRecord, MAX_CANONICALS, MAX_SEQUENTIAL_K, MAX_TABLE_K,
};
use crate::error::{Error, FormatError, Result};
use crate::graphette::Graphette;
use crate::orbits::{assign_global_orbit_ids, compute_catalog_orbits, GlobalOrbitIndex, OrbitPartition};
use crate::perm::Permutation;

pub const MAGIC: &[u8; 10] = b"GRAPHETTE1";
pub const FORMAT_VERSION: u8 = 1;
pub const LAYOUT_TAG: &str = "lower-triangle-lsb";

pub const HEADER_LEN: u64 = 10 + 1 + 1 + 4 + 4 + 1 + LAYOUT_TAG.len() as u64 + 8;
const CHECKSUM_LEN: u64 = 4;
const RECORD_LEN: u64 = 8;

pub fn catalog_entry_len(k: usize) -> u64 {
    8 + 1 + k as u64 + 4
}

/// Exact size of a table file for order `k` with `canonicals` catalog entries.
pub fn file_len(k: usize, canonicals: usize) -> u64 {
    HEADER_LEN + canonicals as u64 * catalog_entry_len(k) + table_len(k) * RECORD_LEN + CHECKSUM_LEN
}

/// Result of looking up one graphette.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Identification {
    pub canonical_id: u32,
    pub canonical_bits: u64,
    /// Maps the queried graphette's nodes onto canonical positions.
    pub witness: Permutation,
    pub connected: bool,
}

/// Catalog, lookup table and orbit numbering for one order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphetteTable {
    catalog: CanonicalCatalog,
    table: LookupTable,
    orbits: GlobalOrbitIndex,
}

impl GraphetteTable {
    /// Builds everything for order `k`. One partition with `k <= 7` uses the
    /// plain sequential scan; anything else goes through sifting.
    pub fn build(k: usize, partitions: usize, workers: usize) -> Result<Self> {
        let pool = thread_pool(workers)?;
        pool.install(|| {
            let (mut catalog, table) = if partitions == 1 && k <= MAX_SEQUENTIAL_K {
                build_canonical_map_sequential(k)?
            } else {
                build_canonical_map_parallel(k, partitions, workers)?
            };
            compute_catalog_orbits(&mut catalog)?;
            let orbits = assign_global_orbit_ids(&catalog)?;
            Ok(Self { catalog, table, orbits })
        })
    }

    pub fn from_parts(catalog: CanonicalCatalog, table: LookupTable, orbits: GlobalOrbitIndex) -> Result<Self> {
        check_consistent(&catalog, &table, &orbits)?;
        Ok(Self { catalog, table, orbits })
    }

    pub fn into_parts(self) -> (CanonicalCatalog, LookupTable, GlobalOrbitIndex) {
        (self.catalog, self.table, self.orbits)
    }

    pub fn k(&self) -> usize {
        self.catalog.k()
    }

    pub fn catalog(&self) -> &CanonicalCatalog {
        &self.catalog
    }

    pub fn table(&self) -> &LookupTable {
        &self.table
    }

    pub fn orbits(&self) -> &GlobalOrbitIndex {
        &self.orbits
    }

    pub fn canonical_count(&self) -> usize {
        self.catalog.len()
    }

    pub fn total_orbits(&self) -> u32 {
        self.orbits.total()
    }

    pub fn query(&self, g: &Graphette) -> Result<Identification> {
        self.check_order(g)?;
        Ok(self.identify(g.bits() as u64))
    }

    pub fn query_bits(&self, bits: u64) -> Result<Identification> {
        self.query(&Graphette::new(self.k(), bits as u128)?)
    }

    #[inline]
    pub(crate) fn identify(&self, bits: u64) -> Identification {
        let rec = self.table.record(bits);
        let id = rec.canonical_id();
        Identification {
            canonical_id: id,
            canonical_bits: self.catalog.canonicals[id as usize],
            witness: rec.witness(self.k()),
            connected: rec.connected(),
        }
    }

    /// Global orbit of node `u` of `g`.
    pub fn node_orbit(&self, g: &Graphette, u: usize) -> Result<u32> {
        self.check_order(g)?;
        if u >= g.k() {
            return Err(Error::NodeOutOfRange { node: u, n: g.k() });
        }
        let rec = self.table.record(g.bits() as u64);
        Ok(self.orbit_of_record(rec, u))
    }

    /// Global orbits of all nodes of `g`, indexed by node.
    pub fn node_orbits(&self, g: &Graphette) -> Result<Vec<u32>> {
        self.check_order(g)?;
        let rec = self.table.record(g.bits() as u64);
        Ok((0..g.k()).map(|u| self.orbit_of_record(rec, u)).collect())
    }

    #[inline]
    pub(crate) fn orbit_of_record(&self, rec: PackedRecord, u: usize) -> u32 {
        self.orbits
            .global_orbit(rec.canonical_id() as usize, rec.witness_image(u))
    }

    fn check_order(&self, g: &Graphette) -> Result<()> {
        if g.k() != self.k() {
            return Err(Error::SizeMismatch {
                expected: self.k(),
                found: g.k(),
            });
        }
        Ok(())
    }

    pub fn write_to<W: Write>(&self, w: W) -> Result<()> {
        serialize(&self.catalog, &self.table, &self.orbits, w)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(file_len(self.k(), self.catalog.len()) as usize);
        self.write_to(&mut out).expect("writing to a Vec cannot fail");
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let (catalog, table, orbits) = decode(bytes)?;
        Ok(Self { catalog, table, orbits })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        self.write_to(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let (catalog, table, orbits) = deserialize(BufReader::new(File::open(path)?))?;
        Ok(Self { catalog, table, orbits })
    }
}

fn check_consistent(catalog: &CanonicalCatalog, table: &LookupTable, orbits: &GlobalOrbitIndex) -> Result<()> {
    let k = catalog.k();
    let bad = |msg: String| Err(Error::InvalidArgument(msg));
    if k == 0 || k > MAX_TABLE_K {
        return Err(Error::OrderOutOfRange { k, max: MAX_TABLE_K });
    }
    if table.k() != k {
        return bad(format!("catalog is for k={k} but table is for k={}", table.k()));
    }
    if table.len() as u64 != table_len(k) {
        return bad(format!("table has {} records, expected {}", table.len(), table_len(k)));
    }
    if catalog.len() > MAX_CANONICALS {
        return bad(format!("{} canonicals exceed {MAX_CANONICALS}", catalog.len()));
    }
    if catalog.orbit_partitions().len() != catalog.len() {
        return Err(Error::MissingOrbits {
            expected: catalog.len(),
            found: catalog.orbit_partitions().len(),
        });
    }
    if orbits.bases().len() != catalog.len() {
        return bad(format!(
            "orbit index covers {} canonicals, catalog has {}",
            orbits.bases().len(),
            catalog.len()
        ));
    }
    Ok(())
}

struct Crc32Writer<W> {
    inner: W,
    hasher: crc32fast::Hasher,
}

impl<W: Write> Crc32Writer<W> {
    fn put(&mut self, bytes: &[u8]) -> std::io::Result<()> {
        self.hasher.update(bytes);
        self.inner.write_all(bytes)
    }
}

/// Writes a table file. Fails without writing if the three parts disagree.
pub fn serialize<W: Write>(
    catalog: &CanonicalCatalog,
    table: &LookupTable,
    orbits: &GlobalOrbitIndex,
    w: W,
) -> Result<()> {
    check_consistent(catalog, table, orbits)?;
    let k = catalog.k();
    let mut w = Crc32Writer {
        inner: w,
        hasher: crc32fast::Hasher::new(),
    };
    w.put(MAGIC)?;
    w.put(&[FORMAT_VERSION, k as u8])?;
    w.put(&(catalog.len() as u32).to_le_bytes())?;
    w.put(&orbits.total().to_le_bytes())?;
    w.put(&[LAYOUT_TAG.len() as u8])?;
    w.put(LAYOUT_TAG.as_bytes())?;
    w.put(&table_len(k).to_le_bytes())?;

    let mut entry = Vec::with_capacity(catalog_entry_len(k) as usize);
    for (id, part) in catalog.orbit_partitions().iter().enumerate() {
        entry.clear();
        entry.extend_from_slice(&catalog.canonicals()[id].to_le_bytes());
        entry.push(catalog.is_connected(id) as u8);
        entry.extend_from_slice(part.labels());
        entry.extend_from_slice(&orbits.base(id).to_le_bytes());
        w.put(&entry)?;
    }

    let mut chunk = Vec::with_capacity(64 * 1024);
    for recs in table.records().chunks(8 * 1024) {
        chunk.clear();
        for r in recs {
            chunk.extend_from_slice(&r.raw().to_le_bytes());
        }
        w.put(&chunk)?;
    }
    let crc = w.hasher.clone().finalize();
    w.inner.write_all(&crc.to_le_bytes())?;
    Ok(())
}

/// Reads and validates a table file.
pub fn deserialize<R: Read>(mut r: R) -> Result<(CanonicalCatalog, LookupTable, GlobalOrbitIndex)> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    decode(&bytes)
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize, section: &'static str) -> Result<&'a [u8], FormatError> {
        let available = self.bytes.len() - self.pos;
        if available < n {
            return Err(FormatError::Truncated {
                section,
                offset: self.pos as u64,
                needed: n as u64,
                available: available as u64,
            });
        }
        let out = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(out)
    }

    fn u8(&mut self, section: &'static str) -> Result<u8, FormatError> {
        Ok(self.take(1, section)?[0])
    }

    fn u32(&mut self, section: &'static str) -> Result<u32, FormatError> {
        Ok(u32::from_le_bytes(self.take(4, section)?.try_into().unwrap()))
    }

    fn u64(&mut self, section: &'static str) -> Result<u64, FormatError> {
        Ok(u64::from_le_bytes(self.take(8, section)?.try_into().unwrap()))
    }
}

fn inconsistent(offset: usize, msg: impl Into<String>) -> FormatError {
    FormatError::Inconsistent {
        offset: offset as u64,
        msg: msg.into(),
    }
}

fn decode(bytes: &[u8]) -> Result<(CanonicalCatalog, LookupTable, GlobalOrbitIndex)> {
    let mut c = Cursor { bytes, pos: 0 };
    let magic_len = MAGIC.len().min(bytes.len());
    if bytes[..magic_len] != MAGIC[..magic_len] || bytes.len() < MAGIC.len() {
        return Err(FormatError::BadMagic {
            expected: MAGIC.to_vec(),
            found: bytes[..magic_len].to_vec(),
        }
        .into());
    }
    c.pos = MAGIC.len();
    let version_at = c.pos as u64;
    let version = c.u8("header")?;
    if version != FORMAT_VERSION {
        return Err(FormatError::Version {
            offset: version_at,
            expected: FORMAT_VERSION,
            found: version,
        }
        .into());
    }
    let k_at = c.pos;
    let k = c.u8("header")? as usize;
    if k == 0 || k > MAX_TABLE_K {
        return Err(inconsistent(k_at, format!("order k={k} outside 1..={MAX_TABLE_K}")).into());
    }
    let nc_at = c.pos;
    let nc = c.u32("header")? as usize;
    if nc == 0 || nc > MAX_CANONICALS || nc as u64 > table_len(k) {
        return Err(inconsistent(nc_at, format!("canonical count {nc} impossible for k={k}")).into());
    }
    let total_orbits = c.u32("header")?;
    let tag_at = c.pos;
    let tag_len = c.u8("header")? as usize;
    let tag = c.take(tag_len, "header")?;
    if tag != LAYOUT_TAG.as_bytes() {
        return Err(FormatError::LayoutTag {
            offset: tag_at as u64,
            found: String::from_utf8_lossy(tag).into_owned(),
        }
        .into());
    }
    let count_at = c.pos;
    let record_count = c.u64("header")?;
    if record_count != table_len(k) {
        return Err(FormatError::LengthMismatch {
            section: "record count",
            offset: count_at as u64,
            unit: "records",
            expected: table_len(k),
            found: record_count,
        }
        .into());
    }

    let catalog_at = c.pos;
    let entry_len = catalog_entry_len(k) as usize;
    let catalog_bytes = c.take(nc * entry_len, "catalog section")?;
    let mut canonicals = Vec::with_capacity(nc);
    let mut connected = Vec::with_capacity(nc);
    let mut partitions = Vec::with_capacity(nc);
    let mut bases = Vec::with_capacity(nc);
    for (id, entry) in catalog_bytes.chunks_exact(entry_len).enumerate() {
        let at = catalog_at + id * entry_len;
        let bits = u64::from_le_bytes(entry[..8].try_into().unwrap());
        if bits >= table_len(k) || canonicals.last().is_some_and(|&prev| prev >= bits) {
            return Err(inconsistent(at, format!("canonical {id} ({bits}) out of order or range")).into());
        }
        let flag = entry[8];
        if flag > 1 || (flag == 1) != Graphette::new(k, bits as u128)?.is_connected() {
            return Err(inconsistent(at + 8, format!("wrong connected flag for canonical {id}")).into());
        }
        let labels: Vec<usize> = entry[9..9 + k].iter().map(|&l| l as usize).collect();
        let part = OrbitPartition::from_labels(&labels).map_err(|e| inconsistent(at + 9, e.to_string()))?;
        canonicals.push(bits);
        connected.push(flag == 1);
        partitions.push(part);
        bases.push(u32::from_le_bytes(entry[9 + k..].try_into().unwrap()));
    }
    let catalog = CanonicalCatalog {
        k,
        canonicals,
        connected,
        orbit_partitions: partitions,
    };
    let orbits = assign_global_orbit_ids(&catalog)?;
    if orbits.bases() != bases.as_slice() || orbits.total() != total_orbits {
        return Err(inconsistent(catalog_at, "orbit bases disagree with orbit labels").into());
    }

    let records_at = c.pos;
    let remaining = bytes.len() - records_at;
    let needed = (record_count * RECORD_LEN + CHECKSUM_LEN) as usize;
    if remaining != needed {
        let found = remaining.saturating_sub(CHECKSUM_LEN as usize) as u64 / RECORD_LEN;
        return Err(FormatError::LengthMismatch {
            section: "record section",
            offset: records_at as u64,
            unit: "records",
            expected: record_count,
            found,
        }
        .into());
    }
    let checksum_at = bytes.len() - CHECKSUM_LEN as usize;
    let stored = u32::from_le_bytes(bytes[checksum_at..].try_into().unwrap());
    let computed = crc32fast::hash(&bytes[..checksum_at]);
    if stored != computed {
        return Err(FormatError::Checksum {
            offset: checksum_at as u64,
            stored,
            computed,
        }
        .into());
    }

    let mut records = Vec::with_capacity(record_count as usize);
    for (i, chunk) in bytes[records_at..checksum_at].chunks_exact(8).enumerate() {
        let rec = PackedRecord::from_raw(u64::from_le_bytes(chunk.try_into().unwrap()));
        rec.validate(k, nc)
            .map_err(|msg| inconsistent(records_at + 8 * i, msg))?;
        records.push(rec);
    }
    for (id, &bits) in catalog.canonicals.iter().enumerate() {
        let rec = records[bits as usize];
        if rec.canonical_id() as usize != id || !rec.witness(k).is_identity() {
            return Err(inconsistent(
                records_at + 8 * bits as usize,
                format!("canonical {id} does not map to itself"),
            )
            .into());
        }
    }
    Ok((catalog, LookupTable { k, records }, orbits))
}
