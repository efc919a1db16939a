//! Constant-time identification of small induced subgraphs ("graphettes",
//! connected or not) and of the automorphism orbit of each of their nodes.
//!
//! For a fixed order `k <= 8` every possible `k`-node graph is encoded as a
//! lower-triangle bit vector. A precomputed [`LookupTable`] maps each bit
//! vector to its canonical (numerically lowest) isomorph together with a
//! witness permutation, and a [`GlobalOrbitIndex`] numbers the automorphism
//! orbits of every canonical. Sampling `k` nodes of a large host graph then
//! costs `O(k^2)` edge tests plus one table fetch.
//!
//! ```
//! use graphette::{Graphette, GraphetteTable};
//!
//! let table = GraphetteTable::build(3, 1, 1).unwrap();
//! assert_eq!(table.canonical_count(), 4);
//! assert_eq!(table.total_orbits(), 6);
//!
//! let edge = Graphette::encode(3, [(2, 1)]).unwrap();
//! let id = table.query(&edge).unwrap();
//! assert_eq!(id.canonical_bits, 1);
//! assert_eq!(edge.apply_permutation(&id.witness).unwrap().bits(), 1);
//! ```

pub mod canon;
pub mod error;
pub mod graphette;
pub mod host;
mod iso;
pub mod orbits;
pub mod perm;
pub mod report;
pub mod sampler;
pub mod store;

pub use canon::{
    build_canonical_map_parallel, build_canonical_map_sequential, merge_siftings, sift_partition, CanonicalCatalog,
    LookupTable, PackedRecord, SiftPartition, MAX_TABLE_K,
};
pub use error::{Error, FormatError, Result};
pub use graphette::{bit_len, bit_position, Graphette, MAX_K};
pub use host::HostGraph;
pub use iso::are_isomorphic;
pub use orbits::{
    assign_global_orbit_ids, compute_catalog_orbits, enumerate_orbits, generate_automorphisms, orbit_partition,
    split_cycles, AutomorphismSet, CycleSet, GlobalOrbitIndex, OrbitPartition,
};
pub use perm::Permutation;
pub use report::{estimate, Report};
pub use sampler::{
    draw_sample, exhaustive_enumerate, sample, SampleAccumulator, SampleDrawer, SamplingStrategy,
    DEFAULT_ENUMERATION_BOUND,
};
pub use store::{deserialize, serialize, GraphetteTable, Identification};
