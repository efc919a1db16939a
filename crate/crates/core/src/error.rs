use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("order k={k} is outside the supported range 1..={max}")]
    OrderOutOfRange { k: usize, max: usize },

    #[error("bit vector {bits:#x} does not fit in {bit_len} bits (k={k})")]
    BitsOutOfRange { k: usize, bits: u128, bit_len: usize },

    #[error("node {node} is out of range for {n} nodes")]
    NodeOutOfRange { node: usize, n: usize },

    #[error("self-loop on node {0}")]
    SelfLoop(usize),

    #[error("node {0} appears more than once")]
    DuplicateNode(usize),

    #[error("size mismatch: expected {expected} nodes, found {found}")]
    SizeMismatch { expected: usize, found: usize },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("empty bit-vector range {start}..{end}")]
    EmptyRange { start: u64, end: u64 },

    #[error("partitions do not tile the bit-vector space: {0}")]
    NonTiling(String),

    #[error("orbit partitions missing: {found} computed for {expected} canonicals")]
    MissingOrbits { expected: usize, found: usize },

    #[error("automorphism set was generated for a different graphette")]
    MismatchedAutomorphisms,

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("host graph has no nodes")]
    EmptyGraph,

    #[error("host graph has {n} nodes, fewer than k={k}")]
    GraphTooSmall { n: usize, k: usize },

    #[error("edge expansion needs at least one edge in the host graph")]
    NoEdges,

    #[error("exhaustive enumeration needs {subsets} subsets, above the bound of {bound}")]
    BoundExceeded { subsets: u128, bound: u128 },

    #[error("no samples have been accumulated")]
    NoSamples,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Format(#[from] FormatError),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Problems found while decoding a table file. Offsets are byte offsets into the file.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum FormatError {
    #[error("bad magic at offset 0: expected {expected:?}, found {found:?}")]
    BadMagic { expected: Vec<u8>, found: Vec<u8> },

    #[error("unsupported format version {found} at offset {offset} (expected {expected})")]
    Version { offset: u64, expected: u8, found: u8 },

    #[error("unknown bit layout tag {found:?} at offset {offset}")]
    LayoutTag { offset: u64, found: String },

    #[error("truncated {section} at offset {offset}: needed {needed} more bytes, {available} available")]
    Truncated {
        section: &'static str,
        offset: u64,
        needed: u64,
        available: u64,
    },

    #[error("{section} length mismatch at offset {offset}: expected {expected} {unit}, found {found}")]
    LengthMismatch {
        section: &'static str,
        offset: u64,
        unit: &'static str,
        expected: u64,
        found: u64,
    },

    #[error("checksum mismatch at offset {offset}: stored {stored:#010x}, computed {computed:#010x}")]
    Checksum { offset: u64, stored: u32, computed: u32 },

    #[error("inconsistent content at offset {offset}: {msg}")]
    Inconsistent { offset: u64, msg: String },
}
