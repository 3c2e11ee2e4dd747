use thiserror::Error;

/// Errors surfaced by the simulator and the combinatorics utilities.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("edge ({0}, {1}) is not present in the graph")]
    MissingEdge(usize, usize),

    #[error("vertex pair ({0}, {1}) is not a pair of distinct vertices below n = {2}")]
    InvalidPair(usize, usize, usize),

    #[error("slot {slot} out of range for sampler with capacity {capacity}")]
    SlotOutOfRange { slot: usize, capacity: usize },

    #[error("sampler has zero total weight")]
    EmptySampler,

    #[error("graph has no triangles")]
    NoTriangles,

    #[error("step i = {i} is outside the domain p > 0 for n = {n}")]
    OutOfDomain { n: usize, i: u64 },

    #[error("precondition violated at index {index}: {reason}")]
    Precondition { index: usize, reason: String },

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("invalid ladder word {word:?}: {reason}")]
    InvalidWord { word: String, reason: String },

    #[error("M = {0} is not supported (need M >= 3)")]
    InvalidM(usize),

    #[error("edge ({y}, {z}) does not belong to the ladder of {word:?}")]
    NotLadderEdge { word: String, y: usize, z: usize },

    #[error("edge ({y}, {z}) of {word:?} has class {class}, not valid for this extension")]
    WrongEdgeClass {
        word: String,
        y: usize,
        z: usize,
        class: String,
    },

    #[error("distinguished vertices are not independent: edge ({0}, {1}) joins two of them")]
    NotIndependent(usize, usize),

    #[error("invalid extension graph: {0}")]
    InvalidExtension(String),

    #[error("density undefined for an extension with no free vertices")]
    UndefinedDensity,

    #[error("invalid root map: {0}")]
    InvalidRootMap(String),

    #[error("homomorphism count overflowed 64 bits")]
    CountOverflow,

    #[error("threshold not reached before p <= 0")]
    ThresholdUnreachable,

    #[error("memory guard: {needed} items requested, limit is {limit}")]
    MemoryGuard { needed: u64, limit: u64 },

    #[error("refused: {0}")]
    Refused(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error on {path}: {message}")]
    Io { path: String, message: String },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
