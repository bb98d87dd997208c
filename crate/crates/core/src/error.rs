use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("malformed basis: columns are linearly dependent (rank {rank} < {cols})")]
    MalformedBasis { rank: usize, cols: usize },

    #[error("rank mismatch: sublattice has rank {sub}, superlattice has rank {sup}")]
    RankMismatch { sub: usize, sup: usize },

    #[error("sublattice is not contained in the superlattice")]
    NotContained,

    #[error("{0} is not a prime")]
    NotPrime(u64),

    #[error("group order {p}^{n} does not fit in 64 bits")]
    GroupTooLarge { p: u64, n: u32 },

    #[error("subgroup index {index} out of range 0..={n}")]
    IndexOutOfRange { index: u32, n: u32 },

    #[error("group mismatch: {0}")]
    GroupMismatch(String),

    #[error("action invariant violated: {0}")]
    ActionOrder(String),

    #[error("rank sequence is not well defined: {0}")]
    RankSequence(String),

    #[error("filtration invariant violated: {0}")]
    Filtration(String),

    #[error("cohomology quotient has order {index}, which is not a power of {p}")]
    NotPTorsion { index: String, p: u64 },

    #[error("dual cohomology did not stabilize below k = {k_cap}; raise the cap")]
    DualNotStabilized { k_cap: u32 },

    #[error("tower analysis requires a free module (no finite blocks)")]
    FiniteBlocksInTower,

    #[error("invalid block spec: {0}")]
    InvalidSpec(String),
}
