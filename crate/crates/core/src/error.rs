use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("Gram matrix is not symmetric positive definite")]
    BadGram,
    #[error("generated group exceeds {0} elements")]
    GroupNotFinite(usize),
    #[error("generator {0} is not unimodular")]
    NotUnimodular(usize),
    #[error("holonomy element {0} does not preserve the Gram matrix")]
    NotIsometric(usize),
    #[error("vector system is inconsistent at holonomy element {0}")]
    InconsistentVectorSystem(usize),
    #[error("group has torsion: holonomy element {0} admits a finite-order lift")]
    HasTorsion(usize),
    #[error("expected {expected} translation generators, found {found}")]
    GeneratorCountMismatch { expected: usize, found: usize },
    #[error("sublattice is not saturated")]
    NotSaturated,
    #[error("sublattice is not invariant under the group")]
    NotInvariant,
    #[error("subspace must be nonzero and proper (rank {rank} in dimension {n})")]
    NotProper { rank: usize, n: usize },
    #[error("sublattice is not contained in the target lattice")]
    NotContained,
    #[error("subspaces are not complementary")]
    NotComplementary,
    #[error("coset is not generic")]
    NotGeneric,
    #[error("no generic coset among the first {0} candidates")]
    SearchExhausted(usize),
    #[error("invalid group table: {0}")]
    InvalidTable(String),
    #[error("invalid argument: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
