use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum Error {
    #[error("matrix size {n} exceeds the supported limit {limit}")]
    UnsupportedSize { n: usize, limit: usize },
    #[error("matrix is not skew-symmetric at ({i},{j})")]
    NotSkew { i: usize, j: usize },
    #[error("entry ({i},{j}) lies outside the tame range [-{bound},{bound}]")]
    OutOfTameRange { i: usize, j: usize, bound: i64 },
    #[error("size {got} does not match the expected size {want}")]
    SizeMismatch { got: usize, want: usize },
    #[error("sequence is not a permutation of 0..{n}")]
    InvalidPermutation { n: usize },
    #[error("matrix rows are ragged or do not match the declared size {n}")]
    BadShape { n: usize },
    #[error("input is not a tame periodicity shadow: {predicate} fails")]
    NotAShadow { predicate: &'static str },
    #[error("candidate matrix must be symmetric with nonnegative entries")]
    InvalidCartanCandidate,
    #[error("vertices {i} and {j} do not form a 2-cycle")]
    NotATwoCycle { i: usize, j: usize },
    #[error("quiver entries must be nonnegative")]
    NegativeArrowCount,
    #[error("edge list is not a matching: pairs must be disjoint with i != j")]
    InvalidMatching,
    #[error("more than one loop at vertex {i}")]
    TooManyLoops { i: usize },
}
