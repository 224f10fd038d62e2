use thiserror::Error;

use crate::lattice::Kind;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degree {0} is outside the del Pezzo range 1..=9")]
    DegreeOutOfRange(i64),

    #[error("product-type lattice requires degree 8, got {0}")]
    ProductDegree(i64),

    #[error("operation requires a {expected:?}-type lattice, got {found:?}")]
    KindMismatch { expected: Kind, found: Kind },

    #[error("coefficient length {found} does not match lattice rank {expected}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("not a lattice automorphism: {0}")]
    NotAnAutomorphism(String),

    #[error("class {0} escapes the set under the group action")]
    NotClosed(String),

    #[error("group of order {order} exceeds the cohomology bound {limit}")]
    CohomologyBound { order: usize, limit: usize },

    #[error("survey infeasible: {0}")]
    Infeasible(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
