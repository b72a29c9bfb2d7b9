use thiserror::Error;

use crate::ComplexPoint;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("anchor must be exterior or boundary (got {0})")]
    InteriorAnchor(ComplexPoint),
    #[error("anchor lies on the boundary; rotation undefined (got {0})")]
    DegenerateAnchor(ComplexPoint),
    #[error("evaluation at pole {0}")]
    EvaluationAtPole(ComplexPoint),
    #[error("kernel evaluated on diagonal: zeta = {zeta}, z = {z}")]
    KernelDiagonal { zeta: ComplexPoint, z: ComplexPoint },
    #[error("margin {margin} leaves an empty compact (inradius {inradius})")]
    EmptyCompact { margin: f64, inradius: f64 },
    #[error("rank-deficient basis at degree {0}")]
    RankDeficient(usize),
    #[error("evaluation failed at grid point {index} ({point}): {source}")]
    GridPoint {
        index: usize,
        point: ComplexPoint,
        #[source]
        source: Box<Error>,
    },
    #[error("non-finite value at grid point {index} ({point})")]
    NonFinite { index: usize, point: ComplexPoint },
    #[error("too few data points for a fit: {0} (need at least 3)")]
    TooFewPoints(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
