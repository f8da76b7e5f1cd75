use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot parse exact number {0:?}")]
    ParseNumber(String),

    #[error("cannot parse polynomial {input:?}: {reason}")]
    ParsePolynomial { input: String, reason: String },

    #[error("point {index} has {found} coordinates, expected {expected}")]
    DimensionMismatch {
        index: usize,
        expected: usize,
        found: usize,
    },

    #[error("dimension must be positive")]
    ZeroDimension,

    #[error("{n} points cannot span R^{dim}: at least {} are required", dim + 1)]
    TooFewPoints { n: usize, dim: usize },

    #[error("points do not affinely span R^{dim}")]
    NotSpanning { dim: usize },

    #[error("expected an index set of size {expected}, got {found}")]
    WrongCardinality { expected: usize, found: usize },

    #[error("index {index} is out of range for a configuration of {n} points")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("index {index} is not part of the basis {basis:?}")]
    NotInBasis { index: usize, basis: Vec<usize> },

    #[error("index {index} belongs to the basis {basis:?}")]
    InBasis { index: usize, basis: Vec<usize> },

    #[error("{0:?} is not an affine basis")]
    NotABasis(Vec<usize>),

    #[error("height function has {found} values for {expected} points")]
    HeightLength { expected: usize, found: usize },

    #[error("height function is not generic: lifted subset {subset:?} is affinely dependent off a vertical hyperplane")]
    NonGenericHeight { subset: Vec<usize> },

    #[error("no generic height function found after {attempts} attempts")]
    HeightRetriesExhausted { attempts: usize },

    #[error("query point lies on the hyperplane spanned by {facet:?}")]
    NonGenericPoint { facet: Vec<usize> },

    #[error("polynomial of degree {degree} has no polar form of arity {arity}")]
    DegreeExceedsArity { degree: usize, arity: usize },

    #[error("polar form of arity {expected} evaluated on {found} arguments")]
    ArityMismatch { expected: usize, found: usize },

    #[error("point has {found} coordinates, expected {expected}")]
    PointDimension { expected: usize, found: usize },

    #[error("tiling was built up to order {built}, order {requested} is required")]
    MissingOrder { requested: usize, built: usize },

    #[error("order {k} exceeds the maximal order {max} of the configuration")]
    OrderOutOfRange { k: usize, max: usize },

    #[error("orientation induced by the query point contains a cycle through tile {tile}")]
    Cycle { tile: usize },

    #[error("tiling is corrupted: {0}")]
    Corrupt(String),

    #[error("invalid document: {0}")]
    Document(String),

    #[error("unsupported dimension {0}")]
    UnsupportedDimension(usize),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
