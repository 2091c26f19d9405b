use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KdeError {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not symmetric (max asymmetry {asymmetry:e})")]
    NotSymmetric { asymmetry: f64 },
    #[error("matrix is not positive definite (pivot {pivot} = {value:e})")]
    NotPositiveDefinite { pivot: usize, value: f64 },
    #[error("matrix has non-finite entries")]
    NonFinite,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("degenerate range in dimension {dim}: all samples equal and no extension")]
    DegenerateRange { dim: usize },
    #[error("bad grid size {size} in dimension {dim}: every dimension needs at least 2 nodes")]
    BadGridSize { dim: usize, size: usize },
    #[error("bad effective support {support} in dimension {dim} (grid size {size})")]
    BadSupport { dim: usize, support: usize, size: usize },
    #[error("shape mismatch: {left:?} vs {right:?}")]
    ShapeMismatch { left: Vec<usize>, right: Vec<usize> },
    #[error("extraction window {offset:?}+{size:?} exceeds padded shape {padded:?}")]
    WindowOutOfRange {
        offset: Vec<usize>,
        size: Vec<usize>,
        padded: Vec<usize>,
    },
    #[error("numerical residue {residue:e} exceeds gate {gate:e} ({context})")]
    NumericalResidue {
        context: &'static str,
        residue: f64,
        gate: f64,
    },
    #[error("empty sample")]
    EmptySample,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T, E = KdeError> = std::result::Result<T, E>;
