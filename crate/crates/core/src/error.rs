use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("word length {0} outside 1..=16")]
    LengthOutOfRange(usize),
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("bits {bits:#06x} do not fit in length {length}")]
    BitsOutOfRange { bits: u32, length: usize },
    #[error("coordinate {coord} out of range for length {length}")]
    CoordinateOutOfRange { coord: usize, length: usize },
    #[error("words are at distance {0}, expected 4")]
    NotDistanceFour(u32),
    #[error("invalid quadruple: {0}")]
    InvalidQuadruple(String),
    #[error("word {0} is not a codeword")]
    NotInCode(String),
    #[error("code is empty")]
    EmptyCode,
    #[error("code must contain the zero word")]
    ZeroNotInCode,
    #[error("unsupported code length {0} for this operation")]
    UnsupportedLength(usize),
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("subspace is not contained in the kernel")]
    NotInKernel,
    #[error("subspace has dimension 0")]
    ZeroDimension,
    #[error("Steiner quadruple system axiom failed: {0}")]
    SqsAxiom(String),
    #[error("Steiner triple system axiom failed: {0}")]
    StsAxiom(String),
    #[error("unknown STS(15) signature {0}")]
    UnknownStsType(String),
    #[error("type tuple differs inside a kernel coset at codeword {0}")]
    CosetDisagreement(String),
    #[error("foldability violated: {0}")]
    Foldability(String),
    #[error("kernel dimension {0} outside the supported range 5..=9")]
    KappaOutOfRange(usize),
    #[error("unknown name {0}")]
    UnknownName(String),
    #[error("quadruple set is not a product of pair-partitions")]
    NotAProduct,
    #[error("block sizes sum to {got}, expected {expected}")]
    SizeMismatch { got: usize, expected: usize },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unknown export format {0}")]
    UnknownFormat(String),
    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Tag an error with the pipeline stage that raised it.
pub trait StageExt<T> {
    fn stage(self, stage: &'static str) -> Result<T>;
}

impl<T, E: Into<Error>> StageExt<T> for std::result::Result<T, E> {
    fn stage(self, stage: &'static str) -> Result<T> {
        self.map_err(|e| Error::Stage { stage, source: Box::new(e.into()) })
    }
}
