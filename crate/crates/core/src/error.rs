use thiserror::Error;

/// Errors raised by the engine.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("domain mismatch: {0}")]
    DomainMismatch(String),
    #[error("hom-set cardinality {cardinality} exceeds the enumeration cap {cap}")]
    CapExceeded { cardinality: u128, cap: u128 },
    #[error("objects live in different backends: {0}")]
    BackendMismatch(String),
    #[error("morphisms are not parallel")]
    NotParallel,
    #[error("chain is not composable at position {0}")]
    NotComposable(usize),
    #[error("invalid object: {0}")]
    InvalidObject(String),
    #[error("invalid morphism: {0}")]
    InvalidMorphism(String),
    #[error("square does not commute: {0}")]
    NotSquare(String),
    #[error("cocone is not compatible with the diagram: {0}")]
    IncompatibleCocone(String),
    #[error("stage `{0}` carries no comultiplication")]
    MissingComult(String),
    #[error("stage `{0}` carries no multiplication")]
    MissingMult(String),
    #[error("sequence not converged: {0}")]
    NotConverged(String),
    #[error("structures live over different stages: {0}")]
    StageMismatch(String),
    #[error("lifting data incomplete: {0}")]
    IncompleteData(String),
    #[error("morphism is not invertible")]
    NotIso,
    #[error("pair is not contractible: {0} fails")]
    NotContractible(String),
    #[error("not a coalgebra: {0} fails")]
    NotCoalgebra(String),
    #[error("not an algebra: {0} fails")]
    NotAlgebra(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
    #[error("json: {0}")]
    Json(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}
