use thiserror::Error;

/// Errors shared across the crate.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("division by zero in cyclotomic field")]
    DivisionByZero,

    #[error("cyclotomic order {0} exceeds the configured bound {1}")]
    OrderOverflow(u64, u64),

    #[error("group closure exceeded the order bound {0}")]
    ClosureBound(usize),

    #[error("permutations act on mismatched domains")]
    DomainMismatch,

    #[error("unknown catalog group `{0}`")]
    UnknownCatalogGroup(String),

    #[error("not a virtual character: inner product with irreducible {0} is {1}")]
    NotVirtualCharacter(usize, String),

    #[error("operands belong to different character tables")]
    TableMismatch,

    #[error("subgroup does not belong to the given parent group")]
    SubgroupMismatch,

    #[error("subgroup index is {0}, expected 2")]
    IndexNotTwo(usize),

    #[error("operation requires an effective (non-virtual) character")]
    NotEffective,

    #[error("determinant character is only defined for effective characters")]
    DetOfVirtual,

    #[error("operation requires an irreducible character")]
    NotIrreducible,

    #[error("operation requires a linear character")]
    NotLinear,

    #[error("irreducible index {0} out of range (table has {1})")]
    IrrepOutOfRange(usize, usize),

    #[error("not a symplectic-similitude parameter: {0}")]
    NotSymplectic(String),

    #[error("ambiguous similitude character: candidates {0:?}")]
    AmbiguousSim(Vec<usize>),

    #[error("dimension is {0}, expected {1}")]
    WrongDimension(usize, usize),

    #[error("representation is not self-dual")]
    NotSelfDual,

    #[error("determinant character is not trivial")]
    DetNotTrivial,

    #[error("quotient is not an elementary abelian 2-group")]
    NotElemAbelian2,

    #[error("subgroup is not normal")]
    NotNormal,

    #[error("malformed correspondence map: {0}")]
    BadCorrespondence(String),

    #[error("parse error at {line}:{col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },

    #[error("type error in parameter expression: {0}")]
    ExprType(String),

    #[error("unknown case label `{0}`")]
    UnknownLabel(String),

    #[error("unbound side condition `{0}`")]
    UnboundCondition(String),

    #[error("no matching table row for {0}")]
    NoMatchingRow(String),

    #[error("invariant violation: {0}")]
    Invariant(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("json error: {0}")]
    Json(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
