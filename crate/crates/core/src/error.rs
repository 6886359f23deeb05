use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("assignment uses variables outside the {width}-variable width")]
    WidthMismatch { width: usize },

    #[error("variable index {index} out of range for {n} variables")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("the two variable indices must differ (got {0} twice)")]
    SameIndex(usize),

    #[error("{what} supports at most {cap} variables, got {n}")]
    TooManyVariables {
        what: &'static str,
        n: usize,
        cap: usize,
    },

    #[error("polynomial has degree {0}, expected at most 2")]
    NotQuadratic(usize),

    #[error("quadratic has a positive bilinear coefficient on x{} x{}", .0 + 1, .1 + 1)]
    NotSubmodularQuadratic(usize, usize),

    #[error("function is not submodular")]
    NotSubmodular,

    #[error("capacity must be non-negative, got {0}")]
    NegativeCapacity(String),

    #[error("table is not monotone")]
    NotMonotone,

    #[error("expected a table over {expected} variables, got {found}")]
    MbfWidthMismatch { expected: usize, found: usize },

    #[error("duplicate table in the auxiliary-variable set")]
    DuplicateMbf,

    #[error("constant or single-variable table in the auxiliary-variable set")]
    DegenerateMbf,

    #[error("reduction LP too large: {0}")]
    SizeGuard(String),

    #[error("variable {0} is not an auxiliary variable")]
    NotAuxiliary(usize),

    #[error("auxiliary variables {0} and {1} interact through a bilinear term")]
    AuxInteraction(usize, usize),

    #[error("function is not representable with the requested auxiliary variables")]
    NotRepresentable,

    #[error("anchor equality is infeasible")]
    AnchorInfeasible,

    #[error("configuration ruled out for valid parameters: {0}")]
    ForbiddenConfiguration(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("parameters cannot be moved onto the reference partition: {0}")]
    NotNormalizable(String),

    #[error("invalid generator: {0}")]
    InvalidGenerator(String),

    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("internal invariant broken: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;
