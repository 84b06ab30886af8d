use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("unknown structure `{0}` (expected `pm` or `extended15`)")]
    UnknownStructure(String),

    #[error("unknown observable `{0}`")]
    UnknownObservable(String),

    #[error("observable id {0} out of range")]
    ObservableOutOfRange(usize),

    #[error("state id {0} out of range")]
    StateOutOfRange(usize),

    #[error("the identity is not a measurable observable")]
    IdentityObservable,

    #[error("outcome {outcome} for {label} contradicts-certain-prediction")]
    ContradictsCertainPrediction { label: String, outcome: char },

    #[error("stabilizer state must be pure (rank 2), got rank {0}")]
    NotPure(usize),

    #[error("invalid stabilizer generators: {0}")]
    InvalidGenerators(String),

    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },

    #[error("invalid automaton: {0}")]
    Invariant(String),

    #[error("unknown builtin automaton `{0}` (expected A3, A4 or A10)")]
    UnknownBuiltin(String),

    #[error("construction-escapes-state-set: {0}")]
    ConstructionEscapesStateSet(String),

    #[error("operation requires the {expected} structure")]
    WrongStructure { expected: &'static str },

    #[error("incomplete value table")]
    IncompleteTable,

    #[error("invalid trace string: {0}")]
    TraceSyntax(String),

    #[error("invalid search problem: {0}")]
    InvalidProblem(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
