use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error at {0}")]
    Parse(#[from] ParseError),
    #[error("tableau node budget of {budget} exceeded")]
    ResourceLimit { budget: usize },
    #[error("finite-model enumeration bound exceeded ({needed} bits > {bound})")]
    OracleBound { needed: usize, bound: usize },
    #[error("reference ontology is inconsistent")]
    InconsistentReference,
    #[error("ontology is inconsistent")]
    InconsistentInput,
    #[error("ontology is already consistent")]
    ConsistentInput,
    #[error("ontology is empty")]
    EmptyOntology,
    #[error("axiom kind not supported here: {0}")]
    UnsupportedAxiom(String),
    #[error("more than {cap} maximal consistent subsets")]
    SubsetCapExceeded { cap: usize },
    #[error("no inconsistency after {attempts} injected axioms")]
    InjectionExhausted { attempts: usize },
    #[error("need at least {needed} non-zero differences, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
