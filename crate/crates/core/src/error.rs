use thiserror::Error;

use crate::rational::Rational;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("agent {agent}: valuation arity {found} does not match {expected}")]
    ArityMismatch { agent: usize, expected: usize, found: usize },
    #[error("negative quantity: {0}")]
    NegativeQuantity(String),
    #[error("agent {agent}: valuation is not monotone")]
    NonMonotoneValuation { agent: usize },
    #[error("project {project}: total value {value} is below cost {cost}")]
    UncoverableProject { project: usize, value: Box<Rational>, cost: Box<Rational> },
    #[error("table valuation over {projects} projects exceeds the {cap}-project cap")]
    TableTooLarge { projects: usize, cap: usize },
    #[error("index {index} out of range (bound {bound})")]
    IndexOutOfRange { index: usize, bound: usize },
    #[error("project set cannot be funded under weak participation (excess {excess})")]
    NotWpFundable { excess: Rational },
    #[error("{projects} projects exceed the brute-force cap of {cap}")]
    TooManyProjects { projects: usize, cap: usize },
    #[error("knapsack capacity is negative")]
    CapacityNegative,
    #[error("knapsack input is invalid: {0}")]
    InvalidKnapsack(String),
    #[error("dynamic-programming table would need {cells} cells (cap {cap})")]
    DpTableTooLarge { cells: u128, cap: u128 },
    #[error("scaled quantity does not fit a machine word")]
    Overflow,
    #[error("epsilon {0} is outside the permitted range")]
    BadEpsilon(Rational),
    #[error("conflict graph does not match the laminar forest")]
    GraphForestMismatch,
    #[error("solver requires {expected} valuations")]
    WrongValuationClass { expected: &'static str },
    #[error("project costs are not identical")]
    CostsNotIdentical,
    #[error("set family is not laminar: sets {0} and {1} cross")]
    NotLaminar(usize, usize),
    #[error("universe size {0} is not divisible by 3")]
    UniverseNotDivisibleBy3(usize),
    #[error("triple {0} repeats an element")]
    InvalidTriple(usize),
    #[error("invalid set-union knapsack instance: {0}")]
    InvalidSukp(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("schema error at {0}")]
    Schema(String),
    #[error("unsupported vote type {0:?}")]
    UnsupportedVoteType(String),
    #[error("election has no voters")]
    NoVoters,
    #[error("election has no approvals")]
    NoApprovals,
    #[error("experiment uses {projects} projects, above the oracle cap of {cap}")]
    OracleCapExceeded { projects: usize, cap: usize },
    #[error("invalid experiment spec: {0}")]
    InvalidExperiment(String),
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
