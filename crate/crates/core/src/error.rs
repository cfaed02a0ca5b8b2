use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("agent index {agent} out of range for {n} agents")]
    AgentOutOfRange { agent: usize, n: usize },

    #[error("item index {item} out of range for {m} items")]
    ItemOutOfRange { item: usize, m: usize },

    #[error("item {0} appears more than once in a bundle")]
    DuplicateItem(usize),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid valuation for agent {agent}: {reason}")]
    InvalidValuation { agent: usize, reason: String },

    #[error("invalid entitlements: {0}")]
    InvalidEntitlements(String),

    #[error("table valuation is missing the entry for subset mask {0:#x}")]
    MissingTableEntry(u64),

    #[error("exhaustive check needs m <= {limit}, got m = {m}")]
    TooManyItems { m: usize, limit: usize },

    #[error("enumeration of {states} states exceeds the budget of {budget}")]
    BudgetExceeded { states: f64, budget: u64 },

    #[error("no accepted draw after {retries} attempts")]
    RetriesExhausted { retries: usize },

    #[error("valuations are not identically ordered by item index")]
    NotIdenticallyOrdered,

    #[error("no lower-index good with multiplicity below {tau} to receive a copy of good {good}")]
    NoDonorGood { good: usize, tau: usize },

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("profile does not match instance: {0}")]
    ProfileMismatch(String),

    #[error("operation requires {0}")]
    Unsupported(String),

    #[error("exhaustive search found no allocation meeting {0}")]
    SearchFailed(String),

    #[error("best achievable cost ratio {ratio} exceeds 11/9")]
    RatioAssertionFailed { ratio: f64 },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("i/o failure: {0}")]
    Io(String),

    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
