use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("need at least 2 groups, found {0}")]
    TooFewGroups(usize),
    #[error("group `{0}` is empty")]
    EmptyGroup(String),
    #[error("group `{label}` contains a non-finite value")]
    NonFinite { label: String },
    #[error("zero-spread group: all samples are equal")]
    ZeroSpread,
    #[error("need at least {needed} samples, found {found}")]
    TooFewSamples { needed: usize, found: usize },
    #[error("grid size must be at least 2, got {0}")]
    GridTooSmall(usize),
    #[error("unknown label `{0}`")]
    UnknownLabel(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid conditional table: {0}")]
    InvalidConditional(String),
    #[error("search budget exceeded: {required} evaluations requested, budget is {budget}")]
    BudgetExceeded { required: u128, budget: u128 },
    #[error("overflow: m(k) is only defined here for 1 <= k <= 62, got {0}")]
    Overflow(u32),
    #[error("matrix is not symmetric (|a_ij - a_ji| = {0:e})")]
    NotSymmetric(f64),
    #[error("degenerate anchor pair: the two curves are identical")]
    DegenerateAnchor,
    #[error("no simplex boundary reached: curves are ordered pointwise")]
    NoBoundary,
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("constant input: {0}")]
    ConstantInput(&'static str),
    #[error("empty input: {0}")]
    EmptyInput(&'static str),
    #[error("generator gave up after {0} retries: an x-group stayed too small")]
    RetriesExhausted(usize),
}
