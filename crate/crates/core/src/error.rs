use alloc::string::String;

use crate::Symbol;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid schedule: {0}")]
    Schedule(String),
    #[error("explicit table holds {len} values per function, horizon {horizon} needs more")]
    TableTooShort { len: usize, horizon: u64 },
    #[error("integer overflow evaluating the schedule at n = {0}")]
    Overflow(u64),
    #[error("{name} = {value} is outside its allowed range {allowed}")]
    Parameter {
        name: &'static str,
        value: f64,
        allowed: &'static str,
    },
    #[error("invalid model: {0}")]
    Model(String),
    #[error("symbol {0} is not in the model alphabet")]
    UnknownSymbol(Symbol),
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("search exhausted: {0}")]
    SearchExhausted(String),
    #[error("precision exhausted after {achieved} digits")]
    PrecisionExhausted { achieved: usize },
    #[error("the expansion terminates: {0:?}")]
    FiniteExpansion(alloc::vec::Vec<u64>),
    #[error("censored fraction {fraction} exceeds the budget {budget}")]
    CensoringBudget { fraction: f64, budget: f64 },
    #[error("histograms come from different experiments")]
    IdentityMismatch,
}
