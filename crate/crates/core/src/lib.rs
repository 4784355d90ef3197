//! Hazard-stopped multiple-return counts for stationary mixing processes.
//!
//! The crate simulates sums of the form "number of simultaneous returns to a
//! count set at times `q_1(n), ..., q_l(n)` before the first simultaneous
//! return to a hazard set", computes the geometric and Poisson laws those sums
//! approach, and evaluates the total-variation error bounds that go with them.
//!
//! Everything here is `no_std` + `alloc`. Parallel execution, configuration
//! files and the command line live in the `geohazard` crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

mod error;

pub mod bounds;
pub mod gauss;
pub mod hazard;
pub mod law;
pub mod oracle;
pub mod process;
pub mod rng;
pub mod schedule;
pub mod words;

pub use error::{Error, Result};
pub use gauss::{CfDigits, GaussModel};
pub use hazard::{
    empirical_merge, ExperimentReport, HazardConfig, Histogram, PoissonConfig, Targets,
    TrialOutcome,
};
pub use law::{DiscreteLaw, HazardBernoulliParams, TailKind, TvdInterval};
pub use process::{MixingProfile, ProcessModel, TargetSets};
pub use schedule::{Gap, ReturnSchedule};
pub use words::CylinderWord;

/// Alphabet symbol. Categorical models use `0..k`, continued-fraction digits
/// use the digit value itself.
pub type Symbol = u64;
