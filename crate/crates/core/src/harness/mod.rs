//! Seeded Monte Carlo experiments, pilot constant fitting and result output.

pub mod alternatives;
pub mod check;
pub mod config;
pub mod constants;
pub mod emit;
pub mod executor;
pub mod experiments;
pub mod pilot;

pub use config::{ExperimentConfig, ExperimentKind};
pub use constants::{PinnedConstant, PinnedConstants};
pub use emit::{emit, ExperimentResult, Format, Record};
pub use executor::{resolve_workers, Executor, WORKERS_ENV};
pub use experiments::run;
