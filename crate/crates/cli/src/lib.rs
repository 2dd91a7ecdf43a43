//! Benchmark harness behind the `lpvred` binary: seeded signal generation,
//! the best-fit-rate metric, and the reduction-versus-original simulation
//! experiment.
//!
//! Everything here is deterministic by construction — a fixed seed produces
//! byte-identical reports across runs — so experiment output can be diffed,
//! committed, and reproduced. The one nondeterministic quantity, the
//! wall-clock time of the reduction call, is deliberately kept out of the
//! report type and returned alongside it.

pub mod bfr;
pub mod experiment;
pub mod signals;

pub use bfr::{bfr, BfrStats};
pub use experiment::{run_compare, CompareReport, ExperimentSpec};
pub use signals::{random_signals, SchedRange};
