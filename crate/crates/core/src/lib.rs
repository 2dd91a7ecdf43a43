//! Moment-matching model-order reduction for discrete-time linear
//! parameter-varying (LPV) state-space models with affine scheduling
//! dependence.
//!
//! The model class and its response expansion live in [`model`] and
//! [`markov`]; [`subspace`] computes the reachability and unobservability
//! subspaces by fixed-point iteration; [`reduce`] projects models onto those
//! subspaces so that all sub-Markov parameters up to a chosen word length are
//! preserved, minimizes models, recovers state-space isomorphisms, and checks
//! or certifies how deeply two models agree; [`hankel`] holds the explicit
//! (exponentially large, therefore size-capped) extended matrices used as a
//! cross-check; [`io`] reads and writes the JSON model format; [`fixtures`]
//! provides the built-in example models.

pub mod error;
pub mod fixtures;
pub mod hankel;
pub mod io;
pub mod markov;
pub mod model;
pub mod reduce;
pub mod subspace;

pub use error::{Error, Result, ValidationIssue, ValidationReport};
pub use model::{LpvSsModel, Trajectory};
pub use reduce::{Mode, ReductionResult};
