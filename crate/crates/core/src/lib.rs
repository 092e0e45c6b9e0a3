//! Toolkit for measuring how fast randomised search heuristics close the gap
//! to the optimum on pseudo-Boolean benchmarks.
//!
//! The crate has three layers that are meant to be played against each other:
//!
//! * [`heuristics`] and [`simulate`] run RLS, the (1+1) EA and fixed-temperature
//!   simulated annealing and average their approximation error by Monte Carlo.
//! * [`oracle`] builds the exact transition matrix of the same kernels for small
//!   dimensions and computes the expected error `e[t]` without sampling noise.
//! * [`bounds`] evaluates closed-form exponential envelopes `e[0](1-δ)^t` and the
//!   ratio functions they are derived from.
//!
//! [`experiment`] wires the three together behind the `budgetlab` CLI.

pub mod bounds;
pub mod error;
pub mod experiment;
pub mod fitness;
pub mod heuristics;
pub mod oracle;
pub mod simulate;

pub use error::{Error, Result};
pub use fitness::{BitString, FitnessKind, FitnessSpec};
pub use heuristics::{AlgorithmKind, AlgorithmSpec, Kernel, RngStream};
