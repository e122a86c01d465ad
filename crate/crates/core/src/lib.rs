//! Chaotic asynchronous iterations of Boolean networks.
//!
//! A map `f: B^n -> B^n` induces the asynchronous iteration graph
//! `Gamma(f)`; the iterations are chaotic exactly when that graph is
//! strongly connected. This crate decides chaoticity, checks sufficient
//! conditions on the signed interaction graph, searches for chaotic maps,
//! measures uniformity of the induced Markov chain and drives a
//! chaos-based pseudorandom bit generator with a small statistical battery.

pub mod bits;
pub mod builtins;
pub mod error;
pub mod exec;
pub mod interaction;
pub mod iteration;
pub mod markov;
pub mod network;
pub mod prng;
pub mod scc;
pub mod search;
pub mod stats;

pub use bits::BitSequence;
pub use error::{Error, Result};
pub use exec::Execution;
pub use interaction::{discrete_jacobian, Sign, SignedDigraph};
pub use iteration::{is_chaotic, IterationGraph};
pub use markov::{
    is_doubly_stochastic, is_regular, mixing_time, stationary_distribution, transition_matrix,
    MixingOptions, Norm, StartVector, TransitionMatrix,
};
pub use network::{BooleanMap, Configuration, Strategy};
pub use prng::{ChaoticGenerator, XorShift32};
pub use search::{
    enumerate_compatible, filter_double_stochastic, generate_and_test, graph_to_map, SearchParams,
};
pub use stats::{run_battery, run_test, TestId, TestParams, TestReport};
