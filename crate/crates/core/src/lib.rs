//! Deutsch-Jozsa as a scattering quantum walk through an `N`-path
//! interferometer, with per-path ancilla decoherence.
//!
//! * [`walk`]: the graph, edge states and exact three-step evolution.
//! * [`decoherence`]: ancilla overlaps, reduced path density matrix, l1
//!   coherence and the decohered detection probability.
//! * [`decision`]: Bayesian error probabilities for the constant vs balanced
//!   problem, classical sampling against repeated walks.
//! * [`epsilon`]: balanced vs ε-biased, with Chernoff bounds and exact tails.
//! * [`ensemble`]: hypergeometric subsequence law and its binomial limit.
//! * [`montecarlo`]: seeded, parallel simulation of every strategy.

pub mod decision;
pub mod decoherence;
pub mod ensemble;
pub mod epsilon;
pub mod error;
pub mod montecarlo;
pub mod scalar;
pub mod walk;

pub use error::{Error, Result};
pub use walk::{EdgeState, PhasePattern, Promise, Vertex, WalkState};
