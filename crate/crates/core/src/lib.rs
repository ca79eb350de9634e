//! Numerical toolkit for one-shot multiparty quantum state merging.
//!
//! * [`qstate`]: multipartite states, reductions, Haar sampling, distances, Uhlmann decoders.
//! * [`entropy`]: von Neumann, min-, max- and collision entropies, smoothing and typicality.
//! * [`merge`]: random-measurement merging and split-transfer simulation with analytic bounds.
//! * [`region`]: achievable cost and rate regions.
//! * [`embezzle`]: the harmonic-spectrum embezzling family and its cost comparison.
//!
//! All logarithms are base 2.

pub mod embezzle;
pub mod entropy;
pub mod error;
pub mod linalg;
pub mod merge;
pub mod qstate;
pub mod region;
pub mod rng;

pub use error::{Error, Result};
