//! Desk-scale simulator of topological quantum computation with Majorana
//! vortices in a chiral p-wave superfluid.
//!
//! The crate models vortex-bound Majorana zero modes on a dense Fock space,
//! applies braid exchanges and collision phase gates exactly, and layers the
//! experiment protocols on top: braid-gate synthesis, probabilistic
//! entanglement generation between flying and vortex qubits, a CHSH test,
//! and the measurement-based deterministic two-qubit phase gate.
//!
//! Start from the `examples/` directory: each example exercises one
//! capability end to end. The `topoqsim` binary wraps the same entry points
//! behind config-file-driven subcommands.

pub mod algebra;
pub mod clifford;
pub mod collision;
pub mod encoding;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod protocols;
pub mod quad;
pub mod synth;

pub use error::{Error, Result};
