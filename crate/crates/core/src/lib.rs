//! Linear canonical flows on complex phase space, coherent-state overlap
//! geometry, object–device amplification orbits, and a truncated Fock-space
//! oracle that checks the closed forms against explicit operator algebra.

pub mod cli;
pub mod coherent_states;
pub mod error;
pub mod fock_oracle;
pub mod linalg;
pub mod measurement;
pub mod phase_space;

pub use error::{Error, Result};
pub use phase_space::{flow, LinearCanonicalMap, PhaseVector, QuadraticGenerator};
