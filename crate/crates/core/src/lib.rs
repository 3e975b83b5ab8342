//! Resolution and Wu's-method theorem proving with simulated quantum circuits.
//!
//! Classical engines (`resolution`, `poly`) double as oracles for the quantum
//! pipelines (`qresolution`, `qpoly`, `pit`), which are executed on the
//! simulators in `qsim`.

pub mod amplify;
pub mod formula;
pub mod pit;
pub mod poly;
pub mod qpoly;
pub mod qresolution;
pub mod qsim;
pub mod resolution;
pub mod seed;
