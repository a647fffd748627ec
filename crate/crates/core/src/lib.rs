//! Simulation laboratory for joint LDPC / slotted random access decoding.
//!
//! Users encode packets with LDPC codes, map the BPSK symbols onto shared
//! channel slots via an access scheme, and a single belief-propagation
//! decoder resolves slot collisions and LDPC parity jointly on a three-layer
//! Tanner graph (variable nodes between slot checks and parity checks).

pub mod access;
pub mod capacity;
pub mod channel;
pub mod cli;
pub mod cycles;
pub mod decoder;
pub mod graph;
pub mod ldpc;
pub mod sim;
