//! Constant-excitation stabilizer codes and their fault-tolerant syndrome
//! extraction under collective coherent noise.
//!
//! The crate is `no_std` with `alloc`. It covers the Pauli algebra, code
//! constructions, a layered circuit representation, noise sampling, a
//! Pauli-frame simulator extended with coherent Z-rotation records, a dense
//! state-vector reference simulator, the two-round error-correction protocol
//! with a lookup decoder, Monte Carlo estimators, channel twirling, and
//! exhaustive searches over small classical codes.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod analysis;
pub mod bits;
pub mod circuit;
pub mod code;
pub mod extraction;
pub mod frame;
pub mod ftec;
pub mod gf2;
pub mod montecarlo;
pub mod noise;
pub mod oracle;
pub mod pauli;
pub mod search;

pub use bits::Bits;

pub use circuit::{Gate, GateKind, Layer, LayeredCircuit, Role};
pub use code::{CssCode, StabilizerCode};
pub use noise::{CcPolicy, NoiseModel};

pub use pauli::{Letter, Pauli, Phase};
