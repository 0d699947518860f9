//! Strobe: compile many-body Hamiltonians from two-body couplings with
//! single-qubit pulses, and protect them with dynamical decoupling.

pub mod compiler;
pub mod decoupling;
pub mod error;
pub mod lattice;
pub mod pauli;
pub mod magnus;
pub mod schedule;
pub mod verifier;

pub use error::{Result, StrobeError};
pub use pauli::{
    commutator_i, CliffordLayer, Frame, Grade, Letter, Pauli, PhasedPauli, Rational, SingleClifford, WeightedPauliSum,
};
