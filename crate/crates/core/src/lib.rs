//! Adiabatic projection of a non-interacting ground state onto an interacting
//! one, with an emulated phase-estimation energy readout and
//! Hellmann-Feynman expectation values.
//!
//! Three truncated-basis models are provided: the displaced harmonic
//! oscillator, the quartic anharmonic oscillator and a potential-scattering
//! model with a contact interaction.

pub mod cli;
mod error;
pub mod evolve;
pub mod hf;
pub mod linalg;
pub mod models;
pub mod oracle;
pub mod readout;
pub mod schedule;

pub use error::{Error, Result};
pub use evolve::{phase_trace, propagate, EvolutionConfig, EvolutionTrace};
pub use hf::{expectation_hf, fidelity_hf, variance_x, HfRequest, HfResult};
pub use linalg::{inner, HermitianOperator, QuantumState, C64};
pub use models::{Model, ModelKind, ModelSpec, Observable};
pub use readout::{measure_energy, rayleigh_energy, EnergyEstimate};
pub use schedule::{Schedule, Shape};
