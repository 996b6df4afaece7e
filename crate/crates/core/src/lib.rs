//! Verification-derived benchmarking of quantum devices over 2D cluster states.
//!
//! The crate simulates a black-box quantum device behind an interactive
//! round interface, delegates measurement patterns to it blindly (every
//! measurement angle the device sees is one-time padded), interleaves
//! stabilizer trap computations, and turns trap statistics into
//! certified lower bounds with Hoeffding-style confidence levels.
//!
//! Module map:
//!
//! - [`pauli`]: exact Pauli algebra over binary symplectic vectors and
//!   graph-state stabilizers.
//! - [`graph`]: graphs, flows, correction sets, measurement patterns and
//!   grid-fit queries.
//! - [`statevector`]: dense simulator plus trajectory noise channels.
//! - [`protocol`]: device interface, simulated devices, MBQC/UBQC clients,
//!   transcripts and the framed wire format.
//! - [`traps`]: trap sampling, compilation and checking.
//! - [`bench`]: robust verification runs, the benchmark scorers and all
//!   confidence-bound arithmetic.
//! - [`characterize`]: width/depth sweeps and certification maps.

pub mod angle;
pub mod bench;
pub mod characterize;
pub mod exec;
pub mod graph;
pub mod pauli;
pub mod protocol;
pub mod rng;
pub mod statevector;
pub mod traps;

pub use angle::Angle;
pub use exec::Execution;
pub use graph::{Flow, Graph, GridDims, MeasurementPattern};
pub use pauli::PauliString;
pub use statevector::{NoiseModel, Statevector, MAX_QUBITS};
