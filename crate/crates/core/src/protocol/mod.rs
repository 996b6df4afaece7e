//! Client/device protocol machinery.
//!
//! A device is an interactive algorithm driven one round at a time:
//! `begin_round → accept_qubit* → entangle_all → measure* → end_round`.
//! The same algorithm answers every round; devices never adapt across
//! rounds. Clients are the plain MBQC driver ([`run_mbqc`]) and the blind
//! driver ([`run_ubqc`]) that pads every angle it sends.

mod client;
mod device;
mod transcript;
pub mod wire;

pub use client::{run_mbqc, run_ubqc, Job};
pub use device::{DeviceSpec, SimulatedDevice, Strategy};
pub use transcript::{
    read_transcripts, write_transcripts, RoundKind, RoundTranscript, TranscriptError, TrapRecord, VertexRecord,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::angle::Angle;
use crate::graph::{Flow, Graph};
use crate::statevector::StateError;

/// Classical description of the single-qubit state the client delivers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Preparation {
    /// `|+_θ⟩`.
    PlusTheta(Angle),
    /// `X^r |0⟩`.
    Dummy(bool),
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum DeviceError {
    #[error("protocol violation: {0}")]
    ProtocolViolation(String),
    #[error("device withheld the outcome of vertex {0}")]
    Withheld(usize),
    #[error("device misconfigured: {0}")]
    Misconfigured(String),
    #[error(transparent)]
    Simulation(#[from] StateError),
    #[error("transport failure: {0}")]
    Transport(String),
}

pub trait Device {
    fn begin_round(&mut self, graph: &Graph, flow: &Flow) -> Result<(), DeviceError>;
    fn accept_qubit(&mut self, vertex: usize, preparation: Preparation) -> Result<(), DeviceError>;
    fn entangle_all(&mut self) -> Result<(), DeviceError>;
    fn measure(&mut self, vertex: usize, delta: Angle) -> Result<bool, DeviceError>;
    fn end_round(&mut self) -> Result<(), DeviceError>;
}

impl<D: Device + ?Sized> Device for &mut D {
    fn begin_round(&mut self, graph: &Graph, flow: &Flow) -> Result<(), DeviceError> {
        (**self).begin_round(graph, flow)
    }
    fn accept_qubit(&mut self, vertex: usize, preparation: Preparation) -> Result<(), DeviceError> {
        (**self).accept_qubit(vertex, preparation)
    }
    fn entangle_all(&mut self) -> Result<(), DeviceError> {
        (**self).entangle_all()
    }
    fn measure(&mut self, vertex: usize, delta: Angle) -> Result<bool, DeviceError> {
        (**self).measure(vertex, delta)
    }
    fn end_round(&mut self) -> Result<(), DeviceError> {
        (**self).end_round()
    }
}

/// Builds identically configured device instances, one per independent
/// random stream, so rounds can run in parallel.
pub trait DeviceFactory: Sync {
    type Device: Device;
    fn instantiate(&self, seed: u64, stream: u64) -> Self::Device;
    fn label(&self) -> String;
}

/// Corrected angle `(−1)^{s_X} φ + s_Z π`.
pub fn mbqc_phi_prime(phi: Angle, s_x: bool, s_z: bool) -> Angle {
    phi.negate_if(s_x) + Angle::pi_if(s_z)
}

/// Blinded angle `(−1)^{s_X} φ + s_Z π + θ + r π`.
pub fn ubqc_delta(phi: Angle, s_x: bool, s_z: bool, theta: Angle, r: bool) -> Angle {
    mbqc_phi_prime(phi, s_x, s_z) + theta + Angle::pi_if(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn phi_prime_examples() {
        assert_eq!(mbqc_phi_prime(Angle::new(0), false, false), Angle::new(0));
        assert_eq!(mbqc_phi_prime(Angle::new(2), true, false), Angle::new(6));
        assert_eq!(mbqc_phi_prime(Angle::new(0), false, true), Angle::new(4));
    }

    #[test]
    fn delta_examples() {
        assert_eq!(ubqc_delta(Angle::new(0), false, false, Angle::new(0), false), Angle::new(0));
        assert_eq!(ubqc_delta(Angle::new(1), true, false, Angle::new(1), false), Angle::new(0));
        assert_eq!(ubqc_delta(Angle::new(1), false, true, Angle::new(2), true), Angle::new(3));
    }

    proptest! {
        #[test]
        fn theta_pad_is_a_bijection(phi in 0u8..8, sx in any::<bool>(), sz in any::<bool>(), r in any::<bool>()) {
            let mut seen = [false; 8];
            for theta in Angle::all() {
                seen[ubqc_delta(Angle::new(phi), sx, sz, theta, r).index() as usize] = true;
            }
            prop_assert!(seen.iter().all(|&s| s));
        }
    }
}
