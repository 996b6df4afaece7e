//! Trajectory-unravelled noise channels for simulated devices.
//!
//! Depolarizing rates follow the channel convention
//! `ρ ↦ (1 − p)ρ + p·I/d`: with probability `p` a Pauli drawn uniformly from
//! the full d²-element group (identity included) is inserted, so `p = 1`
//! fully randomizes the affected qubits.

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{StateError, Statevector};
use crate::pauli::Pauli;

#[derive(Debug, Error, PartialEq)]
pub enum NoiseError {
    #[error("noise rate {name} = {value} is outside [0, 1]")]
    Rate { name: &'static str, value: f64 },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseModel {
    /// Single-qubit depolarizing strength on every delivered qubit.
    pub prep_depolarizing: f64,
    /// Two-qubit depolarizing strength after every CZ.
    pub cz_depolarizing: f64,
    /// Classical flip probability of each reported outcome.
    pub measure_flip: f64,
    /// Z-flip probability per unmeasured qubit per measurement layer.
    pub idle_dephasing: f64,
}

/// Where in a round a noise channel fires.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NoiseSite {
    Preparation(usize),
    Entangle(usize, usize),
    Idle(usize),
}

impl NoiseModel {
    pub const NOISELESS: NoiseModel =
        NoiseModel { prep_depolarizing: 0.0, cz_depolarizing: 0.0, measure_flip: 0.0, idle_dephasing: 0.0 };

    pub fn validate(&self) -> Result<(), NoiseError> {
        for (name, value) in [
            ("prep_depolarizing", self.prep_depolarizing),
            ("cz_depolarizing", self.cz_depolarizing),
            ("measure_flip", self.measure_flip),
            ("idle_dephasing", self.idle_dephasing),
        ] {
            if !(0.0..=1.0).contains(&value) {
                return Err(NoiseError::Rate { name, value });
            }
        }
        Ok(())
    }

    pub fn is_noiseless(&self) -> bool {
        *self == Self::NOISELESS
    }
}

const PAULIS: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

fn fires<R: Rng + ?Sized>(p: f64, rng: &mut R) -> bool {
    p > 0.0 && rng.random::<f64>() < p
}

/// Applies the channel attached to `site`, sampling one trajectory.
pub fn apply_noise<R: Rng + ?Sized>(
    state: &mut Statevector,
    model: &NoiseModel,
    site: NoiseSite,
    rng: &mut R,
) -> Result<(), StateError> {
    match site {
        NoiseSite::Preparation(q) => {
            if fires(model.prep_depolarizing, rng) {
                state.apply_pauli(q, PAULIS[rng.random_range(0..4)])?;
            }
        }
        NoiseSite::Entangle(a, b) => {
            if fires(model.cz_depolarizing, rng) {
                let k = rng.random_range(0..16);
                state.apply_pauli(a, PAULIS[k / 4])?;
                state.apply_pauli(b, PAULIS[k % 4])?;
            }
        }
        NoiseSite::Idle(q) => {
            if fires(model.idle_dephasing, rng) {
                state.apply_pauli(q, Pauli::Z)?;
            }
        }
    }
    Ok(())
}

/// Classical read-out error.
pub fn flip_outcome<R: Rng + ?Sized>(bit: bool, model: &NoiseModel, rng: &mut R) -> bool {
    bit ^ fires(model.measure_flip, rng)
}
