use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{Device, DeviceError, DeviceFactory, Preparation};
use crate::angle::Angle;
use crate::graph::{Flow, Graph};
use crate::pauli::PauliString;
use crate::rng::{device_stream, StreamRng};
use crate::statevector::{
    apply_noise, flip_outcome, prepare_dummy, prepare_plus_theta, NoiseModel, NoiseSite, Statevector, MAX_QUBITS,
};

/// Fixed deviation of an adversarial device.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum Strategy {
    /// Honest simulation, every reported bit inverted.
    FlipAllOutcomes,
    /// Always reports 0.
    ConstantZero,
    /// Reports uniformly random bits.
    RandomOutcomes,
    /// Applies `error` to the entangled state with the given probability
    /// each round, then behaves honestly.
    TargetedPauli { error: PauliString, probability: f64 },
    /// Refuses to report any outcome.
    WithholdOutcomes,
}

#[derive(Clone, Debug, PartialEq)]
enum Behavior {
    Honest(NoiseModel),
    Adversary(Strategy),
}

#[derive(Debug)]
enum Phase {
    Preparing(Vec<Option<[Complex64; 2]>>),
    Entangled { state: Statevector, measured: Vec<bool>, layer: Option<usize> },
}

#[derive(Debug)]
struct Round {
    graph: Graph,
    layers: Vec<usize>,
    phase: Phase,
}

/// Statevector-backed device: honest (possibly noisy) or adversarial.
#[derive(Debug)]
pub struct SimulatedDevice {
    behavior: Behavior,
    rng: StreamRng,
    round: Option<Round>,
}

fn violation(msg: impl Into<String>) -> DeviceError {
    DeviceError::ProtocolViolation(msg.into())
}

impl SimulatedDevice {
    pub fn honest(noise: NoiseModel, rng: StreamRng) -> Self {
        SimulatedDevice { behavior: Behavior::Honest(noise), rng, round: None }
    }

    pub fn adversarial(strategy: Strategy, rng: StreamRng) -> Self {
        SimulatedDevice { behavior: Behavior::Adversary(strategy), rng, round: None }
    }

    fn noise(&self) -> NoiseModel {
        match self.behavior {
            Behavior::Honest(noise) => noise,
            Behavior::Adversary(_) => NoiseModel::NOISELESS,
        }
    }

    fn round_mut(&mut self) -> Result<&mut Round, DeviceError> {
        self.round.as_mut().ok_or_else(|| violation("no active round"))
    }

    /// Quantum memory of the active round, once entangled.
    pub fn state(&self) -> Option<&Statevector> {
        match &self.round.as_ref()?.phase {
            Phase::Entangled { state, .. } => Some(state),
            Phase::Preparing(_) => None,
        }
    }
}

impl Device for SimulatedDevice {
    fn begin_round(&mut self, graph: &Graph, flow: &Flow) -> Result<(), DeviceError> {
        let n = graph.num_vertices();
        if n > MAX_QUBITS {
            return Err(crate::statevector::StateError::QubitLimit(n).into());
        }
        if let Behavior::Adversary(Strategy::TargetedPauli { error, probability }) = &self.behavior {
            if error.num_qubits() != n {
                return Err(DeviceError::Misconfigured(format!(
                    "targeted error acts on {} qubits, graph has {n}",
                    error.num_qubits()
                )));
            }
            if !(0.0..=1.0).contains(probability) {
                return Err(DeviceError::Misconfigured(format!("probability {probability} outside [0, 1]")));
            }
        }
        self.round =
            Some(Round { graph: graph.clone(), layers: flow.layers(), phase: Phase::Preparing(vec![None; n]) });
        Ok(())
    }

    fn accept_qubit(&mut self, vertex: usize, preparation: Preparation) -> Result<(), DeviceError> {
        let round = self.round_mut()?;
        let Phase::Preparing(slots) = &mut round.phase else {
            return Err(violation("qubit delivered after entangling"));
        };
        let slot = slots.get_mut(vertex).ok_or_else(|| violation(format!("unknown vertex {vertex}")))?;
        if slot.is_some() {
            return Err(violation(format!("vertex {vertex} delivered twice")));
        }
        *slot = Some(match preparation {
            Preparation::PlusTheta(theta) => prepare_plus_theta(theta),
            Preparation::Dummy(r) => prepare_dummy(r),
        });
        Ok(())
    }

    fn entangle_all(&mut self) -> Result<(), DeviceError> {
        let noise = self.noise();
        let behavior = self.behavior.clone();
        let round = self.round.as_mut().ok_or_else(|| violation("no active round"))?;
        let Phase::Preparing(slots) = &round.phase else {
            return Err(violation("entangled twice"));
        };
        let qubits = slots
            .iter()
            .enumerate()
            .map(|(v, s)| s.ok_or_else(|| violation(format!("vertex {v} never delivered"))))
            .collect::<Result<Vec<_>, _>>()?;
        let mut state = Statevector::product(&qubits)?;
        let rng = &mut self.rng;
        for q in 0..qubits.len() {
            apply_noise(&mut state, &noise, NoiseSite::Preparation(q), rng)?;
        }
        for &(a, b) in round.graph.edges() {
            state.apply_cz(a, b)?;
            apply_noise(&mut state, &noise, NoiseSite::Entangle(a, b), rng)?;
        }
        if let Behavior::Adversary(Strategy::TargetedPauli { error, probability }) = &behavior {
            if rng.random::<f64>() < *probability {
                state.apply_pauli_string(error)?;
            }
        }
        round.phase = Phase::Entangled { state, measured: vec![false; qubits.len()], layer: None };
        Ok(())
    }

    fn measure(&mut self, vertex: usize, delta: Angle) -> Result<bool, DeviceError> {
        let noise = self.noise();
        let round = self.round.as_mut().ok_or_else(|| violation("no active round"))?;
        let Phase::Entangled { state, measured, layer } = &mut round.phase else {
            return Err(violation("measurement before entangling"));
        };
        let done = measured.get_mut(vertex).ok_or_else(|| violation(format!("unknown vertex {vertex}")))?;
        if std::mem::replace(done, true) {
            return Err(violation(format!("vertex {vertex} measured twice")));
        }
        let rng = &mut self.rng;
        let this_layer = round.layers[vertex];
        if *layer != Some(this_layer) {
            *layer = Some(this_layer);
            for (q, &done) in measured.iter().enumerate() {
                if !done || q == vertex {
                    apply_noise(state, &noise, NoiseSite::Idle(q), rng)?;
                }
            }
        }
        let honest = state.measure_xy(vertex, delta, rng)?;
        match &self.behavior {
            Behavior::Honest(noise) => Ok(flip_outcome(honest, noise, rng)),
            Behavior::Adversary(strategy) => match strategy {
                Strategy::FlipAllOutcomes => Ok(!honest),
                Strategy::ConstantZero => Ok(false),
                Strategy::RandomOutcomes => Ok(rng.random()),
                Strategy::TargetedPauli { .. } => Ok(honest),
                Strategy::WithholdOutcomes => Err(DeviceError::Withheld(vertex)),
            },
        }
    }

    fn end_round(&mut self) -> Result<(), DeviceError> {
        self.round.take().map(|_| ()).ok_or_else(|| violation("no active round"))
    }
}

/// Serializable device configuration; doubles as the factory for
/// per-stream instances.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DeviceSpec {
    Honest {
        #[serde(default)]
        noise: NoiseModel,
    },
    Adversary {
        strategy: Strategy,
    },
}

impl DeviceSpec {
    pub fn noiseless() -> Self {
        DeviceSpec::Honest { noise: NoiseModel::NOISELESS }
    }

    pub fn validate(&self) -> Result<(), String> {
        match self {
            DeviceSpec::Honest { noise } => noise.validate().map_err(|e| e.to_string()),
            DeviceSpec::Adversary { strategy: Strategy::TargetedPauli { probability, .. } }
                if !(0.0..=1.0).contains(probability) =>
            {
                Err(format!("targeted_pauli probability {probability} outside [0, 1]"))
            }
            DeviceSpec::Adversary { .. } => Ok(()),
        }
    }
}

impl DeviceFactory for DeviceSpec {
    type Device = SimulatedDevice;

    fn instantiate(&self, seed: u64, stream: u64) -> SimulatedDevice {
        let rng = device_stream(seed, stream);
        match self {
            DeviceSpec::Honest { noise } => SimulatedDevice::honest(*noise, rng),
            DeviceSpec::Adversary { strategy } => SimulatedDevice::adversarial(strategy.clone(), rng),
        }
    }

    fn label(&self) -> String {
        match self {
            DeviceSpec::Honest { noise } if noise.is_noiseless() => "honest(noiseless)".into(),
            DeviceSpec::Honest { noise } => format!(
                "honest(prep={},cz={},flip={},idle={})",
                noise.prep_depolarizing, noise.cz_depolarizing, noise.measure_flip, noise.idle_dephasing
            ),
            DeviceSpec::Adversary { strategy } => match strategy {
                Strategy::FlipAllOutcomes => "adversary(flip_all_outcomes)".into(),
                Strategy::ConstantZero => "adversary(constant_zero)".into(),
                Strategy::RandomOutcomes => "adversary(random_outcomes)".into(),
                Strategy::TargetedPauli { error, probability } => {
                    format!("adversary(targeted_pauli {error} p={probability})")
                }
                Strategy::WithholdOutcomes => "adversary(withhold_outcomes)".into(),
            },
        }
    }
}
