use rand::Rng;

use super::{
    mbqc_phi_prime, ubqc_delta, Device, DeviceError, Preparation, RoundKind, RoundTranscript, TrapRecord, VertexRecord,
};
use crate::angle::Angle;
use crate::graph::{Flow, Graph, MeasurementPattern};
use crate::traps::{self, TrapComputation, TrapRole};

/// Work delegated in one blind round.
#[derive(Clone, Copy, Debug)]
pub enum Job<'a> {
    Computation(&'a MeasurementPattern),
    Trap(&'a TrapComputation),
}

impl Job<'_> {
    fn resources(&self) -> (&Graph, &Flow) {
        match self {
            Job::Computation(p) => (p.graph(), p.flow()),
            Job::Trap(t) => (t.graph(), t.flow()),
        }
    }
}

fn parity(bits: &[Option<bool>], set: &[usize]) -> bool {
    set.iter().fold(false, |acc, &j| acc ^ bits[j].unwrap_or(false))
}

/// Plain (non-blind) delegated MBQC: every qubit is sent as `|+⟩`, angles
/// are corrected from earlier outcomes, and the output layer's bits are
/// returned in output-set order.
pub fn run_mbqc<D: Device + ?Sized>(pattern: &MeasurementPattern, device: &mut D) -> Result<Vec<bool>, DeviceError> {
    let result = mbqc_round(pattern, device);
    if result.is_err() {
        let _ = device.end_round();
    }
    result
}

fn mbqc_round<D: Device + ?Sized>(pattern: &MeasurementPattern, device: &mut D) -> Result<Vec<bool>, DeviceError> {
    let graph = pattern.graph();
    device.begin_round(graph, pattern.flow())?;
    for v in 0..graph.num_vertices() {
        device.accept_qubit(v, Preparation::PlusTheta(Angle::ZERO))?;
    }
    device.entangle_all()?;
    let sets = pattern.corrections();
    let mut outcomes = vec![None; graph.num_vertices()];
    for &v in pattern.flow().order() {
        let angle = mbqc_phi_prime(pattern.angle(v), parity(&outcomes, &sets.x[v]), parity(&outcomes, &sets.z[v]));
        outcomes[v] = Some(device.measure(v, angle)?);
    }
    device.end_round()?;
    Ok(graph.outputs().iter().map(|&v| outcomes[v].unwrap_or(false)).collect())
}

/// One blind round. Every non-dummy qubit is sent as `|+_θ⟩` with fresh
/// uniform `θ`, every measured qubit gets a fresh π-pad bit, and dummies
/// are measured at a uniformly random angle. Device failures abort the
/// round: the transcript is returned with `aborted` set, and an aborted
/// trap is scored as failed.
pub fn run_ubqc<D: Device + ?Sized, R: Rng + ?Sized>(
    job: Job<'_>,
    device: &mut D,
    rng: &mut R,
    round: u64,
) -> RoundTranscript {
    let kind = match job {
        Job::Computation(_) => RoundKind::Computation,
        Job::Trap(_) => RoundKind::Trap,
    };
    let mut transcript = RoundTranscript::new(round, kind);
    if let Err(e) = ubqc_round(job, device, rng, &mut transcript) {
        let _ = device.end_round();
        transcript.aborted = Some(e.to_string());
        transcript.result.clear();
    }
    if let Job::Trap(trap) = job {
        let verdict =
            if transcript.is_aborted() { traps::TrapVerdict::Fail } else { traps::check_trap(trap, &transcript) };
        transcript.trap = Some(TrapRecord {
            subset: trap.subset().to_vec(),
            observable: trap.observable().clone(),
            plan: trap.plan().to_vec(),
            expected_parity: traps::expected_parity(trap).expect("graph stabilizers are Hermitian"),
            verdict,
        });
    }
    transcript
}

fn ubqc_round<D: Device + ?Sized, R: Rng + ?Sized>(
    job: Job<'_>,
    device: &mut D,
    rng: &mut R,
    transcript: &mut RoundTranscript,
) -> Result<(), DeviceError> {
    let (graph, flow) = job.resources();
    let n = graph.num_vertices();

    // Secrets: preparation and pad for every vertex.
    let mut preparations = Vec::with_capacity(n);
    let mut pads = Vec::with_capacity(n);
    for v in 0..n {
        let prep = match job {
            Job::Trap(t) => match t.role(v) {
                TrapRole::Dummy { r } => Preparation::Dummy(r),
                _ => Preparation::PlusTheta(Angle::new(rng.random_range(0..8))),
            },
            Job::Computation(_) => Preparation::PlusTheta(Angle::new(rng.random_range(0..8))),
        };
        preparations.push(prep);
        pads.push(matches!(prep, Preparation::PlusTheta(_)) && rng.random::<bool>());
    }

    device.begin_round(graph, flow)?;
    for (v, &prep) in preparations.iter().enumerate() {
        device.accept_qubit(v, prep)?;
    }
    device.entangle_all()?;

    let mut unblinded: Vec<Option<bool>> = vec![None; n];
    for &v in flow.order() {
        let delta = match (preparations[v], job) {
            (Preparation::Dummy(_), _) => Angle::new(rng.random_range(0..8)),
            (Preparation::PlusTheta(theta), Job::Computation(p)) => {
                let sets = p.corrections();
                ubqc_delta(p.angle(v), parity(&unblinded, &sets.x[v]), parity(&unblinded, &sets.z[v]), theta, pads[v])
            }
            (Preparation::PlusTheta(theta), Job::Trap(t)) => {
                let target = t.role(v).target_angle().expect("non-dummy roles carry an angle");
                ubqc_delta(target, false, false, theta, pads[v])
            }
        };
        transcript.records.push(VertexRecord {
            vertex: v,
            preparation: preparations[v],
            pad: pads[v],
            delta,
            outcome: None,
        });
        let reported = device.measure(v, delta)?;
        transcript.records.last_mut().expect("just pushed").outcome = Some(reported);
        unblinded[v] = Some(reported ^ pads[v]);
    }
    device.end_round()?;

    if let Job::Computation(_) = job {
        transcript.result = graph.outputs().iter().map(|&v| unblinded[v].unwrap_or(false)).collect();
    }
    Ok(())
}
