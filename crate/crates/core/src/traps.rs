//! Generalized stabilizer traps.
//!
//! A trap picks a nonempty vertex subset `A`, forms the stabilizer
//! `∏_{a∈A} K_a`, and realizes its measurement with X-Y-plane measurements
//! only: X support is measured at angle 0, Y support at π/2, Z support is
//! replaced by a dummy qubit `X^r|0⟩` (whose `r` plays the role of the
//! Z outcome), and identity support becomes a filler measured at a random
//! angle whose outcome is ignored.

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::angle::Angle;
use crate::graph::{Flow, Graph};
use crate::pauli::{graph_stabilizer, Pauli, PauliError, PauliString};
use crate::protocol::RoundTranscript;
use crate::statevector::MAX_QUBITS;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TrapError {
    #[error(transparent)]
    Pauli(#[from] PauliError),
    #[error("graph of {0} vertices exceeds the simulator limit")]
    TooLarge(usize),
    #[error("trap observable has non-real phase i^{0}")]
    NonHermitian(u8),
    #[error("trap distribution: {0}")]
    Distribution(String),
}

/// How one vertex takes part in a trap round.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "role", rename_all = "snake_case")]
pub enum TrapRole {
    MeasureX,
    MeasureY,
    Dummy { r: bool },
    Filler { angle: Angle },
}

impl TrapRole {
    /// Angle the client intends to measure, for roles that carry one.
    pub fn target_angle(self) -> Option<Angle> {
        match self {
            TrapRole::MeasureX => Some(Angle::ZERO),
            TrapRole::MeasureY => Some(Angle::HALF_PI),
            TrapRole::Filler { angle } => Some(angle),
            TrapRole::Dummy { .. } => None,
        }
    }

    pub fn is_checked(self) -> bool {
        matches!(self, TrapRole::MeasureX | TrapRole::MeasureY)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrapVerdict {
    Pass,
    Fail,
}

/// Sampler over trap subsets.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrapDistribution {
    /// Uniform over all nonempty subsets.
    #[default]
    Uniform,
    /// Uniform over subsets of odd size (odd X/Y support).
    OddSupport,
    /// Uniform over a fixed list.
    Fixed(Vec<Vec<usize>>),
}

impl TrapDistribution {
    pub fn validate(&self, graph: &Graph) -> Result<(), TrapError> {
        let n = graph.num_vertices();
        if n > MAX_QUBITS {
            return Err(TrapError::TooLarge(n));
        }
        if let TrapDistribution::Fixed(list) = self {
            if list.is_empty() {
                return Err(TrapError::Distribution("fixed list is empty".into()));
            }
            for subset in list {
                if subset.is_empty() {
                    return Err(TrapError::Distribution("fixed list contains an empty subset".into()));
                }
                if let Some(&v) = subset.iter().find(|&&v| v >= n) {
                    return Err(TrapError::Distribution(format!("vertex {v} outside graph of {n}")));
                }
            }
        }
        Ok(())
    }

    fn sample_subset<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Vec<usize> {
        let from_mask = |mask: u32| (0..n).filter(|v| mask >> v & 1 == 1).collect::<Vec<_>>();
        let full = 1u32 << n;
        match self {
            TrapDistribution::Uniform => from_mask(rng.random_range(1..full)),
            TrapDistribution::OddSupport => loop {
                let mask = rng.random_range(1..full);
                if mask.count_ones() % 2 == 1 {
                    break from_mask(mask);
                }
            },
            TrapDistribution::Fixed(list) => list[rng.random_range(0..list.len())].clone(),
        }
    }
}

/// A compiled trap: observable plus a per-vertex delivery plan.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrapComputation {
    graph: Graph,
    flow: Flow,
    subset: Vec<usize>,
    observable: PauliString,
    plan: Vec<TrapRole>,
}

impl TrapComputation {
    /// Compiles the trap for `subset`, drawing dummy bits and filler angles.
    pub fn from_subset<R: Rng + ?Sized>(
        graph: &Graph,
        flow: &Flow,
        subset: &[usize],
        rng: &mut R,
    ) -> Result<Self, TrapError> {
        if graph.num_vertices() > MAX_QUBITS {
            return Err(TrapError::TooLarge(graph.num_vertices()));
        }
        let mut subset = subset.to_vec();
        subset.sort_unstable();
        subset.dedup();
        let observable = graph_stabilizer(graph, &subset)?;
        let plan = (0..graph.num_vertices())
            .map(|v| match observable.get(v) {
                Pauli::X => TrapRole::MeasureX,
                Pauli::Y => TrapRole::MeasureY,
                Pauli::Z => TrapRole::Dummy { r: rng.random() },
                Pauli::I => TrapRole::Filler { angle: Angle::new(rng.random_range(0..8)) },
            })
            .collect();
        Ok(TrapComputation { graph: graph.clone(), flow: flow.clone(), subset, observable, plan })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn flow(&self) -> &Flow {
        &self.flow
    }

    pub fn subset(&self) -> &[usize] {
        &self.subset
    }

    pub fn observable(&self) -> &PauliString {
        &self.observable
    }

    pub fn plan(&self) -> &[TrapRole] {
        &self.plan
    }

    pub fn role(&self, v: usize) -> TrapRole {
        self.plan[v]
    }
}

pub fn sample_trap<R: Rng + ?Sized>(
    graph: &Graph,
    flow: &Flow,
    dist: &TrapDistribution,
    rng: &mut R,
) -> Result<TrapComputation, TrapError> {
    dist.validate(graph)?;
    let subset = dist.sample_subset(graph.num_vertices(), rng);
    TrapComputation::from_subset(graph, flow, &subset, rng)
}

/// Parity of an observable phase and the dummy bits standing in for its
/// Z support.
pub fn parity_from_plan(observable: &PauliString, plan: &[TrapRole]) -> Result<bool, TrapError> {
    if !observable.is_hermitian() {
        return Err(TrapError::NonHermitian(observable.phase()));
    }
    let dummies = plan
        .iter()
        .filter_map(|role| match role {
            TrapRole::Dummy { r } => Some(*r),
            _ => None,
        })
        .fold(false, |acc, r| acc ^ r);
    Ok((observable.phase() == 2) ^ dummies)
}

/// XOR of unblinded outcomes over the X/Y-measured vertices a noiseless
/// device must reproduce.
pub fn expected_parity(trap: &TrapComputation) -> Result<bool, TrapError> {
    parity_from_plan(&trap.observable, &trap.plan)
}

/// XOR of unblinded outcomes over checked vertices; `None` if any is missing.
pub fn observed_parity(plan: &[TrapRole], transcript: &RoundTranscript) -> Option<bool> {
    let mut parity = false;
    for (v, role) in plan.iter().enumerate() {
        if role.is_checked() {
            parity ^= transcript.unblinded_outcome(v)?;
        }
    }
    Some(parity)
}

/// `Fail` ("activated trap") iff the observed parity differs from the
/// expectation or a checked outcome is missing.
pub fn check_trap(trap: &TrapComputation, transcript: &RoundTranscript) -> TrapVerdict {
    verdict_from(&trap.observable, &trap.plan, transcript)
}

pub(crate) fn verdict_from(observable: &PauliString, plan: &[TrapRole], transcript: &RoundTranscript) -> TrapVerdict {
    match (parity_from_plan(observable, plan), observed_parity(plan, transcript)) {
        (Ok(expected), Some(observed)) if expected == observed => TrapVerdict::Pass,
        _ => TrapVerdict::Fail,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::standard_grid_flow;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn grid(w: usize, d: usize) -> (Graph, Flow) {
        let g = Graph::grid(w, d).unwrap();
        let f = standard_grid_flow(&g).unwrap();
        (g, f)
    }

    #[test]
    fn path_single_generator_plan() {
        let (g, f) = grid(1, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let t = TrapComputation::from_subset(&g, &f, &[0], &mut rng).unwrap();
        assert_eq!(t.observable().to_string(), "+XZ");
        assert_eq!(t.role(0), TrapRole::MeasureX);
        assert!(matches!(t.role(1), TrapRole::Dummy { .. }));
    }

    #[test]
    fn path_full_subset_is_yy() {
        let (g, f) = grid(1, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let t = TrapComputation::from_subset(&g, &f, &[0, 1], &mut rng).unwrap();
        assert_eq!(t.observable().to_string(), "+YY");
        assert_eq!(t.plan(), &[TrapRole::MeasureY, TrapRole::MeasureY]);
        assert!(!expected_parity(&t).unwrap());
    }

    #[test]
    fn single_vertex_trap() {
        let (g, f) = grid(1, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let t = sample_trap(&g, &f, &TrapDistribution::Uniform, &mut rng).unwrap();
        assert_eq!(t.plan(), &[TrapRole::MeasureX]);
        assert!(!expected_parity(&t).unwrap());
    }

    #[test]
    fn dummy_bit_enters_parity() {
        let obs: PauliString = "+XZ".parse().unwrap();
        assert!(!parity_from_plan(&obs, &[TrapRole::MeasureX, TrapRole::Dummy { r: false }]).unwrap());
        assert!(parity_from_plan(&obs, &[TrapRole::MeasureX, TrapRole::Dummy { r: true }]).unwrap());
        let neg: PauliString = "-XZ".parse().unwrap();
        assert!(parity_from_plan(&neg, &[TrapRole::MeasureX, TrapRole::Dummy { r: true }]).is_ok_and(|p| !p));
        let bad: PauliString = "+iXZ".parse().unwrap();
        assert_eq!(
            parity_from_plan(&bad, &[TrapRole::MeasureX, TrapRole::Dummy { r: true }]),
            Err(TrapError::NonHermitian(1))
        );
    }

    #[test]
    fn distributions_never_yield_empty_or_even_when_odd() {
        let (g, f) = grid(2, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..500 {
            let t = sample_trap(&g, &f, &TrapDistribution::Uniform, &mut rng).unwrap();
            assert!(!t.subset().is_empty());
            let t = sample_trap(&g, &f, &TrapDistribution::OddSupport, &mut rng).unwrap();
            assert_eq!(t.subset().len() % 2, 1);
            let checked = t.plan().iter().filter(|r| r.is_checked()).count();
            assert_eq!(checked, t.subset().len());
        }
    }

    #[test]
    fn fixed_distribution_validation() {
        let (g, f) = grid(1, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(sample_trap(&g, &f, &TrapDistribution::Fixed(vec![]), &mut rng).is_err());
        assert!(sample_trap(&g, &f, &TrapDistribution::Fixed(vec![vec![]]), &mut rng).is_err());
        assert!(sample_trap(&g, &f, &TrapDistribution::Fixed(vec![vec![5]]), &mut rng).is_err());
        let t = sample_trap(&g, &f, &TrapDistribution::Fixed(vec![vec![1]]), &mut rng).unwrap();
        assert_eq!(t.observable().to_string(), "+ZX");
    }

    #[test]
    fn plan_follows_observable_support() {
        let (g, f) = grid(3, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..200 {
            let t = sample_trap(&g, &f, &TrapDistribution::Uniform, &mut rng).unwrap();
            for v in 0..9 {
                let ok = matches!(
                    (t.observable().get(v), t.role(v)),
                    (Pauli::X, TrapRole::MeasureX)
                        | (Pauli::Y, TrapRole::MeasureY)
                        | (Pauli::Z, TrapRole::Dummy { .. })
                        | (Pauli::I, TrapRole::Filler { .. })
                );
                assert!(ok);
            }
        }
    }
}
