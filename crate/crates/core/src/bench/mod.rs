//! Benchmark runners and scorers.
//!
//! Every runner executes its rounds on per-round random streams and then
//! hands the transcripts to [`score`]. Offline re-scoring calls the same
//! function on stored transcripts, so a certificate can always be audited
//! without re-running the simulation.

mod bounds;

pub use bounds::{
    gamma_confidence, gamma_generic, hoeffding_tail, score_generic, score_optimized, success_lower_bound, BoundError,
    ExponentMode, GenericScore, OptimizedScore,
};

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exec::Execution;
use crate::graph::{resource_hash, Flow, Graph, GridDims, MeasurementPattern};
use crate::protocol::{run_ubqc, DeviceFactory, Job, RoundKind, RoundTranscript};
use crate::rng::client_stream;
use crate::traps::{sample_trap, TrapDistribution, TrapError, TrapVerdict};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Accept,
    Reject,
}

impl Verdict {
    pub fn from_bool(accept: bool) -> Self {
        if accept {
            Verdict::Accept
        } else {
            Verdict::Reject
        }
    }

    pub fn is_accept(self) -> bool {
        self == Verdict::Accept
    }
}

/// Which benchmark a run performs.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BenchMode {
    /// `n` trap rounds, accept iff the failed fraction is below `omega`.
    #[default]
    Protocol1,
    /// `m` robust verification runs, scored by their accept rate.
    GenericCicc,
    /// `m·n` trap rounds, scored by the trap activation rate.
    OptimizedCicc,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchmarkConfig {
    /// Rounds per verification run (or trap rounds in Protocol 1).
    pub n: u64,
    /// Repetitions.
    pub m: u64,
    /// Shift of the generic accept-rate estimate.
    pub beta: f64,
    /// Shift of the trap-rate estimate.
    pub beta_t: f64,
    /// Trap activation threshold per run.
    pub c_t: f64,
    /// Protocol 1 failed-trap threshold.
    pub omega: f64,
    /// Probability that a robust-verification round is a trap.
    pub trap_fraction: f64,
    pub exponent_mode: ExponentMode,
    pub trap_distribution: TrapDistribution,
    pub seed: u64,
}

impl Default for BenchmarkConfig {
    fn default() -> Self {
        BenchmarkConfig {
            n: 50,
            m: 20,
            beta: 0.05,
            beta_t: 0.02,
            c_t: 0.25,
            omega: 0.2,
            trap_fraction: 0.5,
            exponent_mode: ExponentMode::HoeffdingN,
            trap_distribution: TrapDistribution::Uniform,
            seed: 0,
        }
    }
}

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Trap(#[from] TrapError),
    #[error(transparent)]
    Score(#[from] ScoreError),
}

impl BenchmarkConfig {
    pub fn validate(&self) -> Result<(), BenchError> {
        if self.n == 0 || self.m == 0 {
            return Err(BenchError::Config("n and m must be at least 1".into()));
        }
        for (name, value) in [
            ("beta", self.beta),
            ("beta_t", self.beta_t),
            ("c_t", self.c_t),
            ("omega", self.omega),
            ("trap_fraction", self.trap_fraction),
        ] {
            if !(value > 0.0 && value < 1.0) {
                return Err(BenchError::Config(format!("{name} = {value} outside (0, 1)")));
            }
        }
        Ok(())
    }

    /// True when `omega` is large enough that a failed-trap rate below it
    /// no longer certifies anything.
    pub fn omega_is_unsound(&self) -> bool {
        self.omega >= 0.25
    }

    fn total_rounds(&self, mode: BenchMode) -> u64 {
        match mode {
            BenchMode::Protocol1 => self.n,
            BenchMode::GenericCicc | BenchMode::OptimizedCicc => self.m * self.n,
        }
    }
}

/// Outcome of one robust verification run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepetitionRecord {
    pub repetition: u64,
    pub trap_rounds: u64,
    pub computation_rounds: u64,
    pub activated: u64,
    pub aborted_rounds: u64,
    pub flag: Verdict,
    /// Majority-vote output; empty when rejected for lack of a clear vote.
    pub result: Vec<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkResult {
    pub mode: BenchMode,
    pub exponent_mode: ExponentMode,
    pub n: u64,
    pub m: u64,
    pub trap_rounds: u64,
    /// Failed trap rounds over the whole run.
    pub activated_count: u64,
    pub aborted_rounds: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub accepted_count: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z_t: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z_fail: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub repetitions: Vec<RepetitionRecord>,
}

/// A scored run plus the transcripts it was scored from.
#[derive(Clone, Debug)]
pub struct BenchRun {
    pub result: BenchmarkResult,
    pub rounds: Vec<RoundTranscript>,
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum ScoreError {
    #[error("expected {expected} rounds, transcript has {found}")]
    RoundCount { expected: u64, found: u64 },
    #[error("round {index}: expected repetition {repetition} round {round}")]
    OutOfOrder { index: u64, repetition: u64, round: u64 },
    #[error("round {0}: mode only uses trap rounds")]
    UnexpectedComputation(u64),
    #[error("round {0}: trap round without trap record")]
    MissingTrap(u64),
}

/// Per-bit strict majority; `None` with no votes, mismatched lengths, or
/// any tied bit.
pub fn majority_vote(results: &[&[bool]]) -> Option<Vec<bool>> {
    let first = results.first()?;
    if results.iter().any(|r| r.len() != first.len()) {
        return None;
    }
    (0..first.len())
        .map(|bit| {
            let ones = results.iter().filter(|r| r[bit]).count();
            let zeros = results.len() - ones;
            match ones.cmp(&zeros) {
                std::cmp::Ordering::Greater => Some(true),
                std::cmp::Ordering::Less => Some(false),
                std::cmp::Ordering::Equal => None,
            }
        })
        .collect()
}

fn trap_failed(index: u64, round: &RoundTranscript) -> Result<bool, ScoreError> {
    round.rescore_trap().map(|v| v == TrapVerdict::Fail).ok_or(ScoreError::MissingTrap(index))
}

/// Scores one robust verification run from its `n` rounds.
pub fn score_repetition(repetition: u64, rounds: &[RoundTranscript], c_t: f64) -> Result<RepetitionRecord, ScoreError> {
    let mut record = RepetitionRecord {
        repetition,
        trap_rounds: 0,
        computation_rounds: 0,
        activated: 0,
        aborted_rounds: 0,
        flag: Verdict::Reject,
        result: Vec::new(),
    };
    let mut outputs = Vec::new();
    let mut computation_aborted = false;
    for (k, round) in rounds.iter().enumerate() {
        record.aborted_rounds += round.is_aborted() as u64;
        match round.kind {
            RoundKind::Trap => {
                record.trap_rounds += 1;
                record.activated += trap_failed(k as u64, round)? as u64;
            }
            RoundKind::Computation => {
                record.computation_rounds += 1;
                computation_aborted |= round.is_aborted();
                outputs.push(round.result.as_slice());
            }
        }
    }
    let below_threshold = (record.activated as f64) < c_t * rounds.len() as f64;
    if let (false, true, Some(vote)) = (computation_aborted, below_threshold, majority_vote(&outputs)) {
        record.flag = Verdict::Accept;
        record.result = vote;
    }
    Ok(record)
}

/// Recomputes a full result from transcripts in run order.
pub fn score(
    mode: BenchMode,
    config: &BenchmarkConfig,
    rounds: &[RoundTranscript],
) -> Result<BenchmarkResult, ScoreError> {
    let expected = config.total_rounds(mode);
    if rounds.len() as u64 != expected {
        return Err(ScoreError::RoundCount { expected, found: rounds.len() as u64 });
    }
    for (index, round) in rounds.iter().enumerate() {
        let index = index as u64;
        let (repetition, k) = (index / config.n, index % config.n);
        if round.repetition != repetition || round.round != k {
            return Err(ScoreError::OutOfOrder { index, repetition, round: k });
        }
        if mode != BenchMode::GenericCicc && round.kind == RoundKind::Computation {
            return Err(ScoreError::UnexpectedComputation(index));
        }
    }

    let aborted_rounds = rounds.iter().filter(|r| r.is_aborted()).count() as u64;
    let trap_rounds = rounds.iter().filter(|r| r.kind == RoundKind::Trap).count() as u64;
    let mut activated_count = 0;
    for (index, round) in rounds.iter().enumerate() {
        if round.kind == RoundKind::Trap {
            activated_count += trap_failed(index as u64, round)? as u64;
        }
    }
    let mut result = BenchmarkResult {
        mode,
        exponent_mode: config.exponent_mode,
        n: config.n,
        m: if mode == BenchMode::Protocol1 { 1 } else { config.m },
        trap_rounds,
        activated_count,
        aborted_rounds,
        accepted_count: None,
        z: None,
        z_t: None,
        z_fail: None,
        gamma: None,
        verdict: Verdict::Reject,
        repetitions: Vec::new(),
    };
    match mode {
        BenchMode::Protocol1 => {
            let z_fail = activated_count as f64 / config.n as f64;
            result.z_fail = Some(z_fail);
            result.verdict = Verdict::from_bool(z_fail < config.omega);
        }
        BenchMode::OptimizedCicc => {
            let s =
                score_optimized(activated_count, config.m, config.n, config.beta_t, config.c_t, config.exponent_mode);
            result.z = Some(s.z);
            result.z_t = Some(s.z_t);
            result.gamma = Some(s.gamma);
            result.verdict = Verdict::from_bool(s.z > 0.0);
        }
        BenchMode::GenericCicc => {
            let repetitions = rounds
                .chunks(config.n as usize)
                .enumerate()
                .map(|(rep, chunk)| score_repetition(rep as u64, chunk, config.c_t))
                .collect::<Result<Vec<_>, _>>()?;
            let accepted = repetitions.iter().filter(|r| r.flag.is_accept()).count() as u64;
            let s = score_generic(accepted, config.m, config.beta);
            result.accepted_count = Some(accepted);
            result.z = Some(s.z);
            result.gamma = Some(s.gamma);
            result.verdict = Verdict::from_bool(s.z > 0.0);
            result.repetitions = repetitions;
        }
    }
    Ok(result)
}

fn trap_round<F: DeviceFactory>(
    graph: &Graph,
    flow: &Flow,
    config: &BenchmarkConfig,
    factory: &F,
    index: u64,
) -> RoundTranscript {
    let mut rng = client_stream(config.seed, index);
    let trap = sample_trap(graph, flow, &config.trap_distribution, &mut rng).expect("distribution validated");
    let mut device = factory.instantiate(config.seed, index);
    let mut t = run_ubqc(Job::Trap(&trap), &mut device, &mut rng, index % config.n);
    t.repetition = index / config.n;
    t
}

fn mixed_round<F: DeviceFactory>(
    pattern: &MeasurementPattern,
    config: &BenchmarkConfig,
    factory: &F,
    index: u64,
) -> RoundTranscript {
    let mut rng = client_stream(config.seed, index);
    let mut device = factory.instantiate(config.seed, index);
    let round = index % config.n;
    let mut t = if rng.random_bool(config.trap_fraction) {
        let trap = sample_trap(pattern.graph(), pattern.flow(), &config.trap_distribution, &mut rng)
            .expect("distribution validated");
        run_ubqc(Job::Trap(&trap), &mut device, &mut rng, round)
    } else {
        run_ubqc(Job::Computation(pattern), &mut device, &mut rng, round)
    };
    t.repetition = index / config.n;
    t
}

/// One robust verification run: `n` rounds, each independently a trap with
/// probability `trap_fraction`, accepted iff fewer than `c_t·n` traps fire
/// and the computation rounds agree on a strict majority output.
pub fn run_robust_vbqc<F: DeviceFactory>(
    pattern: &MeasurementPattern,
    config: &BenchmarkConfig,
    factory: &F,
    repetition: u64,
    exec: Execution,
) -> Result<(RepetitionRecord, Vec<RoundTranscript>), BenchError> {
    config.validate()?;
    config.trap_distribution.validate(pattern.graph())?;
    let base = repetition * config.n;
    let rounds = exec.map(config.n, |k| mixed_round(pattern, config, factory, base + k));
    let record = score_repetition(repetition, &rounds, config.c_t)?;
    Ok((record, rounds))
}

/// `m` robust verification runs scored by their accept rate.
pub fn run_generic_cicc<F: DeviceFactory>(
    pattern: &MeasurementPattern,
    config: &BenchmarkConfig,
    factory: &F,
    exec: Execution,
) -> Result<BenchRun, BenchError> {
    config.validate()?;
    config.trap_distribution.validate(pattern.graph())?;
    let rounds = exec.map(config.m * config.n, |i| mixed_round(pattern, config, factory, i));
    let result = score(BenchMode::GenericCicc, config, &rounds)?;
    Ok(BenchRun { result, rounds })
}

/// Generic scoring of an arbitrary accept/reject experiment run `m` times.
pub fn run_generic_cicc_with<A>(m: u64, beta: f64, exec: Execution, accepts: A) -> (u64, GenericScore)
where
    A: Fn(u64) -> bool + Sync + Send,
{
    let accepted = exec.map(m, accepts).into_iter().filter(|&a| a).count() as u64;
    (accepted, score_generic(accepted, m, beta))
}

/// `m·n` trap rounds scored by the activation rate.
pub fn run_optimized_cicc<F: DeviceFactory>(
    graph: &Graph,
    flow: &Flow,
    config: &BenchmarkConfig,
    factory: &F,
    exec: Execution,
) -> Result<BenchRun, BenchError> {
    config.validate()?;
    config.trap_distribution.validate(graph)?;
    let rounds = exec.map(config.m * config.n, |i| trap_round(graph, flow, config, factory, i));
    let result = score(BenchMode::OptimizedCicc, config, &rounds)?;
    Ok(BenchRun { result, rounds })
}

/// `n` trap rounds; accept iff the failed fraction is below `omega`.
pub fn run_protocol1<F: DeviceFactory>(
    graph: &Graph,
    flow: &Flow,
    config: &BenchmarkConfig,
    factory: &F,
    exec: Execution,
) -> Result<BenchRun, BenchError> {
    config.validate()?;
    config.trap_distribution.validate(graph)?;
    let rounds = exec.map(config.n, |i| trap_round(graph, flow, config, factory, i));
    let result = score(BenchMode::Protocol1, config, &rounds)?;
    Ok(BenchRun { result, rounds })
}

/// Dispatches on `mode`. Protocol 1 and the optimized benchmark only use
/// the pattern's graph and flow.
pub fn run_mode<F: DeviceFactory>(
    mode: BenchMode,
    pattern: &MeasurementPattern,
    config: &BenchmarkConfig,
    factory: &F,
    exec: Execution,
) -> Result<BenchRun, BenchError> {
    match mode {
        BenchMode::Protocol1 => run_protocol1(pattern.graph(), pattern.flow(), config, factory, exec),
        BenchMode::GenericCicc => run_generic_cicc(pattern, config, factory, exec),
        BenchMode::OptimizedCicc => run_optimized_cicc(pattern.graph(), pattern.flow(), config, factory, exec),
    }
}

/// Machine-readable certificate of a benchmark run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub device: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridDims>,
    pub vertices: usize,
    pub resource_hash: String,
    pub seed: u64,
    pub config: BenchmarkConfig,
    #[serde(flatten)]
    pub result: BenchmarkResult,
}

impl Certificate {
    pub fn new(
        device: String,
        pattern: &MeasurementPattern,
        config: &BenchmarkConfig,
        result: BenchmarkResult,
    ) -> Self {
        let graph = pattern.graph();
        Certificate {
            device,
            grid: graph.grid_dims(),
            vertices: graph.num_vertices(),
            resource_hash: format!("{:016x}", resource_hash(graph, pattern.flow())),
            seed: config.seed,
            config: config.clone(),
            result,
        }
    }
}
