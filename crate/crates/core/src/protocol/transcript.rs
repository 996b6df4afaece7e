use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::Preparation;
use crate::angle::Angle;
use crate::pauli::PauliString;
use crate::traps::{self, TrapRole, TrapVerdict};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RoundKind {
    Computation,
    Trap,
}

/// What the client prepared, sent and received for one vertex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexRecord {
    pub vertex: usize,
    pub preparation: Preparation,
    /// The client's π-pad bit `r′` folded into `delta`.
    pub pad: bool,
    pub delta: Angle,
    /// Raw bit reported by the device.
    pub outcome: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrapRecord {
    pub subset: Vec<usize>,
    pub observable: PauliString,
    pub plan: Vec<TrapRole>,
    pub expected_parity: bool,
    pub verdict: TrapVerdict,
}

/// One delegated round, as persisted in JSONL transcripts.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RoundTranscript {
    #[serde(default)]
    pub repetition: u64,
    pub round: u64,
    pub kind: RoundKind,
    /// In measurement order.
    pub records: Vec<VertexRecord>,
    /// Unblinded output bits of a completed computation round.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub result: Vec<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trap: Option<TrapRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub aborted: Option<String>,
}

impl RoundTranscript {
    pub fn new(round: u64, kind: RoundKind) -> Self {
        RoundTranscript {
            repetition: 0,
            round,
            kind,
            records: Vec::new(),
            result: Vec::new(),
            trap: None,
            aborted: None,
        }
    }

    pub fn record(&self, vertex: usize) -> Option<&VertexRecord> {
        self.records.iter().find(|r| r.vertex == vertex)
    }

    /// Device bit XOR the client's pad.
    pub fn unblinded_outcome(&self, vertex: usize) -> Option<bool> {
        let rec = self.record(vertex)?;
        rec.outcome.map(|b| b ^ rec.pad)
    }

    pub fn deltas(&self) -> impl Iterator<Item = Angle> + '_ {
        self.records.iter().map(|r| r.delta)
    }

    pub fn is_aborted(&self) -> bool {
        self.aborted.is_some()
    }

    /// Re-derives the trap verdict from the stored plan and outcomes.
    pub fn rescore_trap(&self) -> Option<TrapVerdict> {
        let trap = self.trap.as_ref()?;
        if self.aborted.is_some() {
            return Some(TrapVerdict::Fail);
        }
        Some(traps::verdict_from(&trap.observable, &trap.plan, self))
    }
}

#[derive(Debug, Error)]
pub enum TranscriptError {
    #[error("transcript line {line}: {source}")]
    Parse { line: usize, source: serde_json::Error },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// One JSON object per line, one line per round.
pub fn write_transcripts<W: Write>(mut out: W, rounds: &[RoundTranscript]) -> std::io::Result<()> {
    for round in rounds {
        serde_json::to_writer(&mut out, round)?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

pub fn read_transcripts<R: BufRead>(input: R) -> Result<Vec<RoundTranscript>, TranscriptError> {
    let mut rounds = Vec::new();
    for (idx, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let round = serde_json::from_str(&line).map_err(|source| TranscriptError::Parse { line: idx + 1, source })?;
        rounds.push(round);
    }
    Ok(rounds)
}
