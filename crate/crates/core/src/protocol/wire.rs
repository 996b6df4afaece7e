//! Framed byte-stream transport between a client and a remote device.
//!
//! Each record is `len: u32 LE` followed by `len` bytes: a one-byte tag and
//! a fixed little-endian payload.
//!
//! | tag  | message     | payload                                   |
//! |------|-------------|-------------------------------------------|
//! | 0x01 | BeginRound  | graph_hash: u64, n: u32                   |
//! | 0x02 | Preparation | vertex: u32, kind: u8 (0 plus_theta, 1 dummy), value: u8 |
//! | 0x03 | Entangle    | (none)                                    |
//! | 0x04 | Measure     | vertex: u32, delta: u8                    |
//! | 0x05 | Outcome     | vertex: u32, bit: u8                      |
//! | 0x06 | EndRound    | (none)                                    |
//!
//! The graph and flow are public. Both ends resolve `graph_hash` against a
//! shared [`GraphRegistry`] instead of shipping the edge list.

use std::collections::HashMap;
use std::io::{self, Read, Write};

use thiserror::Error;

use super::{Device, DeviceError, Preparation};
use crate::angle::Angle;
use crate::graph::{resource_hash, standard_grid_flow, Flow, Graph};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Message {
    BeginRound { graph_hash: u64, n: u32 },
    Preparation { vertex: u32, kind: u8, value: u8 },
    Entangle,
    Measure { vertex: u32, delta: u8 },
    Outcome { vertex: u32, bit: u8 },
    EndRound,
}

#[derive(Debug, Error)]
pub enum WireError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("unknown tag 0x{0:02x}")]
    UnknownTag(u8),
    #[error("tag 0x{tag:02x} with {len}-byte record")]
    BadLength { tag: u8, len: usize },
    #[error("unexpected message {0:?}")]
    Unexpected(Message),
    #[error("unknown resource hash {0:016x}")]
    UnknownResource(u64),
    #[error("device error: {0}")]
    Device(#[from] DeviceError),
}

impl Message {
    pub fn tag(&self) -> u8 {
        match self {
            Message::BeginRound { .. } => 0x01,
            Message::Preparation { .. } => 0x02,
            Message::Entangle => 0x03,
            Message::Measure { .. } => 0x04,
            Message::Outcome { .. } => 0x05,
            Message::EndRound => 0x06,
        }
    }

    /// Full frame including the length prefix.
    pub fn encode(&self) -> Vec<u8> {
        let mut body = vec![self.tag()];
        match *self {
            Message::BeginRound { graph_hash, n } => {
                body.extend(graph_hash.to_le_bytes());
                body.extend(n.to_le_bytes());
            }
            Message::Preparation { vertex, kind, value } => {
                body.extend(vertex.to_le_bytes());
                body.extend([kind, value]);
            }
            Message::Measure { vertex, delta } => {
                body.extend(vertex.to_le_bytes());
                body.push(delta);
            }
            Message::Outcome { vertex, bit } => {
                body.extend(vertex.to_le_bytes());
                body.push(bit);
            }
            Message::Entangle | Message::EndRound => {}
        }
        let mut frame = (body.len() as u32).to_le_bytes().to_vec();
        frame.extend(body);
        frame
    }

    /// Decodes one record body (tag + payload, no length prefix).
    pub fn decode(body: &[u8]) -> Result<Message, WireError> {
        let (&tag, payload) = body.split_first().ok_or(WireError::BadLength { tag: 0, len: 0 })?;
        let expect = |len: usize| {
            if payload.len() == len {
                Ok(())
            } else {
                Err(WireError::BadLength { tag, len: body.len() })
            }
        };
        let u32_at = |i: usize| u32::from_le_bytes(payload[i..i + 4].try_into().expect("length checked"));
        Ok(match tag {
            0x01 => {
                expect(12)?;
                let graph_hash = u64::from_le_bytes(payload[..8].try_into().expect("length checked"));
                Message::BeginRound { graph_hash, n: u32_at(8) }
            }
            0x02 => {
                expect(6)?;
                Message::Preparation { vertex: u32_at(0), kind: payload[4], value: payload[5] }
            }
            0x03 => {
                expect(0)?;
                Message::Entangle
            }
            0x04 => {
                expect(5)?;
                Message::Measure { vertex: u32_at(0), delta: payload[4] }
            }
            0x05 => {
                expect(5)?;
                Message::Outcome { vertex: u32_at(0), bit: payload[4] }
            }
            0x06 => {
                expect(0)?;
                Message::EndRound
            }
            other => return Err(WireError::UnknownTag(other)),
        })
    }
}

pub fn write_message<W: Write>(out: &mut W, msg: &Message) -> io::Result<()> {
    out.write_all(&msg.encode())?;
    out.flush()
}

/// Reads one frame; `Ok(None)` on clean end-of-stream at a frame boundary.
pub fn read_message<R: Read>(input: &mut R) -> Result<Option<Message>, WireError> {
    let mut len = [0u8; 4];
    match input.read_exact(&mut len) {
        Ok(()) => {}
        Err(e) if e.kind() == io::ErrorKind::UnexpectedEof => return Ok(None),
        Err(e) => return Err(e.into()),
    }
    let len = u32::from_le_bytes(len) as usize;
    if len == 0 || len > 64 {
        return Err(WireError::BadLength { tag: 0, len });
    }
    let mut body = vec![0u8; len];
    input.read_exact(&mut body)?;
    Message::decode(&body).map(Some)
}

fn preparation_fields(p: Preparation) -> (u8, u8) {
    match p {
        Preparation::PlusTheta(theta) => (0, theta.index()),
        Preparation::Dummy(r) => (1, r as u8),
    }
}

fn preparation_from(kind: u8, value: u8) -> Option<Preparation> {
    match (kind, value) {
        (0, v) => Angle::try_from(v).ok().map(Preparation::PlusTheta),
        (1, 0) => Some(Preparation::Dummy(false)),
        (1, 1) => Some(Preparation::Dummy(true)),
        _ => None,
    }
}

/// Public (graph, flow) resources both ends agree on, keyed by hash.
#[derive(Clone, Debug, Default)]
pub struct GraphRegistry {
    entries: HashMap<u64, (Graph, Flow)>,
}

impl GraphRegistry {
    /// Every grid with at most `max_qubits` vertices, with the standard flow.
    pub fn grids(max_qubits: usize) -> Self {
        let mut reg = GraphRegistry::default();
        for w in 1..=max_qubits {
            for d in 1..=max_qubits / w {
                let g = Graph::grid(w, d).expect("nonzero dims");
                let f = standard_grid_flow(&g).expect("grid");
                reg.register(g, f);
            }
        }
        reg
    }

    pub fn register(&mut self, graph: Graph, flow: Flow) -> u64 {
        let hash = resource_hash(&graph, &flow);
        self.entries.insert(hash, (graph, flow));
        hash
    }

    pub fn get(&self, hash: u64) -> Option<&(Graph, Flow)> {
        self.entries.get(&hash)
    }
}

/// Client-side proxy speaking the framed protocol to a remote device.
#[derive(Debug)]
pub struct FramedDevice<S> {
    stream: S,
}

impl<S: Read + Write> FramedDevice<S> {
    pub fn new(stream: S) -> Self {
        FramedDevice { stream }
    }

    pub fn into_inner(self) -> S {
        self.stream
    }

    fn send(&mut self, msg: Message) -> Result<(), DeviceError> {
        write_message(&mut self.stream, &msg).map_err(|e| DeviceError::Transport(e.to_string()))
    }
}

impl<S: Read + Write> Device for FramedDevice<S> {
    fn begin_round(&mut self, graph: &Graph, flow: &Flow) -> Result<(), DeviceError> {
        self.send(Message::BeginRound { graph_hash: resource_hash(graph, flow), n: graph.num_vertices() as u32 })
    }

    fn accept_qubit(&mut self, vertex: usize, preparation: Preparation) -> Result<(), DeviceError> {
        let (kind, value) = preparation_fields(preparation);
        self.send(Message::Preparation { vertex: vertex as u32, kind, value })
    }

    fn entangle_all(&mut self) -> Result<(), DeviceError> {
        self.send(Message::Entangle)
    }

    fn measure(&mut self, vertex: usize, delta: Angle) -> Result<bool, DeviceError> {
        self.send(Message::Measure { vertex: vertex as u32, delta: delta.index() })?;
        match read_message(&mut self.stream) {
            Ok(Some(Message::Outcome { vertex: v, bit })) if v as usize == vertex && bit <= 1 => Ok(bit == 1),
            Ok(Some(other)) => {
                Err(DeviceError::ProtocolViolation(format!("expected outcome for {vertex}, got {other:?}")))
            }
            Ok(None) => Err(DeviceError::Transport("device closed the stream".into())),
            Err(e) => Err(DeviceError::Transport(e.to_string())),
        }
    }

    fn end_round(&mut self) -> Result<(), DeviceError> {
        self.send(Message::EndRound)
    }
}

/// Device-side loop: decodes frames, drives `device`, and answers every
/// Measure with an Outcome. Returns when the client closes the stream; any
/// device or protocol error ends the session.
pub fn serve<D: Device, S: Read + Write>(
    device: &mut D,
    stream: &mut S,
    registry: &GraphRegistry,
) -> Result<(), WireError> {
    while let Some(msg) = read_message(stream)? {
        match msg {
            Message::BeginRound { graph_hash, n } => {
                let (graph, flow) = registry.get(graph_hash).ok_or(WireError::UnknownResource(graph_hash))?;
                if graph.num_vertices() != n as usize {
                    return Err(WireError::Unexpected(msg));
                }
                device.begin_round(graph, flow)?;
            }
            Message::Preparation { vertex, kind, value } => {
                let prep = preparation_from(kind, value).ok_or(WireError::Unexpected(msg))?;
                device.accept_qubit(vertex as usize, prep)?;
            }
            Message::Entangle => device.entangle_all()?,
            Message::Measure { vertex, delta } => {
                let delta = Angle::try_from(delta).map_err(|_| WireError::Unexpected(msg))?;
                let bit = device.measure(vertex as usize, delta)?;
                write_message(stream, &Message::Outcome { vertex, bit: bit as u8 })?;
            }
            Message::EndRound => device.end_round()?,
            Message::Outcome { .. } => return Err(WireError::Unexpected(msg)),
        }
    }
    Ok(())
}
