//! n-qubit Pauli strings in binary symplectic form with exact phases.
//!
//! A string is `i^phase · σ_0 ⊗ … ⊗ σ_{n-1}` where `σ_v` is decoded from
//! `(x_v, z_v)`: `(0,0)=I`, `(1,0)=X`, `(0,1)=Z`, `(1,1)=Y`. Phases are
//! tracked as an exponent of `i` mod 4; nothing here touches floating point.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::graph::Graph;

/// Largest graph for which the full stabilizer group is enumerated.
pub const MAX_ENUMERATION_VERTICES: usize = 12;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PauliError {
    #[error("qubit count mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("pauli string must act on at least one qubit")]
    Empty,
    #[error("invalid pauli string {0:?}")]
    Parse(String),
    #[error("stabilizer subset must be nonempty")]
    EmptySubset,
    #[error("vertex {vertex} outside graph of {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("graph has {0} vertices; enumeration is limited to {MAX_ENUMERATION_VERTICES}")]
    TooLarge(usize),
}

/// Single-qubit Pauli factor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn from_bits(x: bool, z: bool) -> Pauli {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (false, true) => Pauli::Z,
            (true, true) => Pauli::Y,
        }
    }

    pub fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Z => (false, true),
            Pauli::Y => (true, true),
        }
    }

    fn letter(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PauliString {
    x: Vec<bool>,
    z: Vec<bool>,
    phase: u8,
}

/// Exponent of `i` picked up by `σ(x1,z1) · σ(x2,z2)`, as a value in -1..=1.
fn product_phase(x1: bool, z1: bool, x2: bool, z2: bool) -> i8 {
    let (x2i, z2i) = (x2 as i8, z2 as i8);
    match (x1, z1) {
        (false, false) => 0,
        (true, true) => z2i - x2i,
        (true, false) => z2i * (2 * x2i - 1),
        (false, true) => x2i * (1 - 2 * z2i),
    }
}

impl PauliString {
    pub fn identity(n: usize) -> Result<Self, PauliError> {
        if n == 0 {
            return Err(PauliError::Empty);
        }
        Ok(PauliString { x: vec![false; n], z: vec![false; n], phase: 0 })
    }

    /// Builds `i^phase · ⊗ paulis`.
    pub fn from_paulis(paulis: &[Pauli], phase: u8) -> Result<Self, PauliError> {
        if paulis.is_empty() {
            return Err(PauliError::Empty);
        }
        let (x, z) = paulis.iter().map(|p| p.bits()).unzip();
        Ok(PauliString { x, z, phase: phase % 4 })
    }

    /// A single non-trivial factor on `qubit`.
    pub fn single(n: usize, qubit: usize, pauli: Pauli) -> Result<Self, PauliError> {
        let mut out = Self::identity(n)?;
        if qubit >= n {
            return Err(PauliError::VertexOutOfRange { vertex: qubit, n });
        }
        let (x, z) = pauli.bits();
        out.x[qubit] = x;
        out.z[qubit] = z;
        Ok(out)
    }

    pub fn num_qubits(&self) -> usize {
        self.x.len()
    }

    /// Exponent `k` of the global factor `i^k`.
    pub fn phase(&self) -> u8 {
        self.phase
    }

    pub fn x_bits(&self) -> &[bool] {
        &self.x
    }

    pub fn z_bits(&self) -> &[bool] {
        &self.z
    }

    pub fn get(&self, qubit: usize) -> Pauli {
        Pauli::from_bits(self.x[qubit], self.z[qubit])
    }

    pub fn is_identity(&self) -> bool {
        self.phase == 0 && self.x.iter().chain(&self.z).all(|b| !b)
    }

    /// True when the bit pattern is all-identity, ignoring phase.
    pub fn is_trivial(&self) -> bool {
        self.x.iter().chain(&self.z).all(|b| !b)
    }

    /// Hermitian strings carry a real phase (±1).
    pub fn is_hermitian(&self) -> bool {
        self.phase.is_multiple_of(2)
    }

    pub fn weight(&self) -> usize {
        self.x.iter().zip(&self.z).filter(|(x, z)| **x || **z).count()
    }

    fn check_len(&self, other: &PauliString) -> Result<(), PauliError> {
        if self.x.len() != other.x.len() {
            return Err(PauliError::LengthMismatch(self.x.len(), other.x.len()));
        }
        Ok(())
    }

    /// Operator product `self · other`.
    pub fn mul(&self, other: &PauliString) -> Result<PauliString, PauliError> {
        self.check_len(other)?;
        let mut exponent = i32::from(self.phase) + i32::from(other.phase);
        let mut x = Vec::with_capacity(self.x.len());
        let mut z = Vec::with_capacity(self.x.len());
        for q in 0..self.x.len() {
            exponent += i32::from(product_phase(self.x[q], self.z[q], other.x[q], other.z[q]));
            x.push(self.x[q] ^ other.x[q]);
            z.push(self.z[q] ^ other.z[q]);
        }
        Ok(PauliString { x, z, phase: exponent.rem_euclid(4) as u8 })
    }

    /// Symplectic commutation test.
    pub fn commutes(&self, other: &PauliString) -> Result<bool, PauliError> {
        self.check_len(other)?;
        let parity = (0..self.x.len()).filter(|&q| (self.x[q] & other.z[q]) ^ (self.z[q] & other.x[q])).count();
        Ok(parity % 2 == 0)
    }
}

/// Free-function form of [`PauliString::commutes`].
pub fn commutes(p: &PauliString, q: &PauliString) -> Result<bool, PauliError> {
    p.commutes(q)
}

/// Generator `K_a = X_a ∏_{b∈N(a)} Z_b` of the graph-state stabilizer group.
pub fn stabilizer_generator(graph: &Graph, vertex: usize) -> Result<PauliString, PauliError> {
    let n = graph.num_vertices();
    if vertex >= n {
        return Err(PauliError::VertexOutOfRange { vertex, n });
    }
    let mut k = PauliString::identity(n)?;
    k.x[vertex] = true;
    for &b in graph.neighbors(vertex) {
        k.z[b] = true;
    }
    Ok(k)
}

/// The product `∏_{a∈subset} K_a` with its exact phase.
pub fn graph_stabilizer(graph: &Graph, subset: &[usize]) -> Result<PauliString, PauliError> {
    if subset.is_empty() {
        return Err(PauliError::EmptySubset);
    }
    let mut acc = PauliString::identity(graph.num_vertices())?;
    for &a in subset {
        acc = acc.mul(&stabilizer_generator(graph, a)?)?;
    }
    Ok(acc)
}

/// Fraction of the full stabilizer group (all `2^|V|` elements, identity
/// included) that anticommutes with `error`.
pub fn detection_fraction(graph: &Graph, error: &PauliString) -> Result<Ratio<u64>, PauliError> {
    let n = graph.num_vertices();
    if n > MAX_ENUMERATION_VERTICES {
        return Err(PauliError::TooLarge(n));
    }
    if error.num_qubits() != n {
        return Err(PauliError::LengthMismatch(error.num_qubits(), n));
    }
    let generators = (0..n).map(|v| stabilizer_generator(graph, v)).collect::<Result<Vec<_>, _>>()?;
    // Anticommutation with a product is the XOR of anticommutation with factors.
    let flips = generators.iter().map(|g| g.commutes(error).map(|c| !c)).collect::<Result<Vec<_>, _>>()?;
    let total = 1u64 << n;
    let detected =
        (0..total).filter(|mask| (0..n).filter(|&v| mask >> v & 1 == 1 && flips[v]).count() % 2 == 1).count() as u64;
    Ok(Ratio::new(detected, total))
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = match self.phase {
            0 => "+",
            1 => "+i",
            2 => "-",
            _ => "-i",
        };
        f.write_str(prefix)?;
        for q in 0..self.x.len() {
            write!(f, "{}", self.get(q).letter())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = PauliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || PauliError::Parse(s.to_string());
        let (mut phase, rest) = match s.as_bytes().first() {
            Some(b'+') => (0u8, &s[1..]),
            Some(b'-') => (2u8, &s[1..]),
            _ => (0u8, s),
        };
        let rest = match rest.strip_prefix('i') {
            Some(r) => {
                phase += 1;
                r
            }
            None => rest,
        };
        let paulis = rest
            .chars()
            .map(|c| match c {
                'I' => Ok(Pauli::I),
                'X' => Ok(Pauli::X),
                'Y' => Ok(Pauli::Y),
                'Z' => Ok(Pauli::Z),
                _ => Err(bad()),
            })
            .collect::<Result<Vec<_>, _>>()?;
        if paulis.is_empty() {
            return Err(bad());
        }
        PauliString::from_paulis(&paulis, phase)
    }
}

impl Serialize for PauliString {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PauliString {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
