//! Graphs, flows and measurement patterns.
//!
//! Vertices are `0..n`. Grid graphs number vertices row-major:
//! vertex `r * depth + c` sits in row `r`, column `c`. The first column is
//! the input set and the last column the output set.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::angle::Angle;
use crate::characterize::CertificationMap;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("grid dimensions must be at least 1x1, got {0}x{1}")]
    ZeroDimension(usize, usize),
    #[error("graph needs at least one vertex")]
    Empty,
    #[error("self-loop on vertex {0}")]
    SelfLoop(usize),
    #[error("vertex {vertex} outside graph of {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(usize, usize),
    #[error("graph was not produced by a grid constructor")]
    NotGrid,
    #[error("invalid flow: {0}")]
    InvalidFlow(String),
    #[error("pattern has {got} angles for {expected} vertices")]
    AngleCount { expected: usize, got: usize },
    #[error("fixture parse error on line {line}: {message}")]
    Fixture { line: usize, message: String },
}

/// Width (rows) and depth (columns) of a 2D cluster.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GridDims {
    pub width: usize,
    pub depth: usize,
}

impl GridDims {
    pub const fn new(width: usize, depth: usize) -> Self {
        GridDims { width, depth }
    }

    pub fn qubits(self) -> usize {
        self.width * self.depth
    }

    pub fn transposed(self) -> Self {
        GridDims { width: self.depth, depth: self.width }
    }

    /// Axis-aligned containment of `self` inside `outer`.
    pub fn fits_in(self, outer: GridDims) -> bool {
        self.width <= outer.width && self.depth <= outer.depth
    }
}

impl fmt::Display for GridDims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.width, self.depth)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GraphSpec", into = "GraphSpec")]
pub struct Graph {
    adjacency: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
    inputs: Vec<usize>,
    outputs: Vec<usize>,
    grid: Option<GridDims>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphSpec {
    n_vertices: usize,
    edges: Vec<(usize, usize)>,
    inputs: Vec<usize>,
    outputs: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    grid: Option<GridDims>,
}

impl TryFrom<GraphSpec> for Graph {
    type Error = GraphError;
    fn try_from(spec: GraphSpec) -> Result<Self, GraphError> {
        let mut g = Graph::new(spec.n_vertices, &spec.edges, &spec.inputs, &spec.outputs)?;
        if let Some(dims) = spec.grid {
            g.grid = Some(dims);
            if Graph::grid(dims.width, dims.depth)? != g {
                return Err(GraphError::NotGrid);
            }
        }
        Ok(g)
    }
}

impl From<Graph> for GraphSpec {
    fn from(g: Graph) -> Self {
        GraphSpec { n_vertices: g.num_vertices(), edges: g.edges, inputs: g.inputs, outputs: g.outputs, grid: g.grid }
    }
}

impl Graph {
    pub fn new(n: usize, edges: &[(usize, usize)], inputs: &[usize], outputs: &[usize]) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::Empty);
        }
        let check = |v: usize| {
            if v >= n {
                Err(GraphError::VertexOutOfRange { vertex: v, n })
            } else {
                Ok(())
            }
        };
        let mut adjacency = vec![Vec::new(); n];
        let mut seen = BTreeSet::new();
        for &(a, b) in edges {
            check(a)?;
            check(b)?;
            if a == b {
                return Err(GraphError::SelfLoop(a));
            }
            let key = (a.min(b), a.max(b));
            if !seen.insert(key) {
                return Err(GraphError::DuplicateEdge(key.0, key.1));
            }
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        for adj in &mut adjacency {
            adj.sort_unstable();
        }
        for &v in inputs.iter().chain(outputs) {
            check(v)?;
        }
        let dedup = |vs: &[usize]| vs.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
        Ok(Graph {
            adjacency,
            edges: seen.into_iter().collect(),
            inputs: dedup(inputs),
            outputs: dedup(outputs),
            grid: None,
        })
    }

    fn with_grid(mut self, dims: GridDims) -> Self {
        self.grid = Some(dims);
        self
    }

    /// `width × depth` cluster with nearest-neighbour edges.
    pub fn grid(width: usize, depth: usize) -> Result<Self, GraphError> {
        if width == 0 || depth == 0 {
            return Err(GraphError::ZeroDimension(width, depth));
        }
        let id = |r: usize, c: usize| r * depth + c;
        let mut edges = Vec::with_capacity(width * (depth - 1) + (width - 1) * depth);
        for r in 0..width {
            for c in 0..depth {
                if c + 1 < depth {
                    edges.push((id(r, c), id(r, c + 1)));
                }
                if r + 1 < width {
                    edges.push((id(r, c), id(r + 1, c)));
                }
            }
        }
        let inputs: Vec<_> = (0..width).map(|r| id(r, 0)).collect();
        let outputs: Vec<_> = (0..width).map(|r| id(r, depth - 1)).collect();
        Ok(Graph::new(width * depth, &edges, &inputs, &outputs)?.with_grid(GridDims::new(width, depth)))
    }

    pub fn num_vertices(&self) -> usize {
        self.adjacency.len()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn inputs(&self) -> &[usize] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[usize] {
        &self.outputs
    }

    pub fn is_output(&self, v: usize) -> bool {
        self.outputs.binary_search(&v).is_ok()
    }

    pub fn is_input(&self, v: usize) -> bool {
        self.inputs.binary_search(&v).is_ok()
    }

    pub fn grid_dims(&self) -> Option<GridDims> {
        self.grid
    }

    pub fn are_adjacent(&self, a: usize, b: usize) -> bool {
        self.adjacency[a].binary_search(&b).is_ok()
    }

    fn canonical_bytes(&self, out: &mut Vec<u8>) {
        out.extend((self.num_vertices() as u64).to_le_bytes());
        for &(a, b) in &self.edges {
            out.extend((a as u32).to_le_bytes());
            out.extend((b as u32).to_le_bytes());
        }
        out.push(0xff);
        for &v in self.inputs.iter().chain([usize::MAX].iter()).chain(&self.outputs) {
            out.extend((v as u64).to_le_bytes());
        }
    }
}

/// A flow: successor map plus a compatible total measurement order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Flow {
    successor: Vec<Option<usize>>,
    order: Vec<usize>,
    #[serde(skip)]
    position: Vec<usize>,
}

impl Flow {
    /// Validates the flow conditions against `graph`:
    /// `f(i) ∈ N(i)`, `f` injective from non-outputs into non-inputs, and
    /// `order` places `i` before `f(i)` and before every other neighbour of `f(i)`.
    pub fn new(graph: &Graph, successor: Vec<Option<usize>>, order: Vec<usize>) -> Result<Self, GraphError> {
        let n = graph.num_vertices();
        let bad = |m: String| Err(GraphError::InvalidFlow(m));
        if successor.len() != n || order.len() != n {
            return bad(format!("expected {n} entries"));
        }
        let mut position = vec![usize::MAX; n];
        for (pos, &v) in order.iter().enumerate() {
            if v >= n || position[v] != usize::MAX {
                return bad(format!("order is not a permutation (vertex {v})"));
            }
            position[v] = pos;
        }
        let mut hit = vec![false; n];
        for (i, f) in successor.iter().enumerate() {
            match *f {
                None if !graph.is_output(i) => return bad(format!("non-output vertex {i} has no successor")),
                None => {}
                Some(_) if graph.is_output(i) => return bad(format!("output vertex {i} has a successor")),
                Some(j) => {
                    if j >= n || !graph.are_adjacent(i, j) {
                        return bad(format!("f({i})={j} is not a neighbour"));
                    }
                    if graph.is_input(j) {
                        return bad(format!("f({i})={j} is an input"));
                    }
                    if std::mem::replace(&mut hit[j], true) {
                        return bad(format!("f is not injective at {j}"));
                    }
                    if position[i] > position[j] {
                        return bad(format!("{i} must precede f({i})={j}"));
                    }
                    for &k in graph.neighbors(j) {
                        if k != i && position[i] > position[k] {
                            return bad(format!("{i} must precede {k} in N(f({i}))"));
                        }
                    }
                }
            }
        }
        Ok(Flow { successor, order, position })
    }

    pub fn successor(&self, v: usize) -> Option<usize> {
        self.successor[v]
    }

    /// Measurement order.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn position(&self, v: usize) -> usize {
        self.position[v]
    }

    /// Layer index: 0 for vertices outside the image of `f`, else one more
    /// than the layer of the predecessor.
    pub fn layers(&self) -> Vec<usize> {
        let n = self.successor.len();
        let mut layer = vec![0; n];
        for &v in &self.order {
            if let Some(j) = self.successor[v] {
                layer[j] = layer[v] + 1;
            }
        }
        layer
    }

    fn canonical_bytes(&self, out: &mut Vec<u8>) {
        for s in &self.successor {
            out.extend((s.map_or(u64::MAX, |j| j as u64)).to_le_bytes());
        }
        for &v in &self.order {
            out.extend((v as u64).to_le_bytes());
        }
    }
}

/// `f(r, c) = (r, c + 1)` with column-major measurement order.
pub fn standard_grid_flow(graph: &Graph) -> Result<Flow, GraphError> {
    let dims = graph.grid_dims().ok_or(GraphError::NotGrid)?;
    let (w, d) = (dims.width, dims.depth);
    let successor = (0..w * d).map(|v| if v % d + 1 < d { Some(v + 1) } else { None }).collect();
    let order = (0..d).flat_map(|c| (0..w).map(move |r| r * d + c)).collect();
    Flow::new(graph, successor, order)
}

/// Hash identifying a (graph, flow) resource on the wire.
pub fn resource_hash(graph: &Graph, flow: &Flow) -> u64 {
    let mut bytes = Vec::new();
    graph.canonical_bytes(&mut bytes);
    flow.canonical_bytes(&mut bytes);
    let digest = Sha256::digest(&bytes);
    u64::from_le_bytes(digest[..8].try_into().expect("digest is 32 bytes"))
}

/// Vertices whose outcomes feed the X- and Z-corrections of each vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorrectionSets {
    pub x: Vec<Vec<usize>>,
    pub z: Vec<Vec<usize>>,
}

/// `S_X(i) = f⁻¹(i)`, `S_Z(i) = { j ≠ i : i ∈ N(f(j)) }`.
pub fn correction_sets(graph: &Graph, flow: &Flow) -> CorrectionSets {
    let n = graph.num_vertices();
    let mut x = vec![Vec::new(); n];
    let mut z = vec![Vec::new(); n];
    for j in 0..n {
        if let Some(fj) = flow.successor(j) {
            x[fj].push(j);
            for &i in graph.neighbors(fj) {
                if i != j {
                    z[i].push(j);
                }
            }
        }
    }
    for set in x.iter_mut().chain(z.iter_mut()) {
        set.sort_unstable();
    }
    CorrectionSets { x, z }
}

/// Classical-input/classical-output pattern in the X-Y plane.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MeasurementPattern {
    graph: Graph,
    flow: Flow,
    angles: Vec<Angle>,
    corrections: CorrectionSets,
}

impl MeasurementPattern {
    pub fn new(graph: Graph, flow: Flow, angles: Vec<Angle>) -> Result<Self, GraphError> {
        if angles.len() != graph.num_vertices() {
            return Err(GraphError::AngleCount { expected: graph.num_vertices(), got: angles.len() });
        }
        // Re-validate: the flow may have been built against another graph.
        let flow = Flow::new(&graph, flow.successor, flow.order)?;
        let corrections = correction_sets(&graph, &flow);
        Ok(MeasurementPattern { graph, flow, angles, corrections })
    }

    /// Pattern on a `width × depth` cluster with the standard grid flow.
    pub fn on_grid(dims: GridDims, angles: Vec<Angle>) -> Result<Self, GraphError> {
        let graph = Graph::grid(dims.width, dims.depth)?;
        let flow = standard_grid_flow(&graph)?;
        Self::new(graph, flow, angles)
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn flow(&self) -> &Flow {
        &self.flow
    }

    pub fn angles(&self) -> &[Angle] {
        &self.angles
    }

    pub fn angle(&self, v: usize) -> Angle {
        self.angles[v]
    }

    pub fn corrections(&self) -> &CorrectionSets {
        &self.corrections
    }

    /// Structured-text fixture: vertex count, edges, io sets, flow pairs,
    /// order and angle indices, one keyword per line.
    pub fn to_fixture(&self) -> String {
        let join = |it: &mut dyn Iterator<Item = String>| it.collect::<Vec<_>>().join(" ");
        let g = &self.graph;
        let mut out = String::new();
        out.push_str(&format!("vertices {}\n", g.num_vertices()));
        out.push_str(&format!("edges {}\n", join(&mut g.edges.iter().map(|(a, b)| format!("{a}-{b}")))));
        out.push_str(&format!("inputs {}\n", join(&mut g.inputs.iter().map(|v| v.to_string()))));
        out.push_str(&format!("outputs {}\n", join(&mut g.outputs.iter().map(|v| v.to_string()))));
        out.push_str(&format!(
            "flow {}\n",
            join(&mut (0..g.num_vertices()).filter_map(|i| self.flow.successor(i).map(|j| format!("{i}>{j}"))))
        ));
        out.push_str(&format!("order {}\n", join(&mut self.flow.order.iter().map(|v| v.to_string()))));
        out.push_str(&format!("angles {}\n", join(&mut self.angles.iter().map(|a| a.index().to_string()))));
        out
    }

    pub fn from_fixture(text: &str) -> Result<Self, GraphError> {
        let mut n = None;
        let (mut edges, mut inputs, mut outputs, mut pairs, mut order, mut angles) =
            (Vec::new(), Vec::new(), Vec::new(), Vec::new(), Vec::new(), Vec::new());
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let err = |message: String| GraphError::Fixture { line, message };
            let raw = raw.trim();
            if raw.is_empty() || raw.starts_with('#') {
                continue;
            }
            let mut parts = raw.split_whitespace();
            let key = parts.next().unwrap_or_default();
            let num = |s: &str| s.parse::<usize>().map_err(|e| err(format!("{s:?}: {e}")));
            let pair = |s: &str, sep: char| -> Result<(usize, usize), GraphError> {
                let (a, b) = s.split_once(sep).ok_or_else(|| err(format!("expected a{sep}b, got {s:?}")))?;
                Ok((num(a)?, num(b)?))
            };
            match key {
                "vertices" => n = Some(num(parts.next().ok_or_else(|| err("missing count".into()))?)?),
                "edges" => edges = parts.map(|s| pair(s, '-')).collect::<Result<_, _>>()?,
                "inputs" => inputs = parts.map(num).collect::<Result<_, _>>()?,
                "outputs" => outputs = parts.map(num).collect::<Result<_, _>>()?,
                "flow" => pairs = parts.map(|s| pair(s, '>')).collect::<Result<_, _>>()?,
                "order" => order = parts.map(num).collect::<Result<_, _>>()?,
                "angles" => {
                    angles = parts
                        .map(|s| {
                            s.parse::<u8>()
                                .ok()
                                .and_then(|i| Angle::try_from(i).ok())
                                .ok_or_else(|| err(format!("bad angle index {s:?}")))
                        })
                        .collect::<Result<_, _>>()?
                }
                other => return Err(err(format!("unknown keyword {other:?}"))),
            }
        }
        let n = n.ok_or(GraphError::Fixture { line: 0, message: "missing vertices line".into() })?;
        let graph = Graph::new(n, &edges, &inputs, &outputs)?;
        let mut successor = vec![None; n];
        for (i, j) in pairs {
            if i >= n {
                return Err(GraphError::VertexOutOfRange { vertex: i, n });
            }
            successor[i] = Some(j);
        }
        let flow = Flow::new(&graph, successor, order)?;
        Self::new(graph, flow, angles)
    }
}

/// True iff `dims` is an axis-aligned sub-grid of `cert` (or its transpose
/// is, when `allow_transpose`).
pub fn fits_grid(dims: GridDims, cert: GridDims, allow_transpose: bool) -> bool {
    dims.fits_in(cert) || (allow_transpose && dims.transposed().fits_in(cert))
}

/// True iff some certified entry of `map` admits `dims` under [`fits_grid`].
pub fn fits_certified(dims: GridDims, map: &CertificationMap, allow_transpose: bool) -> bool {
    map.certified_dims().any(|cert| fits_grid(dims, cert, allow_transpose))
}
