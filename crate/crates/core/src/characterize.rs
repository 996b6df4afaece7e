//! Width/depth sweeps over 2D cluster states and the certification maps
//! they produce.

use std::fmt::Write as _;
use std::io::{self, Write};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bench::{run_optimized_cicc, run_protocol1, BenchError, BenchMode, BenchmarkConfig, Verdict};
use crate::exec::Execution;
use crate::graph::{fits_certified, fits_grid, standard_grid_flow, Graph, GridDims};
use crate::protocol::DeviceFactory;
use crate::rng::derive_seed;
use crate::statevector::MAX_QUBITS;

/// Benchmark applied to each grid of a sweep.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepMode {
    #[default]
    Protocol1,
    OptimizedCicc,
}

impl From<SweepMode> for BenchMode {
    fn from(mode: SweepMode) -> Self {
        match mode {
            SweepMode::Protocol1 => BenchMode::Protocol1,
            SweepMode::OptimizedCicc => BenchMode::OptimizedCicc,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntryStatus {
    Accept,
    Reject,
    /// Not run: the grid exceeds the qubit limit.
    Skipped,
}

impl From<Verdict> for EntryStatus {
    fn from(v: Verdict) -> Self {
        match v {
            Verdict::Accept => EntryStatus::Accept,
            Verdict::Reject => EntryStatus::Reject,
        }
    }
}

impl EntryStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            EntryStatus::Accept => "accept",
            EntryStatus::Reject => "reject",
            EntryStatus::Skipped => "skipped",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MapEntry {
    pub width: usize,
    pub depth: usize,
    pub verdict: EntryStatus,
    pub z: Option<f64>,
    pub z_t: Option<f64>,
    pub z_fail: Option<f64>,
    pub gamma: Option<f64>,
    pub activated: Option<u64>,
    pub config_hash: String,
    pub seed: u64,
}

impl MapEntry {
    pub fn dims(&self) -> GridDims {
        GridDims::new(self.width, self.depth)
    }

    pub fn is_certified(&self) -> bool {
        self.verdict == EntryStatus::Accept
    }

    #[cfg(test)]
    pub(crate) fn for_test(dims: GridDims, accept: bool) -> Self {
        MapEntry {
            width: dims.width,
            depth: dims.depth,
            verdict: if accept { EntryStatus::Accept } else { EntryStatus::Reject },
            z: None,
            z_t: None,
            z_fail: Some(if accept { 0.0 } else { 1.0 }),
            gamma: None,
            activated: None,
            config_hash: String::new(),
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificationMap {
    pub device: String,
    /// Caller-supplied; never read from the clock so output stays
    /// reproducible.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<String>,
    pub mode: SweepMode,
    pub entries: Vec<MapEntry>,
}

impl CertificationMap {
    pub fn from_entries(device: impl Into<String>, entries: Vec<MapEntry>) -> Self {
        CertificationMap { device: device.into(), timestamp: None, mode: SweepMode::Protocol1, entries }
    }

    pub fn certified_dims(&self) -> impl Iterator<Item = GridDims> + '_ {
        self.entries.iter().filter(|e| e.is_certified()).map(MapEntry::dims)
    }

    pub fn entry(&self, dims: GridDims) -> Option<&MapEntry> {
        self.entries.iter().find(|e| e.dims() == dims)
    }
}

/// Hex SHA-256 of the canonical JSON form of `config`.
pub fn config_hash(config: &BenchmarkConfig) -> String {
    let json = serde_json::to_vec(config).expect("config serializes");
    hex::encode(Sha256::digest(&json))
}

/// Benchmarks every `(width, depth)` pair in row-major order. Each entry
/// runs on its own seed derived from the config seed and its dimensions;
/// grids over `max_qubits` are recorded as skipped.
pub fn characterize_device<F: DeviceFactory>(
    factory: &F,
    widths: &[usize],
    depths: &[usize],
    config: &BenchmarkConfig,
    mode: SweepMode,
    max_qubits: usize,
    exec: Execution,
) -> Result<CertificationMap, BenchError> {
    config.validate()?;
    let hash = config_hash(config);
    let grids: Vec<GridDims> = widths.iter().flat_map(|&w| depths.iter().map(move |&d| GridDims::new(w, d))).collect();
    if grids.iter().any(|g| g.qubits() == 0) {
        return Err(BenchError::Config("grid dimensions must be positive".into()));
    }
    let limit = max_qubits.min(MAX_QUBITS);
    let entries = exec
        .map(grids.len() as u64, |i| {
            let dims = grids[i as usize];
            let seed = derive_seed(config.seed, &[dims.width as u64, dims.depth as u64]);
            let mut entry = MapEntry {
                width: dims.width,
                depth: dims.depth,
                verdict: EntryStatus::Skipped,
                z: None,
                z_t: None,
                z_fail: None,
                gamma: None,
                activated: None,
                config_hash: hash.clone(),
                seed,
            };
            if dims.qubits() > limit {
                return Ok(entry);
            }
            let graph = Graph::grid(dims.width, dims.depth).expect("positive dims");
            let flow = standard_grid_flow(&graph).expect("grid has a flow");
            let cfg = BenchmarkConfig { seed, ..config.clone() };
            let run = match mode {
                SweepMode::Protocol1 => run_protocol1(&graph, &flow, &cfg, factory, exec)?,
                SweepMode::OptimizedCicc => run_optimized_cicc(&graph, &flow, &cfg, factory, exec)?,
            };
            let r = run.result;
            entry.verdict = r.verdict.into();
            entry.z = r.z;
            entry.z_t = r.z_t;
            entry.z_fail = r.z_fail;
            entry.gamma = r.gamma;
            entry.activated = Some(r.activated_count);
            Ok(entry)
        })
        .into_iter()
        .collect::<Result<Vec<_>, BenchError>>()?;
    Ok(CertificationMap { device: factory.label(), timestamp: None, mode, entries })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternQuery {
    pub certified: bool,
    pub fitting: Vec<GridDims>,
    pub largest_certified: Option<GridDims>,
}

/// Whether a `dims` pattern runs on some certified grid, which certified
/// grids contain it, and the largest certified grid overall.
pub fn query_pattern(map: &CertificationMap, dims: GridDims, allow_transpose: bool) -> PatternQuery {
    let fitting: Vec<GridDims> = map.certified_dims().filter(|&cert| fits_grid(dims, cert, allow_transpose)).collect();
    let largest_certified = map.certified_dims().max_by_key(|d| (d.qubits(), d.width, d.depth));
    PatternQuery { certified: fits_certified(dims, map, allow_transpose), fitting, largest_certified }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapFormat {
    Json,
    Csv,
    Svg,
}

impl MapFormat {
    pub fn extension(self) -> &'static str {
        match self {
            MapFormat::Json => "json",
            MapFormat::Csv => "csv",
            MapFormat::Svg => "svg",
        }
    }
}

pub fn emit_map<W: Write>(map: &CertificationMap, format: MapFormat, mut out: W) -> io::Result<()> {
    match format {
        MapFormat::Json => {
            serde_json::to_writer_pretty(&mut out, map)?;
            out.write_all(b"\n")?;
        }
        MapFormat::Csv => write_csv(map, &mut out)?,
        MapFormat::Svg => out.write_all(render_svg(map).as_bytes())?,
    }
    out.flush()
}

fn cell(value: Option<f64>) -> String {
    value.map(|v| v.to_string()).unwrap_or_default()
}

fn write_csv<W: Write>(map: &CertificationMap, out: W) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["width", "depth", "z", "z_t", "gamma", "verdict"])?;
    for e in &map.entries {
        w.write_record([
            e.width.to_string(),
            e.depth.to_string(),
            cell(e.z),
            cell(e.z_t),
            cell(e.gamma),
            e.verdict.as_str().to_string(),
        ])?;
    }
    w.flush()
}

const CELL: usize = 48;
const MARGIN: usize = 40;

/// Heatmap with depth along x and width along y; rejected and skipped
/// cells are red and grey, accepted cells are green shaded by `z` when
/// available.
pub fn render_svg(map: &CertificationMap) -> String {
    let max_w = map.entries.iter().map(|e| e.width).max().unwrap_or(0);
    let max_d = map.entries.iter().map(|e| e.depth).max().unwrap_or(0);
    let (w_px, h_px) = (MARGIN + CELL * max_d + 8, MARGIN + CELL * max_w + 8);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w_px}" height="{h_px}" viewBox="0 0 {w_px} {h_px}" font-family="monospace" font-size="11">"#
    );
    let _ = writeln!(s, "<title>{}</title>", escape(&map.device));
    for d in 1..=max_d {
        let x = MARGIN + CELL * (d - 1) + CELL / 2;
        let _ = writeln!(s, r#"<text x="{x}" y="{}" text-anchor="middle">d={d}</text>"#, MARGIN - 8);
    }
    for w in 1..=max_w {
        let y = MARGIN + CELL * (w - 1) + CELL / 2 + 4;
        let _ = writeln!(s, r#"<text x="{}" y="{y}" text-anchor="end">w={w}</text>"#, MARGIN - 4);
    }
    for e in &map.entries {
        let (x, y) = (MARGIN + CELL * (e.depth - 1), MARGIN + CELL * (e.width - 1));
        let (fill, label) = match e.verdict {
            EntryStatus::Accept => {
                let shade = e.z.map(|z| (200.0 - 120.0 * z.clamp(0.0, 1.0)).round() as u8).unwrap_or(125);
                (
                    format!("rgb(46,{},60)", shade.max(80)),
                    e.z.or(e.z_fail).map(|v| format!("{v:.2}")).unwrap_or_default(),
                )
            }
            EntryStatus::Reject => {
                ("rgb(198,40,40)".to_string(), e.z.or(e.z_fail).map(|v| format!("{v:.2}")).unwrap_or_default())
            }
            EntryStatus::Skipped => ("rgb(158,158,158)".to_string(), "skip".to_string()),
        };
        let _ = writeln!(
            s,
            r#"<rect x="{x}" y="{y}" width="{CELL}" height="{CELL}" fill="{fill}" stroke="white"><title>{}x{} {}</title></rect>"#,
            e.width,
            e.depth,
            e.verdict.as_str()
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="middle" fill="white">{label}</text>"#,
            x + CELL / 2,
            y + CELL / 2 + 4
        );
    }
    s.push_str("</svg>\n");
    s
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
