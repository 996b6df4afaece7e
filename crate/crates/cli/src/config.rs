//! TOML run configuration.

use std::path::{Path, PathBuf};

use clusterbench::bench::{BenchMode, BenchmarkConfig};
use clusterbench::characterize::{MapFormat, SweepMode};
use clusterbench::protocol::DeviceSpec;
use clusterbench::{Angle, GridDims, MeasurementPattern, MAX_QUBITS};
use serde::Deserialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: toml::de::Error },
    #[error("{0}")]
    Invalid(String),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub mode: BenchMode,
    #[serde(default)]
    pub bench: BenchmarkConfig,
    #[serde(default = "DeviceSpec::noiseless")]
    pub device: DeviceSpec,
    #[serde(default)]
    pub pattern: PatternConfig,
    #[serde(default)]
    pub sweep: SweepConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

/// A grid pattern (angle indices in units of π/4, row-major) or a fixture
/// file relative to the config file.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PatternConfig {
    pub width: Option<usize>,
    pub depth: Option<usize>,
    #[serde(default)]
    pub angles: Vec<u8>,
    pub fixture: Option<PathBuf>,
}

impl Default for PatternConfig {
    fn default() -> Self {
        PatternConfig { width: Some(2), depth: Some(3), angles: Vec::new(), fixture: None }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub widths: Vec<usize>,
    pub depths: Vec<usize>,
    pub max_qubits: usize,
    pub mode: SweepMode,
    pub timestamp: Option<String>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            widths: vec![1, 2, 3],
            depths: vec![1, 2, 3, 4],
            max_qubits: MAX_QUBITS,
            mode: SweepMode::Protocol1,
            timestamp: None,
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
    pub formats: Vec<MapFormat>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { dir: PathBuf::from("out"), formats: vec![MapFormat::Json, MapFormat::Csv, MapFormat::Svg] }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<(Self, PathBuf), ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read { path: path.into(), source })?;
        let config: RunConfig =
            toml::from_str(&text).map_err(|source| ConfigError::Parse { path: path.into(), source })?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok((config, base))
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.bench.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        self.device.validate().map_err(ConfigError::Invalid)?;
        if self.sweep.widths.contains(&0) || self.sweep.depths.contains(&0) {
            return Err(ConfigError::Invalid("sweep dimensions must be positive".into()));
        }
        Ok(())
    }

    pub fn pattern(&self, base: &Path) -> Result<MeasurementPattern, ConfigError> {
        let p = &self.pattern;
        let invalid = |e: &dyn std::fmt::Display| ConfigError::Invalid(format!("pattern: {e}"));
        match (p.fixture.as_ref(), p.width, p.depth) {
            (Some(fixture), None, None) if p.angles.is_empty() => {
                let path = base.join(fixture);
                let text = std::fs::read_to_string(&path).map_err(|source| ConfigError::Read { path, source })?;
                MeasurementPattern::from_fixture(&text).map_err(|e| invalid(&e))
            }
            (None, Some(width), Some(depth)) => {
                let dims = GridDims::new(width, depth);
                if dims.qubits() == 0 || dims.qubits() > MAX_QUBITS {
                    return Err(ConfigError::Invalid(format!("pattern grid {dims} outside 1..={MAX_QUBITS} qubits")));
                }
                let angles = if p.angles.is_empty() { vec![0; dims.qubits()] } else { p.angles.clone() };
                let angles = angles
                    .into_iter()
                    .map(|a| {
                        Angle::try_from(a)
                            .map_err(|_| ConfigError::Invalid(format!("pattern: angle index {a} outside 0..8")))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                MeasurementPattern::on_grid(dims, angles).map_err(|e| invalid(&e))
            }
            _ => Err(ConfigError::Invalid(
                "pattern needs either width and depth (plus optional angles) or a fixture".into(),
            )),
        }
    }
}
