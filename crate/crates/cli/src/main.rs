//! `clusterbench`: benchmark a simulated device, sweep grid sizes, and
//! re-score stored transcripts.
//!
//! Exit codes: 0 completed run (any verdict), 2 configuration error,
//! 3 I/O or input-data error, 4 the device violated the protocol.

mod config;

use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use clusterbench::bench::{run_mode, score, BenchMode, BenchmarkConfig, Certificate};
use clusterbench::characterize::{characterize_device, emit_map, CertificationMap, MapFormat, SweepMode};
use clusterbench::protocol::{read_transcripts, write_transcripts, DeviceFactory};
use clusterbench::Execution;
use log::{info, warn};
use serde::de::DeserializeOwned;
use thiserror::Error;

use config::RunConfig;

#[derive(Debug, Parser)]
#[command(name = "clusterbench", version, about = "Verification-derived benchmarking over 2D cluster states")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Overrides `bench.seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory; overrides `output.dir`.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one benchmark and write certificate.json plus transcript.jsonl.
    Bench {
        #[command(flatten)]
        common: Common,
        /// protocol1 | generic_cicc | optimized_cicc
        #[arg(long, value_parser = parse_enum::<BenchMode>)]
        mode: Option<BenchMode>,
        /// Summary printed to stdout: text | json
        #[arg(long, default_value = "text", value_parser = ["text", "json"])]
        format: String,
    },
    /// Sweep grid sizes and write certification maps.
    Characterize {
        #[command(flatten)]
        common: Common,
        /// protocol1 | optimized_cicc
        #[arg(long, value_parser = parse_enum::<SweepMode>)]
        mode: Option<SweepMode>,
        /// Comma-separated map formats: json, csv, svg
        #[arg(long, value_delimiter = ',', value_parser = parse_enum::<MapFormat>)]
        format: Vec<MapFormat>,
    },
    /// Re-score a stored transcript without re-running the simulation.
    Analyze {
        /// JSONL transcript written by `bench`.
        transcript: PathBuf,
        #[command(flatten)]
        common: Common,
        #[arg(long, value_parser = parse_enum::<BenchMode>)]
        mode: Option<BenchMode>,
        #[arg(long, default_value = "json", value_parser = ["text", "json"])]
        format: String,
    },
}

fn parse_enum<T: DeserializeOwned>(s: &str) -> Result<T, String> {
    serde_json::from_value(serde_json::Value::String(s.to_string())).map_err(|e| e.to_string())
}

#[derive(Debug, Error)]
enum CliError {
    #[error("configuration error: {0:#}")]
    Config(anyhow::Error),
    #[error("I/O error: {0:#}")]
    Io(anyhow::Error),
    #[error("protocol violation: {0}")]
    Violation(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Io(_) => 3,
            CliError::Violation(_) => 4,
        }
    }
}

fn config_err(e: impl Into<anyhow::Error>) -> CliError {
    CliError::Config(e.into())
}

fn io_err(e: impl Into<anyhow::Error>) -> CliError {
    CliError::Io(e.into())
}

fn load(common: &Common) -> Result<(RunConfig, PathBuf), CliError> {
    let (mut config, base) = RunConfig::load(&common.config).map_err(config_err)?;
    if let Some(seed) = common.seed {
        config.bench.seed = seed;
    }
    if let Some(out) = &common.out {
        config.output.dir = out.clone();
    }
    config.validate().map_err(config_err)?;
    Ok((config, base))
}

fn warn_on_omega(bench: &BenchmarkConfig) {
    if bench.omega_is_unsound() {
        warn!(
            "omega = {} is at least 1/4: an accepting Protocol 1 verdict carries no soundness guarantee",
            bench.omega
        );
    }
}

fn create_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display())).map_err(io_err)
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let write = || -> anyhow::Result<()> {
        let mut out = BufWriter::new(File::create(path)?);
        serde_json::to_writer_pretty(&mut out, value)?;
        out.write_all(b"\n")?;
        out.flush()?;
        Ok(())
    };
    write().with_context(|| format!("writing {}", path.display())).map_err(io_err)
}

fn summarize(cert: &Certificate, format: &str) -> String {
    if format == "json" {
        return serde_json::to_string_pretty(cert).expect("certificate serializes");
    }
    let r = &cert.result;
    let mut line = format!("{:?} on {}: {:?}", r.mode, cert.device, r.verdict);
    for (name, value) in [("z", r.z), ("z_t", r.z_t), ("z_fail", r.z_fail), ("gamma", r.gamma)] {
        if let Some(v) = value {
            line.push_str(&format!(" {name}={v}"));
        }
    }
    line.push_str(&format!(" activated={}/{}", r.activated_count, r.trap_rounds));
    if let Some(acc) = r.accepted_count {
        line.push_str(&format!(" accepted={acc}/{}", r.m));
    }
    if r.aborted_rounds > 0 {
        line.push_str(&format!(" aborted={}", r.aborted_rounds));
    }
    line
}

fn cmd_bench(common: Common, mode: Option<BenchMode>, format: &str) -> Result<(), CliError> {
    let (mut config, base) = load(&common)?;
    if let Some(mode) = mode {
        config.mode = mode;
    }
    if config.mode == BenchMode::Protocol1 {
        warn_on_omega(&config.bench);
    }
    let pattern = config.pattern(&base).map_err(config_err)?;
    info!("running {:?} with seed {}", config.mode, config.bench.seed);
    let run =
        run_mode(config.mode, &pattern, &config.bench, &config.device, Execution::Parallel).map_err(config_err)?;

    let dir = &config.output.dir;
    create_dir(dir)?;
    let cert = Certificate::new(config.device.label(), &pattern, &config.bench, run.result);
    write_json(&dir.join("certificate.json"), &cert)?;
    let transcript = dir.join("transcript.jsonl");
    File::create(&transcript)
        .and_then(|f| write_transcripts(BufWriter::new(f), &run.rounds))
        .with_context(|| format!("writing {}", transcript.display()))
        .map_err(io_err)?;
    println!("{}", summarize(&cert, format));

    match cert.result.aborted_rounds {
        0 => Ok(()),
        k => Err(CliError::Violation(format!("{k} rounds aborted; see {}", transcript.display()))),
    }
}

fn cmd_characterize(common: Common, mode: Option<SweepMode>, formats: Vec<MapFormat>) -> Result<(), CliError> {
    let (mut config, _) = load(&common)?;
    if let Some(mode) = mode {
        config.sweep.mode = mode;
    }
    if !formats.is_empty() {
        config.output.formats = formats;
    }
    if config.sweep.mode == SweepMode::Protocol1 {
        warn_on_omega(&config.bench);
    }
    let sweep = &config.sweep;
    let mut map: CertificationMap = characterize_device(
        &config.device,
        &sweep.widths,
        &sweep.depths,
        &config.bench,
        sweep.mode,
        sweep.max_qubits,
        Execution::Parallel,
    )
    .map_err(config_err)?;
    map.timestamp = sweep.timestamp.clone();

    let dir = &config.output.dir;
    create_dir(dir)?;
    for format in &config.output.formats {
        let path = dir.join(format!("map.{}", format.extension()));
        File::create(&path)
            .and_then(|f| emit_map(&map, *format, BufWriter::new(f)))
            .with_context(|| format!("writing {}", path.display()))
            .map_err(io_err)?;
    }
    for e in &map.entries {
        println!("{}x{} {}", e.width, e.depth, e.verdict.as_str());
    }
    Ok(())
}

fn cmd_analyze(transcript: PathBuf, common: Common, mode: Option<BenchMode>, format: &str) -> Result<(), CliError> {
    let (mut config, base) = load(&common)?;
    if let Some(mode) = mode {
        config.mode = mode;
    }
    let pattern = config.pattern(&base).map_err(config_err)?;
    let file = File::open(&transcript).with_context(|| format!("opening {}", transcript.display())).map_err(io_err)?;
    let rounds = read_transcripts(BufReader::new(file)).map_err(io_err)?;
    let result = score(config.mode, &config.bench, &rounds)
        .with_context(|| format!("re-scoring {}", transcript.display()))
        .map_err(io_err)?;
    let cert = Certificate::new(config.device.label(), &pattern, &config.bench, result);
    if common.out.is_some() {
        create_dir(&config.output.dir)?;
        write_json(&config.output.dir.join("certificate.json"), &cert)?;
    }
    println!("{}", summarize(&cert, format));
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Bench { common, mode, format } => cmd_bench(common, mode, &format),
        Command::Characterize { common, mode, format } => cmd_characterize(common, mode, format),
        Command::Analyze { transcript, common, mode, format } => cmd_analyze(transcript, common, mode, &format),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("clusterbench: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
