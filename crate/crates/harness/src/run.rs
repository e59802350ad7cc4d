//! Running a configuration and writing its outputs and manifest.

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::error::{io, HarnessError, Result};
use crate::experiments::{execute, stream_layout, Outputs};
use crate::seed;

/// Record of a finished run, written next to the output as
/// `<out stem>.manifest.json`.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    /// Loadable with `--config` to repeat the run.
    pub config: serde_json::Value,
    /// Keys whose values came from defaults; the values are in `config`.
    pub defaulted: Vec<&'static str>,
    pub seed_derivation: SeedDerivation,
    pub outputs: Vec<PathBuf>,
    pub wall_time_seconds: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SeedDerivation {
    pub master: u64,
    pub scheme: &'static str,
    pub layout: String,
}

/// `out` with its extension replaced by `suffix`.
pub fn sibling(out: &Path, suffix: &str) -> PathBuf {
    out.with_extension(suffix)
}

/// Runs the experiment on a pool of `cfg.threads` workers and returns the
/// tables without touching the file system.
pub fn compute(cfg: &ExperimentConfig) -> Result<Outputs> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads.unwrap_or(0))
        .build()
        .map_err(|e| HarnessError::Config(format!("thread pool: {e}")))?;
    pool.install(|| execute(cfg))
}

fn write_table(path: &Path, t: &crate::output::Table) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(io(dir))?;
    }
    let f = File::create(path).map_err(io(path))?;
    t.write_to(BufWriter::new(f)).map_err(io(path))
}

/// Runs `cfg`, writes the CSV outputs and the manifest, prints the summary
/// line if there is one. Without an output path the main table goes to
/// standard output (except for `hypi dist`, whose summary line is the
/// output) and no manifest is written.
pub fn run(cfg: &ExperimentConfig) -> Result<RunManifest> {
    let start = Instant::now();
    let outputs = compute(cfg)?;
    let mut written = Vec::new();
    if let Some(line) = &outputs.summary {
        println!("{line}");
    }
    match &cfg.out {
        Some(out) => {
            write_table(out, &outputs.main)?;
            written.push(out.clone());
            for (suffix, t) in &outputs.extra {
                let path = sibling(out, suffix);
                write_table(&path, t)?;
                written.push(path);
            }
        }
        None => {
            if outputs.summary.is_none() {
                outputs
                    .main
                    .write_to(std::io::stdout().lock())
                    .map_err(io("<stdout>"))?;
            }
        }
    }
    let manifest = RunManifest {
        tool: "hypilab",
        version: env!("CARGO_PKG_VERSION"),
        config: cfg.to_json(),
        defaulted: cfg.defaulted.clone(),
        seed_derivation: SeedDerivation {
            master: cfg.seed,
            scheme: seed::DERIVATION,
            layout: stream_layout(cfg),
        },
        outputs: written,
        wall_time_seconds: start.elapsed().as_secs_f64(),
    };
    if let Some(out) = &cfg.out {
        let path = sibling(out, "manifest.json");
        let f = File::create(&path).map_err(io(&path))?;
        serde_json::to_writer_pretty(BufWriter::new(f), &manifest)
            .map_err(|e| HarnessError::Config(format!("manifest: {e}")))?;
    }
    Ok(manifest)
}
