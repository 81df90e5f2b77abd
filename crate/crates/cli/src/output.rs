//! Output directory bookkeeping and the run manifest.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::error::CliError;

pub const MANIFEST: &str = "manifest.txt";
/// Wall time lives outside the manifest so manifests stay reproducible.
pub const TIMING: &str = "timing.txt";

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Files written by one run, in write order.
#[derive(Debug)]
pub struct Outputs {
    pub dir: PathBuf,
    pub written: Vec<(String, String, usize)>,
}

impl Outputs {
    pub fn new(dir: &Path) -> Self {
        Self { dir: dir.to_path_buf(), written: Vec::new() }
    }

    pub fn write(&mut self, name: &str, bytes: impl AsRef<[u8]>) -> Result<(), CliError> {
        let bytes = bytes.as_ref();
        std::fs::create_dir_all(&self.dir).map_err(|e| CliError::io(&self.dir, e))?;
        let path = self.dir.join(name);
        std::fs::write(&path, bytes).map_err(|e| CliError::io(&path, e))?;
        self.written.push((name.to_string(), sha256_hex(bytes), bytes.len()));
        Ok(())
    }
}

/// Inputs of a run as recorded in the manifest.
#[derive(Debug, Clone, Default)]
pub struct RunInputs {
    pub command: String,
    pub scenario_name: Option<String>,
    pub scenario_sha256: Option<String>,
    pub extra_inputs: Vec<(String, String)>,
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
    pub inverse_crime_ok: bool,
}

pub fn manifest_text(inputs: &RunInputs, outputs: &Outputs, status: i32, message: &str) -> String {
    let mut m = String::from("# ultraslow run manifest\n");
    let _ = writeln!(m, "tool=ultraslow-cli {}", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(m, "core=ultraslow-core {}", ultraslow_core::VERSION);
    let _ = writeln!(m, "command={}", inputs.command);
    if let Some(name) = &inputs.scenario_name {
        let _ = writeln!(m, "scenario={name}");
    }
    if let Some(h) = &inputs.scenario_sha256 {
        let _ = writeln!(m, "scenario_sha256={h}");
    }
    for (name, h) in &inputs.extra_inputs {
        let _ = writeln!(m, "input={name} sha256={h}");
    }
    let _ = writeln!(m, "seed={}", inputs.seed.map_or("none".into(), |s| s.to_string()));
    let _ = writeln!(m, "jobs={}", inputs.jobs.map_or("default".into(), |j| j.to_string()));
    let _ = writeln!(m, "inverse_crime_ok={}", inputs.inverse_crime_ok);
    let _ = writeln!(m, "exit_status={status}");
    let _ = writeln!(m, "message={}", message.replace('\n', " "));
    for (name, hash, len) in &outputs.written {
        let _ = writeln!(m, "output={name} bytes={len} sha256={hash}");
    }
    m
}
