//! Run manifests: every output directory gets a manifest pairing the
//! outputs with the exact configuration, seeds, and input digests that
//! produced them, so any run can be reproduced byte-for-byte.

use std::fs::File;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::time::Instant;

use sha2::{Digest, Sha256};

#[derive(serde::Serialize)]
pub struct RunManifest {
    pub tool_version: &'static str,
    pub subcommand: String,
    pub config: serde_json::Value,
    pub seed: u64,
    pub jobs: Option<usize>,
    pub input_digests: Vec<(String, String)>,
    pub output_digests: Vec<(String, String)>,
    pub wall_clock_secs: f64,
}

pub fn sha256_file(path: &Path) -> std::io::Result<String> {
    let mut file = File::open(path)?;
    let mut hasher = Sha256::new();
    let mut buf = [0u8; 65536];
    loop {
        let n = file.read(&mut buf)?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    Ok(hasher
        .finalize()
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect())
}

fn digests(paths: &[PathBuf]) -> std::io::Result<Vec<(String, String)>> {
    paths
        .iter()
        .map(|p| Ok((p.display().to_string(), sha256_file(p)?)))
        .collect()
}

/// Writes `<out>/manifest.json` describing a completed run.
#[allow(clippy::too_many_arguments)]
pub fn write_manifest(
    out_dir: &Path,
    subcommand: &str,
    config: serde_json::Value,
    seed: u64,
    jobs: Option<usize>,
    inputs: &[PathBuf],
    outputs: &[PathBuf],
    started: Instant,
) -> dprp::Result<PathBuf> {
    let manifest = RunManifest {
        tool_version: env!("CARGO_PKG_VERSION"),
        subcommand: subcommand.to_string(),
        config,
        seed,
        jobs,
        input_digests: digests(inputs)?,
        output_digests: digests(outputs)?,
        wall_clock_secs: started.elapsed().as_secs_f64(),
    };
    let path = out_dir.join("manifest.json");
    std::fs::write(&path, serde_json::to_string_pretty(&manifest).unwrap())?;
    Ok(path)
}
