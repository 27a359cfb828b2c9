//! Run manifests and the file-producing entry points.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::ExperimentSpec;
use crate::engines::execute;
use crate::error::{CliError, CliResult};
use crate::parallel::Pool;
use crate::table::{Table, SCHEMA_VERSION};

pub const ENGINE_VERSION: &str = concat!("chargefcs ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputRecord {
    pub rows: usize,
    pub sha256: String,
}

/// Everything needed to reproduce a results file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub engine_version: String,
    pub schema_version: u32,
    pub seed: u64,
    /// Resolved spec (all defaults filled in).
    pub spec: serde_json::Value,
    /// Output file names relative to the manifest's directory.
    pub outputs: BTreeMap<String, OutputRecord>,
    pub threads: usize,
    pub wall_time_s: f64,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl Manifest {
    /// Sorted-key, pretty JSON.
    pub fn to_json(&self) -> CliResult<String> {
        // `Value` maps are ordered, so the round trip sorts every object.
        let v = serde_json::to_value(self)?;
        Ok(serde_json::to_string_pretty(&v)? + "\n")
    }

    pub fn write(&self, path: &Path) -> CliResult<()> {
        std::fs::write(path, self.to_json()?).map_err(|e| CliError::io(path, e))
    }

    pub fn read(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }
}

/// Files written by [`run_spec`].
#[derive(Debug, Clone)]
pub struct RunReport {
    pub csv_path: PathBuf,
    pub manifest_path: PathBuf,
    pub manifest: Manifest,
}

/// Manifest path belonging to a results CSV: `x.csv` gets `x.manifest.json`.
pub fn manifest_path_for(csv: &Path) -> PathBuf {
    csv.with_extension("manifest.json")
}

/// Resolves, runs and writes one spec. `spec_path` anchors relative outputs.
pub fn run_spec(spec: ExperimentSpec, spec_path: Option<&Path>, pool: &Pool) -> CliResult<RunReport> {
    let spec = spec.resolve()?;
    let csv_path = spec.output_path(spec_path);
    let start = Instant::now();
    let table = execute(&spec, pool)?;
    let bytes = table.write_csv(&csv_path)?;
    let name = csv_path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    let manifest = build_manifest(&spec, [(name, &table, bytes.as_slice())], pool, start)?;
    let manifest_path = manifest_path_for(&csv_path);
    manifest.write(&manifest_path)?;
    Ok(RunReport {
        csv_path,
        manifest_path,
        manifest,
    })
}

pub(crate) fn build_manifest<'a, S: Serialize>(
    spec: &S,
    outputs: impl IntoIterator<Item = (String, &'a Table, &'a [u8])>,
    pool: &Pool,
    start: Instant,
) -> CliResult<Manifest> {
    let spec = serde_json::to_value(spec)?;
    let seed = spec
        .pointer("/params/seed")
        .or_else(|| spec.get("seed"))
        .and_then(|s| s.as_u64())
        .unwrap_or(0);
    Ok(Manifest {
        engine_version: ENGINE_VERSION.into(),
        schema_version: SCHEMA_VERSION,
        seed,
        spec,
        outputs: outputs
            .into_iter()
            .map(|(name, table, bytes)| {
                (
                    name,
                    OutputRecord {
                        rows: table.rows.len(),
                        sha256: sha256_hex(bytes),
                    },
                )
            })
            .collect(),
        threads: pool.threads(),
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}
