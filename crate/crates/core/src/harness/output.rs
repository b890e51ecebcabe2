//! Files written by the experiments. Every file is written to a temporary
//! name in the target directory and renamed into place.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::monitors::{self, DiagnosticsRow};
use crate::spatial::{Field, Lattice};
use crate::{Error, Result};

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let name = path
        .file_name()
        .ok_or_else(|| Error::Config(format!("not a file path: {}", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp", name.to_string_lossy()));
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

pub fn write_diagnostics(path: &Path, rows: &[DiagnosticsRow]) -> Result<()> {
    let mut buf = Vec::new();
    monitors::write_csv(&mut buf, rows)?;
    write_atomic(path, &buf)
}

/// Sidecar metadata of a field snapshot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotMeta {
    pub dim: usize,
    #[serde(rename = "M")]
    pub m: usize,
    #[serde(rename = "L")]
    pub length: f64,
    pub t: f64,
    pub step: usize,
}

/// Writes `phi_<step>.raw` (little-endian f64, row-major) and its `.json`
/// sidecar; returns the path of the raw file.
pub fn write_snapshot(dir: &Path, step: usize, t: f64, field: &Field) -> Result<PathBuf> {
    let lat = field.lattice();
    let raw = dir.join(format!("phi_{step}.raw"));
    let bytes: Vec<u8> = field.values().iter().flat_map(|v| v.to_le_bytes()).collect();
    write_atomic(&raw, &bytes)?;
    let meta = SnapshotMeta { dim: lat.dim, m: lat.m, length: lat.length, t, step };
    write_json(&raw.with_extension("json"), &meta)?;
    Ok(raw)
}

pub fn read_snapshot(raw: &Path) -> Result<(SnapshotMeta, Field)> {
    let meta: SnapshotMeta = serde_json::from_slice(&fs::read(raw.with_extension("json"))?)?;
    let bytes = fs::read(raw)?;
    let values = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunks of eight bytes")))
        .collect();
    let lattice = Lattice::new(meta.dim, meta.m, meta.length)?;
    Ok((meta, Field::from_values(lattice, values)?))
}
