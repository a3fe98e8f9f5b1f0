//! Atomic file output and the run manifest.

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use tempfile::NamedTempFile;

use crate::error::Failure;

pub const MANIFEST: &str = "manifest.json";

/// Writes `path` via a temporary file in the same directory, renamed into
/// place only once `fill` has succeeded.
pub fn write_atomic<R>(
    path: &Path,
    fill: impl FnOnce(&mut BufWriter<&mut NamedTempFile>) -> std::io::Result<R>,
) -> Result<R, Failure> {
    let io = |source| Failure::Io {
        path: path.to_path_buf(),
        source,
    };
    let dir = path
        .parent()
        .filter(|d| !d.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    let mut tmp = NamedTempFile::new_in(dir).map_err(io)?;
    let value = {
        let mut w = BufWriter::new(&mut tmp);
        let value = fill(&mut w).map_err(io)?;
        w.flush().map_err(io)?;
        value
    };
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(value)
}

pub fn ensure_dir(dir: &Path) -> Result<(), Failure> {
    fs::create_dir_all(dir).map_err(|source| Failure::Io {
        path: dir.to_path_buf(),
        source,
    })
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileEntry {
    pub command: String,
    pub rows: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub engine: String,
    pub engine_version: String,
    pub config_sha256: String,
    /// Command-line settings that replaced configuration values.
    pub overrides: BTreeMap<String, String>,
    pub files: BTreeMap<String, FileEntry>,
}

impl Manifest {
    pub fn new(config_sha256: &str, overrides: BTreeMap<String, String>) -> Self {
        Manifest {
            engine: env!("CARGO_PKG_NAME").into(),
            engine_version: env!("CARGO_PKG_VERSION").into(),
            config_sha256: config_sha256.into(),
            overrides,
            files: BTreeMap::new(),
        }
    }

    fn same_run(&self, other: &Manifest) -> bool {
        (&self.engine_version, &self.config_sha256, &self.overrides)
            == (&other.engine_version, &other.config_sha256, &other.overrides)
    }
}

/// Records `files` in the directory's manifest. Entries from earlier runs
/// are kept only if they came from the same configuration, overrides and
/// engine version.
pub fn update_manifest(dir: &Path, fresh: Manifest, files: &[(String, FileEntry)]) -> anyhow::Result<PathBuf> {
    let path = dir.join(MANIFEST);
    let mut manifest = match fs::read_to_string(&path) {
        Ok(text) => match serde_json::from_str::<Manifest>(&text) {
            Ok(old) if old.same_run(&fresh) => old,
            Ok(_) => fresh,
            Err(e) => {
                log::warn!("replacing unreadable manifest {}: {e}", path.display());
                fresh
            }
        },
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => fresh,
        Err(source) => return Err(Failure::Io { path, source }.into()),
    };
    manifest.files.extend(files.iter().cloned());
    let text = serde_json::to_string_pretty(&manifest).context("serializing manifest")?;
    write_atomic(&path, |w| writeln!(w, "{text}"))?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entry(rows: usize) -> FileEntry {
        FileEntry {
            command: "simulate".into(),
            rows,
        }
    }

    #[test]
    fn known_digest() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn manifest_merges_only_for_the_same_config() {
        let dir = tempfile::tempdir().unwrap();
        let fresh = |hash: &str| Manifest::new(hash, BTreeMap::new());
        let read =
            || -> Manifest { serde_json::from_str(&fs::read_to_string(dir.path().join(MANIFEST)).unwrap()).unwrap() };
        update_manifest(dir.path(), fresh("aa"), &[("x.csv".into(), entry(1))]).unwrap();
        update_manifest(dir.path(), fresh("aa"), &[("y.csv".into(), entry(2))]).unwrap();
        assert_eq!(read().files.len(), 2);
        update_manifest(dir.path(), fresh("bb"), &[("z.csv".into(), entry(3))]).unwrap();
        let m = read();
        assert_eq!(m.files.keys().collect::<Vec<_>>(), ["z.csv"]);
        assert_eq!(m.config_sha256, "bb");
    }

    #[test]
    fn failed_fill_leaves_no_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.csv");
        let r = write_atomic(&path, |_| -> std::io::Result<()> { Err(std::io::Error::other("boom")) });
        assert!(matches!(r, Err(Failure::Io { .. })));
        assert!(!path.exists());
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 0);
    }
}
