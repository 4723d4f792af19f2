//! Coefficient cache: content-addressed storage of Lanczos runs.
//!
//! The key is a hash of the job's canonical description (model, parameters,
//! step count, prune threshold), so any change to the request lands in a
//! distinct entry. Entries are ordinary coefficient files; a hit reloads
//! them bit-identically. Loads are verified (positivity, matching request,
//! consistent count) and a corrupt entry is recomputed with a warning note
//! rather than trusted.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::jobs::{run_ising_job, IsingJob};
use recmethod_core::{load_coeffs, save_coeffs, CoeffFile, Error, Result, Tabulated};

/// One cache entry.
#[derive(Clone, Debug)]
pub struct CacheEntry {
    pub key: String,
    pub path: PathBuf,
    pub metadata: BTreeMap<String, String>,
}

/// Result of a compute-or-load.
#[derive(Clone, Debug)]
pub struct CacheOutcome {
    pub entry: CacheEntry,
    pub values: Tabulated,
    pub hit: bool,
    /// Human-readable events (hits, rejected entries); not part of any
    /// deterministic output file.
    pub notes: Vec<String>,
}

/// Hex digest of the job's canonical description.
pub fn cache_key(job: &IsingJob) -> String {
    let digest = Sha256::digest(job.description().as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// Resolves the cache directory: the explicit flag, then the
/// `RECMETHOD_CACHE_DIR` environment variable, then `~/.cache/recmethod`.
pub fn resolve_cache_dir(flag: Option<&Path>) -> Result<PathBuf> {
    if let Some(p) = flag {
        return Ok(p.to_path_buf());
    }
    if let Some(p) = std::env::var_os("RECMETHOD_CACHE_DIR") {
        return Ok(PathBuf::from(p));
    }
    if let Some(xdg) = std::env::var_os("XDG_CACHE_HOME") {
        return Ok(PathBuf::from(xdg).join("recmethod"));
    }
    if let Some(home) = std::env::var_os("HOME") {
        return Ok(PathBuf::from(home).join(".cache").join("recmethod"));
    }
    Err(Error::Invalid(
        "no cache directory: pass --cache-dir or set RECMETHOD_CACHE_DIR".into(),
    ))
}

fn verify_entry(file: &CoeffFile, job: &IsingJob) -> Result<()> {
    if file.values.values().iter().any(|&v| !(v > 0.0)) {
        return Err(Error::Invalid("a stored coefficient is not positive".into()));
    }
    match file.metadata.get("request") {
        Some(r) if *r == job.description() => {}
        Some(r) => {
            return Err(Error::Invalid(format!(
                "stored request {r:?} does not match {:?}",
                job.description()
            )))
        }
        None => return Err(Error::Invalid("entry has no request field".into())),
    }
    let count: usize = file
        .metadata
        .get("coefficients")
        .and_then(|c| c.parse().ok())
        .ok_or_else(|| Error::Invalid("entry has no coefficient count".into()))?;
    if count != file.values.len() {
        return Err(Error::Invalid(format!(
            "entry claims {count} coefficients but holds {}",
            file.values.len()
        )));
    }
    Ok(())
}

/// Computes or loads the coefficients for `job` under `dir`.
pub fn cache_coeffs(dir: &Path, job: &IsingJob) -> Result<CacheOutcome> {
    std::fs::create_dir_all(dir)?;
    let key = cache_key(job);
    let path = dir.join(format!("{key}.coeffs"));
    let mut notes = Vec::new();
    if path.exists() {
        match load_coeffs(&path).and_then(|f| verify_entry(&f, job).map(|_| f)) {
            Ok(file) => {
                notes.push(format!("cache hit {}", &key[..12]));
                return Ok(CacheOutcome {
                    entry: CacheEntry {
                        key,
                        path,
                        metadata: file.metadata,
                    },
                    values: file.values,
                    hit: true,
                    notes,
                });
            }
            Err(e) => notes.push(format!(
                "cache entry {} rejected ({e}); recomputing",
                &key[..12]
            )),
        }
    }
    let result = run_ising_job(job)?;
    save_coeffs(&path, &result.values, &result.metadata)?;
    // Metadata as reread, so hit and miss hand back the same view.
    let file = load_coeffs(&path)?;
    Ok(CacheOutcome {
        entry: CacheEntry {
            key,
            path,
            metadata: file.metadata,
        },
        values: file.values,
        hit: false,
        notes,
    })
}

fn is_entry_name(name: &str) -> bool {
    name.strip_suffix(".coeffs")
        .map(|stem| stem.len() == 64 && stem.chars().all(|c| c.is_ascii_hexdigit()))
        .unwrap_or(false)
}

/// Lists cache entries as (key, metadata), sorted by key.
pub fn list_entries(dir: &Path) -> Result<Vec<(String, BTreeMap<String, String>)>> {
    let mut out = Vec::new();
    if !dir.exists() {
        return Ok(out);
    }
    for entry in std::fs::read_dir(dir)? {
        let entry = entry?;
        let name = entry.file_name().to_string_lossy().into_owned();
        if !is_entry_name(&name) {
            continue;
        }
        let metadata = match load_coeffs(&entry.path()) {
            Ok(f) => f.metadata,
            Err(_) => BTreeMap::from([("status".to_string(), "unreadable".to_string())]),
        };
        out.push((name.trim_end_matches(".coeffs").to_string(), metadata));
    }
    out.sort();
    Ok(out)
}

/// Removes every cache entry file; leaves anything else in the directory
/// alone. Returns how many were removed.
pub fn clear_entries(dir: &Path) -> Result<usize> {
    let mut removed = 0;
    if !dir.exists() {
        return Ok(0);
    }
    for entry in std::fs::read_dir(dir)? {
        let entry = entry?;
        if is_entry_name(&entry.file_name().to_string_lossy()) {
            std::fs::remove_file(entry.path())?;
            removed += 1;
        }
    }
    Ok(removed)
}
