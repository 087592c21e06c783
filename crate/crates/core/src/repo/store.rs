use std::collections::BTreeMap;
use std::fs::{self, File, OpenOptions};
use std::io::Write;
use std::os::unix::io::AsRawFd;
use std::path::{Path, PathBuf};
use std::sync::RwLock;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::filters::parse_dialect;
use crate::fof::parse_fof;
use crate::format::Format;

pub const MANIFEST: &str = "manifest.json";
pub const PROBLEMS_DIR: &str = "problems";
pub const META: &str = "meta.json";
const LOCK: &str = ".manifest.lock";

/// Formats a record may hold.
pub const STORABLE: [Format; 4] = [Format::Fof, Format::Gcl, Format::Jgex, Format::Geogebra];

/// `GEO` followed by four digits.
pub fn valid_id(id: &str) -> bool {
    id.len() == 7 && id.starts_with("GEO") && id[3..].bytes().all(|b| b.is_ascii_digit())
}

/// File name of a format inside a record directory.
pub fn file_name(f: Format) -> String {
    format!("problem{}", f.extension())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecordMeta {
    pub id: String,
    pub title: String,
    pub formats: Vec<Format>,
    /// Unix seconds.
    pub created: u64,
    pub modified: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProblemRecord {
    pub meta: RecordMeta,
    pub content: BTreeMap<Format, String>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Manifest {
    problems: Vec<RecordMeta>,
}

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("corrupt manifest: {0}")]
    CorruptManifest(String),
    #[error("record {id}: {message}")]
    InvalidRecord { id: String, message: String },
    #[error("no problem with id {0}")]
    NotFound(String),
    #[error("`{0}` is not a problem id (expected GEO followed by four digits)")]
    BadId(String),
    #[error("ingest needs a fof file")]
    MissingFof,
    #[error("format {0} cannot be stored")]
    Unstorable(Format),
    #[error("{file}: {message}")]
    Parse { file: PathBuf, message: String },
    #[error("problem {0} exists; pass overwrite to replace it")]
    Exists(String),
    #[error("injected failure")]
    Injected,
}

fn io(path: &Path) -> impl FnOnce(std::io::Error) -> StoreError + '_ {
    move |source| StoreError::Io { path: path.to_path_buf(), source }
}

fn invalid(id: &str, message: impl Into<String>) -> StoreError {
    StoreError::InvalidRecord { id: id.to_string(), message: message.into() }
}

/// Ingest step after which an injected failure aborts the operation.
#[doc(hidden)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FaultPoint {
    AfterStaging,
    BeforeManifestRename,
}

/// Exclusive advisory lock on the store, released on drop.
struct StoreLock(File);

impl StoreLock {
    fn take(root: &Path) -> Result<Self, StoreError> {
        let path = root.join(LOCK);
        let f = OpenOptions::new().create(true).truncate(false).write(true).open(&path).map_err(io(&path))?;
        // SAFETY: flock on a valid, owned descriptor.
        if unsafe { libc::flock(f.as_raw_fd(), libc::LOCK_EX) } != 0 {
            return Err(StoreError::Io { path, source: std::io::Error::last_os_error() });
        }
        Ok(StoreLock(f))
    }
}

impl Drop for StoreLock {
    fn drop(&mut self) {
        // SAFETY: as above.
        unsafe {
            libc::flock(self.0.as_raw_fd(), libc::LOCK_UN);
        }
    }
}

/// On-disk problem store. Reads share the in-memory copy; ingest is
/// exclusive both in-process and across processes.
#[derive(Debug)]
pub struct Store {
    root: PathBuf,
    records: RwLock<BTreeMap<String, ProblemRecord>>,
}

fn now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

fn load_records(root: &Path) -> Result<BTreeMap<String, ProblemRecord>, StoreError> {
    let manifest_path = root.join(MANIFEST);
    if !manifest_path.exists() {
        return Ok(BTreeMap::new());
    }
    let text = fs::read_to_string(&manifest_path).map_err(io(&manifest_path))?;
    let manifest: Manifest = serde_json::from_str(&text).map_err(|e| StoreError::CorruptManifest(e.to_string()))?;
    let mut records = BTreeMap::new();
    for (k, meta) in manifest.problems.into_iter().enumerate() {
        let id = meta.id.clone();
        if !valid_id(&id) {
            return Err(StoreError::CorruptManifest(format!("entry {}: `{id}` is not a problem id", k + 1)));
        }
        if records.contains_key(&id) {
            return Err(invalid(&id, "listed twice in the manifest"));
        }
        let dir = root.join(PROBLEMS_DIR).join(&id);
        let meta_path = dir.join(META);
        let on_disk: RecordMeta = fs::read_to_string(&meta_path)
            .map_err(|e| invalid(&id, format!("{}: {e}", meta_path.display())))
            .and_then(|t| serde_json::from_str(&t).map_err(|e| invalid(&id, format!("{META}: {e}"))))?;
        if on_disk != meta {
            return Err(invalid(&id, format!("{META} disagrees with the manifest")));
        }
        if !meta.formats.contains(&Format::Fof) {
            return Err(invalid(&id, "no fof format listed"));
        }
        let mut content = BTreeMap::new();
        for &f in &meta.formats {
            if !STORABLE.contains(&f) {
                return Err(invalid(&id, format!("format {f} cannot be stored")));
            }
            let path = dir.join(file_name(f));
            let text = fs::read_to_string(&path).map_err(|e| invalid(&id, format!("{}: {e}", file_name(f))))?;
            if text.is_empty() {
                return Err(invalid(&id, format!("{} is empty", file_name(f))));
            }
            content.insert(f, text);
        }
        records.insert(id, ProblemRecord { meta, content });
    }
    Ok(records)
}

impl Store {
    /// Opens (creating if needed) the store at `root`.
    pub fn open(root: impl Into<PathBuf>) -> Result<Self, StoreError> {
        let root = root.into();
        fs::create_dir_all(&root).map_err(io(&root))?;
        let records = load_records(&root)?;
        Ok(Store { root, records: RwLock::new(records) })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn ids(&self) -> Vec<String> {
        self.records.read().expect("store lock").keys().cloned().collect()
    }

    pub fn record(&self, id: &str) -> Option<ProblemRecord> {
        self.records.read().expect("store lock").get(id).cloned()
    }

    /// The requested format if stored, else the FOF content.
    pub fn get(&self, id: &str, format: Format) -> Result<(Format, String), StoreError> {
        let records = self.records.read().expect("store lock");
        let rec = records.get(id).ok_or_else(|| StoreError::NotFound(id.to_string()))?;
        if let Some(c) = rec.content.get(&format) {
            return Ok((format, c.clone()));
        }
        let fof = rec.content.get(&Format::Fof).expect("fof is mandatory");
        Ok((Format::Fof, fof.clone()))
    }

    pub fn ingest(
        &self,
        id: &str,
        title: &str,
        files: &BTreeMap<Format, PathBuf>,
        overwrite: bool,
    ) -> Result<RecordMeta, StoreError> {
        self.ingest_inner(id, title, files, overwrite, None)
    }

    #[doc(hidden)]
    pub fn ingest_with_fault(
        &self,
        id: &str,
        title: &str,
        files: &BTreeMap<Format, PathBuf>,
        fault: FaultPoint,
    ) -> Result<RecordMeta, StoreError> {
        self.ingest_inner(id, title, files, false, Some(fault))
    }

    fn ingest_inner(
        &self,
        id: &str,
        title: &str,
        files: &BTreeMap<Format, PathBuf>,
        overwrite: bool,
        fault: Option<FaultPoint>,
    ) -> Result<RecordMeta, StoreError> {
        if !valid_id(id) {
            return Err(StoreError::BadId(id.to_string()));
        }
        if !files.contains_key(&Format::Fof) {
            return Err(StoreError::MissingFof);
        }
        let mut content = BTreeMap::new();
        for (&f, path) in files {
            if !STORABLE.contains(&f) {
                return Err(StoreError::Unstorable(f));
            }
            let parse_err = |message: String| StoreError::Parse { file: path.clone(), message };
            let bytes = fs::read(path).map_err(io(path))?;
            let text = String::from_utf8(bytes).map_err(|_| parse_err("not valid UTF-8".into()))?;
            let checked = match f {
                Format::Fof => parse_fof(&text).map(|_| ()).map_err(|e| e.to_string()),
                other => parse_dialect(other, &text).map(|_| ()).map_err(|e| e.to_string()),
            };
            checked.map_err(parse_err)?;
            content.insert(f, text);
        }

        let _lock = StoreLock::take(&self.root)?;
        let mut records = self.records.write().expect("store lock");
        // Another process may have ingested since this store was opened.
        *records = load_records(&self.root)?;
        let previous = records.get(id).map(|r| r.meta.clone());
        if previous.is_some() && !overwrite {
            return Err(StoreError::Exists(id.to_string()));
        }
        let t = now();
        let meta = RecordMeta {
            id: id.to_string(),
            title: title.to_string(),
            formats: content.keys().copied().collect(),
            created: previous.as_ref().map_or(t, |p| p.created),
            modified: t,
        };

        let problems = self.root.join(PROBLEMS_DIR);
        fs::create_dir_all(&problems).map_err(io(&problems))?;
        let staging = self.root.join(format!(".staging-{id}-{}", std::process::id()));
        if staging.exists() {
            fs::remove_dir_all(&staging).map_err(io(&staging))?;
        }
        fs::create_dir(&staging).map_err(io(&staging))?;
        for (&f, text) in &content {
            let p = staging.join(file_name(f));
            fs::write(&p, text).map_err(io(&p))?;
        }
        let meta_json = serde_json::to_string_pretty(&meta).expect("meta serializes") + "\n";
        let p = staging.join(META);
        fs::write(&p, meta_json).map_err(io(&p))?;
        if fault == Some(FaultPoint::AfterStaging) {
            return Err(StoreError::Injected);
        }

        let mut manifest = Manifest { problems: records.values().map(|r| r.meta.clone()).collect() };
        manifest.problems.retain(|m| m.id != id);
        manifest.problems.push(meta.clone());
        manifest.problems.sort_by(|a, b| a.id.cmp(&b.id));
        let tmp = self.root.join(format!("{MANIFEST}.tmp"));
        {
            let mut f = File::create(&tmp).map_err(io(&tmp))?;
            f.write_all((serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n").as_bytes())
                .and_then(|_| f.sync_all())
                .map_err(io(&tmp))?;
        }

        let dir = problems.join(id);
        let trash = self.root.join(format!(".trash-{id}-{}", std::process::id()));
        if dir.exists() {
            fs::rename(&dir, &trash).map_err(io(&dir))?;
        }
        fs::rename(&staging, &dir).map_err(io(&staging))?;
        if fault == Some(FaultPoint::BeforeManifestRename) {
            return Err(StoreError::Injected);
        }
        let manifest_path = self.root.join(MANIFEST);
        fs::rename(&tmp, &manifest_path).map_err(io(&manifest_path))?;
        if trash.exists() {
            let _ = fs::remove_dir_all(&trash);
        }
        records.insert(id.to_string(), ProblemRecord { meta: meta.clone(), content });
        Ok(meta)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids() {
        assert!(valid_id("GEO0001"));
        for bad in ["GEO001", "GEO00011", "geo0001", "GEO00a1", "", "GEO０001"] {
            assert!(!valid_id(bad), "{bad}");
        }
    }

    #[test]
    fn empty_directory() {
        let dir = tempfile::tempdir().unwrap();
        assert!(Store::open(dir.path()).unwrap().ids().is_empty());
    }
}
