//! Dataset manifests: `path,label,split` CSV.

use std::collections::HashSet;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Split {
    Train,
    Test,
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Split::Train => "train",
            Split::Test => "test",
        })
    }
}

impl FromStr for Split {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "train" => Ok(Split::Train),
            "test" => Ok(Split::Test),
            other => Err(format!("unknown split {other:?} (expected train or test)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entry {
    /// As written in the manifest.
    pub path: PathBuf,
    pub label: String,
    pub split: Split,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Manifest {
    pub entries: Vec<Entry>,
    /// Directory relative entry paths are resolved against.
    pub base_dir: Option<PathBuf>,
}

const HEADER: [&str; 3] = ["path", "label", "split"];

impl Manifest {
    /// Parses manifest text. Row numbers in errors count the header as row 1.
    pub fn parse(bytes: &[u8]) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new().has_headers(false).flexible(true).from_reader(bytes);
        let mut records = reader.records();
        let header = match records.next() {
            Some(Ok(r)) => r,
            Some(Err(e)) => return Err(Error::Manifest { row: 1, msg: e.to_string() }),
            None => return Err(Error::Manifest { row: 1, msg: "missing header path,label,split".into() }),
        };
        if header.iter().map(str::trim).ne(HEADER) {
            return Err(Error::Manifest {
                row: 1,
                msg: format!("header must be path,label,split, got {:?}", header.iter().collect::<Vec<_>>().join(",")),
            });
        }
        let mut entries = Vec::new();
        let mut seen = HashSet::new();
        for record in records {
            let record = record.map_err(|e| Error::Manifest {
                row: e.position().map_or(0, |p| p.line() as usize),
                msg: e.to_string(),
            })?;
            let row = record.position().map_or(0, |p| p.line() as usize);
            if record.iter().all(|f| f.trim().is_empty()) {
                continue;
            }
            if record.len() != 3 {
                return Err(Error::Manifest { row, msg: format!("expected 3 fields, got {}", record.len()) });
            }
            let (path, label, split) = (record[0].trim(), record[1].trim(), record[2].trim());
            if path.is_empty() || label.is_empty() {
                return Err(Error::Manifest { row, msg: "empty path or label".into() });
            }
            let split = split.parse::<Split>().map_err(|msg| Error::Manifest { row, msg })?;
            if !seen.insert(path.to_string()) {
                return Err(Error::Manifest { row, msg: format!("duplicate path {path:?}") });
            }
            entries.push(Entry { path: PathBuf::from(path), label: label.to_string(), split });
        }
        Ok(Manifest { entries, base_dir: None })
    }

    /// Reads a manifest file; relative entry paths resolve against its directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        let mut m = Self::parse(&bytes)?;
        m.base_dir = path.parent().map(Path::to_path_buf);
        Ok(m)
    }

    pub fn resolve(&self, entry: &Entry) -> PathBuf {
        match &self.base_dir {
            Some(dir) if entry.path.is_relative() => dir.join(&entry.path),
            _ => entry.path.clone(),
        }
    }

    pub fn split(&self, split: Split) -> impl Iterator<Item = &Entry> {
        self.entries.iter().filter(move |e| e.split == split)
    }
}
