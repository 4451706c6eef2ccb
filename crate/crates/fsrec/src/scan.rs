//! Ingestion of real directory trees into snapshots.
//!
//! Every scanned tree is rooted at the fixed node `root`, so snapshots
//! taken from different directories are comparable. Directories collapse
//! to the single token `dir`; file values are the SHA-256 of the file's
//! bytes, so two files count as equal exactly when their contents match.
//! Symbolic links and special files are outside the model and are skipped
//! with a warning.

use std::fs;
use std::io::{self, Read};
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::filesystem::Filesystem;
use crate::path::NodePath;
use crate::value::Value;

/// Root segment of every scanned snapshot.
pub const ROOT_SEGMENT: &str = "root";

/// Token shared by all directory values.
pub const DIR_TOKEN: &str = "dir";

#[derive(Debug, Error)]
pub enum ScanError {
    #[error("{path}: not a directory")]
    NotADirectory { path: PathBuf },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

/// Why an entry was left out of a scan.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SkipReason {
    SymbolicLink,
    SpecialFile,
    UnrepresentableName,
}

impl SkipReason {
    pub fn describe(&self) -> &'static str {
        match self {
            SkipReason::SymbolicLink => "symbolic link",
            SkipReason::SpecialFile => "special file",
            SkipReason::UnrepresentableName => "name not representable in a snapshot",
        }
    }
}

/// A scanned snapshot plus everything that was skipped.
#[derive(Debug)]
pub struct ScanOutcome {
    pub filesystem: Filesystem,
    pub skipped: Vec<(PathBuf, SkipReason)>,
}

fn hash_file(path: &Path) -> io::Result<String> {
    let mut file = fs::File::open(path)?;
    let mut hasher = Sha256::new();
    let mut buffer = [0u8; 64 * 1024];
    loop {
        let n = file.read(&mut buffer)?;
        if n == 0 {
            break;
        }
        hasher.update(&buffer[..n]);
    }
    Ok(hex::encode(hasher.finalize()))
}

fn io_err(path: &Path, source: io::Error) -> ScanError {
    ScanError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn walk(
    dir: &Path,
    node: &NodePath,
    entries: &mut Vec<(NodePath, Value)>,
    skipped: &mut Vec<(PathBuf, SkipReason)>,
) -> Result<(), ScanError> {
    let mut children: Vec<_> = fs::read_dir(dir)
        .map_err(|e| io_err(dir, e))?
        .collect::<Result<_, _>>()
        .map_err(|e| io_err(dir, e))?;
    children.sort_by_key(|entry| entry.file_name());
    for child in children {
        let path = child.path();
        let name = match child.file_name().into_string() {
            Ok(name) => name,
            Err(_) => {
                skipped.push((path, SkipReason::UnrepresentableName));
                continue;
            }
        };
        let child_node = match node.child(name) {
            Ok(n) => n,
            Err(_) => {
                skipped.push((path, SkipReason::UnrepresentableName));
                continue;
            }
        };
        let meta = fs::symlink_metadata(&path).map_err(|e| io_err(&path, e))?;
        let file_type = meta.file_type();
        if file_type.is_symlink() {
            skipped.push((path, SkipReason::SymbolicLink));
        } else if file_type.is_dir() {
            entries.push((child_node.clone(), Value::dir(DIR_TOKEN).unwrap()));
            walk(&path, &child_node, entries, skipped)?;
        } else if file_type.is_file() {
            let digest = hash_file(&path).map_err(|e| io_err(&path, e))?;
            entries.push((child_node, Value::file(digest).unwrap()));
        } else {
            skipped.push((path, SkipReason::SpecialFile));
        }
    }
    Ok(())
}

/// Scans a directory tree into a snapshot rooted at [`ROOT_SEGMENT`].
pub fn scan_directory(dir: &Path) -> Result<ScanOutcome, ScanError> {
    let meta = fs::metadata(dir).map_err(|e| io_err(dir, e))?;
    if !meta.is_dir() {
        return Err(ScanError::NotADirectory {
            path: dir.to_path_buf(),
        });
    }
    let root = NodePath::root(ROOT_SEGMENT).unwrap();
    let mut entries = vec![(root.clone(), Value::dir(DIR_TOKEN).unwrap())];
    let mut skipped = Vec::new();
    walk(dir, &root, &mut entries, &mut skipped)?;
    let filesystem =
        Filesystem::from_entries(entries).expect("directory walks produce valid trees");
    Ok(ScanOutcome {
        filesystem,
        skipped,
    })
}
