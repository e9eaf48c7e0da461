//! Byte-level ZIP container access.
//!
//! A [`Container`] is an in-memory map from [`EntryPath`] to payload. It is
//! read from and written to PKZIP streams; writing is deterministic: all
//! timestamps are pinned to the DOS epoch (1980-01-01 00:00), permissions
//! are fixed, and entries are emitted with `manifest.xml` first followed by
//! the remaining paths in byte-lexicographic order.

use std::collections::BTreeMap;
use std::io::{Cursor, Read, Write};

use zip::write::SimpleFileOptions;
use zip::{CompressionMethod, DateTime, ZipArchive, ZipWriter};

use crate::path::{EntryPath, PathError};

/// Name of the mandatory manifest at the container root.
pub const MANIFEST_PATH: &str = "manifest.xml";

const DEFLATE_LEVEL: i64 = 6;
const S_IFMT: u32 = 0o170000;
const S_IFLNK: u32 = 0o120000;

#[derive(Debug, thiserror::Error)]
pub enum ContainerError {
    #[error("not a ZIP archive: {0}")]
    NotAZip(String),
    #[error("corrupt entry `{path}`: {reason}")]
    CorruptEntry { path: String, reason: String },
    #[error("unsafe entry path `{path}`: {reason}")]
    UnsafePath { path: String, reason: PathError },
    #[error("entry `{path}` is not supported: {reason}")]
    Unsupported { path: String, reason: String },
    #[error("duplicate entry `{0}`")]
    DuplicateEntry(String),
    #[error("no such entry `{0}`")]
    NoSuchEntry(String),
    #[error("invalid container: {0}")]
    InvalidContainer(String),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub enum Compression {
    #[default]
    Deflate,
    Store,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContainerEntry {
    pub path: EntryPath,
    pub bytes: Vec<u8>,
    pub compression: Compression,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Container {
    entries: BTreeMap<EntryPath, ContainerEntry>,
}

impl Container {
    pub fn new() -> Self {
        Self::default()
    }

    /// Reads a ZIP stream. Directory entries are checked for path safety and
    /// then dropped; only files become entries.
    pub fn open(bytes: &[u8]) -> Result<Self, ContainerError> {
        if bytes.is_empty() {
            return Err(ContainerError::NotAZip("empty input".into()));
        }
        let mut zip = ZipArchive::new(Cursor::new(bytes)).map_err(|e| match e {
            zip::result::ZipError::Io(e) => ContainerError::NotAZip(e.to_string()),
            other => ContainerError::NotAZip(other.to_string()),
        })?;

        let mut container = Container::new();
        for index in 0..zip.len() {
            let mut file = zip.by_index(index).map_err(|e| match e {
                zip::result::ZipError::UnsupportedArchive(reason) => ContainerError::Unsupported {
                    path: format!("#{index}"),
                    reason: reason.to_string(),
                },
                other => ContainerError::CorruptEntry {
                    path: format!("#{index}"),
                    reason: other.to_string(),
                },
            })?;
            let name = file.name().to_string();

            let is_dir = name.ends_with('/');
            let checked = if is_dir {
                &name[..name.len() - 1]
            } else {
                &name[..]
            };
            let path = EntryPath::new(checked).map_err(|reason| ContainerError::UnsafePath {
                path: name.clone(),
                reason,
            })?;
            if is_dir {
                continue;
            }
            if file
                .unix_mode()
                .is_some_and(|mode| mode & S_IFMT == S_IFLNK)
            {
                return Err(ContainerError::Unsupported {
                    path: name,
                    reason: "symbolic link".into(),
                });
            }

            let compression = match file.compression() {
                CompressionMethod::Stored => Compression::Store,
                CompressionMethod::Deflated => Compression::Deflate,
                other => {
                    return Err(ContainerError::Unsupported {
                        path: name,
                        reason: format!("compression method {other}"),
                    })
                }
            };

            let mut payload = Vec::with_capacity(file.size().min(1 << 24) as usize);
            file.read_to_end(&mut payload)
                .map_err(|e| ContainerError::CorruptEntry {
                    path: name.clone(),
                    reason: e.to_string(),
                })?;

            if container.entries.contains_key(&path) {
                return Err(ContainerError::DuplicateEntry(path.to_string()));
            }
            container.entries.insert(
                path.clone(),
                ContainerEntry {
                    path,
                    bytes: payload,
                    compression,
                },
            );
        }
        Ok(container)
    }

    /// Serializes to a ZIP stream. Identical containers always produce
    /// identical bytes.
    pub fn to_bytes(&self) -> Result<Vec<u8>, ContainerError> {
        let invalid = |e: zip::result::ZipError| ContainerError::InvalidContainer(e.to_string());
        let mut writer = ZipWriter::new(Cursor::new(Vec::new()));
        for entry in self.write_order() {
            let method = match entry.compression {
                Compression::Deflate => CompressionMethod::Deflated,
                Compression::Store => CompressionMethod::Stored,
            };
            let mut options = SimpleFileOptions::default()
                .compression_method(method)
                .last_modified_time(DateTime::default())
                .unix_permissions(0o644)
                .large_file(entry.bytes.len() as u64 >= u32::MAX as u64);
            if entry.compression == Compression::Deflate {
                options = options.compression_level(Some(DEFLATE_LEVEL));
            }
            writer
                .start_file(entry.path.as_str(), options)
                .map_err(invalid)?;
            writer
                .write_all(&entry.bytes)
                .map_err(|e| ContainerError::InvalidContainer(e.to_string()))?;
        }
        Ok(writer.finish().map_err(invalid)?.into_inner())
    }

    fn write_order(&self) -> impl Iterator<Item = &ContainerEntry> {
        let manifest = self
            .entries
            .iter()
            .filter(|(path, _)| path.as_str() == MANIFEST_PATH);
        let rest = self
            .entries
            .iter()
            .filter(|(path, _)| path.as_str() != MANIFEST_PATH);
        manifest.chain(rest).map(|(_, entry)| entry)
    }

    /// Adds a new entry; fails if the path is already taken.
    pub fn add(
        &mut self,
        path: &str,
        bytes: impl Into<Vec<u8>>,
        compression: Compression,
    ) -> Result<(), ContainerError> {
        let path = checked_path(path)?;
        if self.entries.contains_key(&path) {
            return Err(ContainerError::DuplicateEntry(path.to_string()));
        }
        self.insert_path(path, bytes.into(), compression);
        Ok(())
    }

    /// Adds or replaces the entry at `path`.
    pub fn put(
        &mut self,
        path: &str,
        bytes: impl Into<Vec<u8>>,
        compression: Compression,
    ) -> Result<(), ContainerError> {
        let path = checked_path(path)?;
        self.insert_path(path, bytes.into(), compression);
        Ok(())
    }

    pub(crate) fn insert_path(
        &mut self,
        path: EntryPath,
        bytes: Vec<u8>,
        compression: Compression,
    ) {
        self.entries.insert(
            path.clone(),
            ContainerEntry {
                path,
                bytes,
                compression,
            },
        );
    }

    pub fn get(&self, path: &str) -> Result<&[u8], ContainerError> {
        self.entry(path).map(|e| e.bytes.as_slice())
    }

    pub fn entry(&self, path: &str) -> Result<&ContainerEntry, ContainerError> {
        EntryPath::new(path)
            .ok()
            .and_then(|p| self.entries.get(&p))
            .ok_or_else(|| ContainerError::NoSuchEntry(path.to_string()))
    }

    pub fn remove(&mut self, path: &str) -> Result<ContainerEntry, ContainerError> {
        EntryPath::new(path)
            .ok()
            .and_then(|p| self.entries.remove(&p))
            .ok_or_else(|| ContainerError::NoSuchEntry(path.to_string()))
    }

    pub fn contains(&self, path: &EntryPath) -> bool {
        self.entries.contains_key(path)
    }

    pub fn paths(&self) -> impl Iterator<Item = &EntryPath> {
        self.entries.keys()
    }

    pub fn entries(&self) -> impl Iterator<Item = &ContainerEntry> {
        self.entries.values()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

fn checked_path(raw: &str) -> Result<EntryPath, ContainerError> {
    EntryPath::new(raw).map_err(|reason| ContainerError::UnsafePath {
        path: raw.to_string(),
        reason,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_input_is_not_a_zip() {
        assert!(matches!(
            Container::open(&[]),
            Err(ContainerError::NotAZip(_))
        ));
        assert!(matches!(
            Container::open(b"hello, world"),
            Err(ContainerError::NotAZip(_))
        ));
    }

    #[test]
    fn empty_container_is_bare_end_of_central_directory() {
        let bytes = Container::new().to_bytes().unwrap();
        assert_eq!(bytes.len(), 22);
        assert_eq!(&bytes[..4], b"PK\x05\x06");
        assert!(Container::open(&bytes).unwrap().is_empty());
    }

    #[test]
    fn single_stored_manifest() {
        let mut c = Container::new();
        c.add(MANIFEST_PATH, b"<x/>".to_vec(), Compression::Store)
            .unwrap();
        let reopened = Container::open(&c.to_bytes().unwrap()).unwrap();
        assert_eq!(reopened.len(), 1);
        let entry = reopened.entry(MANIFEST_PATH).unwrap();
        assert_eq!(entry.bytes, b"<x/>");
        assert_eq!(entry.compression, Compression::Store);
    }

    #[test]
    fn get_add_remove() {
        let mut c = Container::new();
        c.add("a/b.txt", "x", Compression::Deflate).unwrap();
        assert_eq!(c.get("a/b.txt").unwrap(), b"x");
        assert_eq!(c.get("./a/b.txt").unwrap(), b"x");
        assert!(matches!(c.get("nope"), Err(ContainerError::NoSuchEntry(_))));
        assert!(matches!(
            c.add("a/b.txt", "y", Compression::Deflate),
            Err(ContainerError::DuplicateEntry(_))
        ));
        c.remove("a/b.txt").unwrap();
        assert!(matches!(
            c.get("a/b.txt"),
            Err(ContainerError::NoSuchEntry(_))
        ));
    }

    #[test]
    fn add_rejects_unsafe_paths() {
        let mut c = Container::new();
        for bad in ["../x", "/x", "a\\b", "C:/x", ""] {
            assert!(
                matches!(
                    c.add(bad, "x", Compression::Deflate),
                    Err(ContainerError::UnsafePath { .. })
                ),
                "{bad}"
            );
        }
    }

    #[test]
    fn manifest_written_first() {
        let mut c = Container::new();
        c.add("a.txt", "a", Compression::Store).unwrap();
        c.add(MANIFEST_PATH, "m", Compression::Store).unwrap();
        c.add("Z.txt", "z", Compression::Store).unwrap();
        let bytes = c.to_bytes().unwrap();
        let offset = |name: &str| bytes.windows(name.len()).position(|w| w == name.as_bytes());
        assert_eq!(offset(MANIFEST_PATH), Some(30));
        assert!(offset("Z.txt") < offset("a.txt"));
    }

    #[test]
    fn corrupted_payload_names_the_entry() {
        let mut c = Container::new();
        c.add("data.txt", b"abcdefgh".to_vec(), Compression::Store)
            .unwrap();
        let mut bytes = c.to_bytes().unwrap();
        let at = bytes.windows(8).position(|w| w == b"abcdefgh").unwrap();
        bytes[at] ^= 0xFF;
        match Container::open(&bytes) {
            Err(ContainerError::CorruptEntry { path, .. }) => assert_eq!(path, "data.txt"),
            other => panic!("{other:?}"),
        }
    }
}
