use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use walkdir::WalkDir;

use super::{io_error, Archive, ArchiveError, ArchiveFile};
use crate::container::MANIFEST_PATH;
use crate::formats::{format_for_file, METADATA_FORMAT};
use crate::manifest::Manifest;
use crate::metadata::{Creator, MetadataSet, W3cDateTime};
use crate::path::{normalize_location, EntryPath};

/// Options for [`pack_directory`].
#[derive(Debug, Clone, Default)]
pub struct PackOptions {
    /// Explicit format URIs by location.
    pub formats: BTreeMap<String, String>,
    /// Locations to flag as master. When empty, flags from an existing
    /// `manifest.xml` in the directory are kept.
    pub masters: Vec<String>,
    /// Record creation time and creator in the archive metadata.
    pub stamp: Option<(W3cDateTime, Option<Creator>)>,
}

/// Packs a directory tree into an archive.
///
/// Files are added in sorted path order. A root-level `manifest.xml` is not
/// packed as a file; it only supplies default formats and master flags.
/// Otherwise formats are guessed from file names and XML root elements.
/// Symbolic links are rejected.
pub fn pack_directory(
    dir: impl AsRef<Path>,
    options: &PackOptions,
) -> Result<Archive, ArchiveError> {
    let dir = dir.as_ref();
    let mut existing: Option<Manifest> = None;
    let mut found: Vec<(EntryPath, Vec<u8>)> = Vec::new();

    for item in WalkDir::new(dir).min_depth(1).sort_by_file_name() {
        let item = item.map_err(|e| ArchiveError::Io {
            context: format!("walking {}", dir.display()),
            source: e.into(),
        })?;
        let file_type = item.file_type();
        if file_type.is_dir() {
            continue;
        }
        let unsupported = |reason: &str| ArchiveError::UnsupportedFile {
            path: item.path().to_path_buf(),
            reason: reason.to_string(),
        };
        if !file_type.is_file() {
            return Err(unsupported("not a regular file"));
        }
        let relative = item
            .path()
            .strip_prefix(dir)
            .expect("walkdir yields paths under its root");
        let mut segments = Vec::new();
        for component in relative.components() {
            segments.push(
                component
                    .as_os_str()
                    .to_str()
                    .ok_or_else(|| unsupported("file name is not valid UTF-8"))?,
            );
        }
        let path = EntryPath::new(&segments.join("/")).map_err(|e| unsupported(&e.to_string()))?;
        let bytes = fs::read(item.path())
            .map_err(io_error(format!("reading {}", item.path().display())))?;
        if path.as_str() == MANIFEST_PATH {
            existing = Some(Manifest::parse(&bytes).map_err(ArchiveError::ManifestParse)?);
        } else {
            found.push((path, bytes));
        }
    }

    let locations: BTreeSet<String> = found.iter().map(|(p, _)| p.to_location()).collect();
    let canonical = |raw: &str| -> Result<String, ArchiveError> {
        let location = normalize_location(raw).map_err(|reason| ArchiveError::InvalidLocation {
            location: raw.to_string(),
            reason,
        })?;
        if locations.contains(&location) {
            Ok(location)
        } else {
            Err(ArchiveError::NoSuchEntry(raw.to_string()))
        }
    };
    let mut formats = BTreeMap::new();
    for (raw, format) in &options.formats {
        formats.insert(canonical(raw)?, format.clone());
    }
    let masters = options
        .masters
        .iter()
        .map(|raw| canonical(raw))
        .collect::<Result<BTreeSet<_>, _>>()?;

    let mut files = Vec::with_capacity(found.len());
    for (path, bytes) in found {
        let location = path.to_location();
        let previous = existing.as_ref().and_then(|m| m.get(&location));
        let format = formats
            .get(&location)
            .cloned()
            .or_else(|| previous.map(|e| e.format().to_string()))
            .unwrap_or_else(|| format_for_file(path.as_str(), &bytes));
        let master = if options.masters.is_empty() {
            previous.is_some_and(|e| e.is_master())
        } else {
            masters.contains(&location)
        };
        files.push(ArchiveFile::new(location, format, bytes).master(master));
    }

    let metadata = match &options.stamp {
        None => None,
        Some((when, creator)) => {
            let current = files.iter().find(|f| f.format == METADATA_FORMAT);
            match current.map(|f| MetadataSet::parse(&f.bytes)) {
                // Unparseable metadata is packed untouched.
                Some(Err(_)) => None,
                Some(Ok(set)) => {
                    let mut stamped = set.clone();
                    stamped.stamp(*when, creator.clone());
                    // Unchanged metadata keeps its original bytes.
                    (stamped != set).then_some(stamped)
                }
                None => {
                    let mut set = MetadataSet::new();
                    set.stamp(*when, creator.clone());
                    Some(set)
                }
            }
        }
    };

    Archive::create(files, metadata)
}
