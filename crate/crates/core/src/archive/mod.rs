//! High-level COMBINE archive API.
//!
//! An [`Archive`] ties together the container, its parsed manifest and the
//! parsed metadata. The container always holds an up-to-date
//! `manifest.xml`, so [`Archive::to_bytes`] is a plain container write.
//! Mutating operations take `&self` and return a new archive.

mod pack;
mod validate;

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

pub use pack::{pack_directory, PackOptions};
pub use validate::{validate, ValidationMode};

use crate::container::{Compression, Container, ContainerError, MANIFEST_PATH};
use crate::formats::{
    classify_format, infer_extension, ArchiveExtension, FormatKind, METADATA_FORMAT,
};
use crate::manifest::{ContentEntry, Manifest, ManifestError};
use crate::metadata::{MetadataError, MetadataSet, METADATA_FILE};
use crate::path::{normalize_location, parse_location, EntryPath, PathError, ARCHIVE_LOCATION};

#[derive(Debug, thiserror::Error)]
pub enum ArchiveError {
    #[error(transparent)]
    Container(ContainerError),
    #[error("not a ZIP archive: {0}")]
    NotAZip(String),
    #[error("archive has no manifest.xml")]
    MissingManifest,
    #[error("manifest.xml: {0}")]
    ManifestParse(#[source] ManifestError),
    #[error("manifest lists `{0}` but the archive does not contain it")]
    DanglingManifestEntry(String),
    #[error("duplicate location `{0}`")]
    DuplicateLocation(String),
    #[error("invalid location `{location}`: {reason}")]
    InvalidLocation { location: String, reason: PathError },
    #[error("invalid format URI `{0}`")]
    InvalidFormatUri(String),
    #[error("no such entry `{0}`")]
    NoSuchEntry(String),
    #[error("location `{0}` is reserved")]
    ReservedLocation(String),
    #[error("metadata: {0}")]
    Metadata(#[from] MetadataError),
    #[error("cannot pack `{path}`: {reason}")]
    UnsupportedFile { path: PathBuf, reason: String },
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: io::Error,
    },
}

impl From<ContainerError> for ArchiveError {
    fn from(e: ContainerError) -> Self {
        match e {
            ContainerError::NotAZip(reason) => ArchiveError::NotAZip(reason),
            other => ArchiveError::Container(other),
        }
    }
}

impl From<ManifestError> for ArchiveError {
    fn from(e: ManifestError) -> Self {
        match e {
            ManifestError::DuplicateLocation(l) => ArchiveError::DuplicateLocation(l),
            ManifestError::InvalidLocation { location, reason } => {
                ArchiveError::InvalidLocation { location, reason }
            }
            ManifestError::InvalidFormatUri(f) => ArchiveError::InvalidFormatUri(f),
            other => ArchiveError::ManifestParse(other),
        }
    }
}

fn io_error(context: impl Into<String>) -> impl FnOnce(io::Error) -> ArchiveError {
    let context = context.into();
    move |source| ArchiveError::Io { context, source }
}

/// A file to place in an archive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArchiveFile {
    pub location: String,
    pub format: String,
    pub master: bool,
    pub bytes: Vec<u8>,
    pub compression: Compression,
}

impl ArchiveFile {
    pub fn new(
        location: impl Into<String>,
        format: impl Into<String>,
        bytes: impl Into<Vec<u8>>,
    ) -> Self {
        ArchiveFile {
            location: location.into(),
            format: format.into(),
            master: false,
            bytes: bytes.into(),
            compression: Compression::Deflate,
        }
    }

    pub fn master(mut self, master: bool) -> Self {
        self.master = master;
        self
    }

    pub fn compression(mut self, compression: Compression) -> Self {
        self.compression = compression;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Archive {
    container: Container,
    manifest: Manifest,
    metadata: Option<MetadataSet>,
}

impl Archive {
    /// Builds an archive from files. The manifest always gets the archive
    /// entry. When `metadata` is given it is written to the file listed with
    /// the metadata format, or to a new `metadata.rdf`.
    pub fn create(
        files: Vec<ArchiveFile>,
        metadata: Option<MetadataSet>,
    ) -> Result<Self, ArchiveError> {
        let mut archive = Archive {
            container: Container::new(),
            manifest: Manifest::new(),
            metadata: None,
        };
        for file in files {
            archive.insert_file(file)?;
        }
        if let Some(metadata) = metadata {
            archive.write_metadata(&metadata)?;
        }
        archive.sync()?;
        Ok(archive)
    }

    /// Reads an archive, requiring a parseable manifest that only names
    /// stored files. Metadata that cannot be parsed is left unparsed; the
    /// bytes remain in the container.
    pub fn open(bytes: &[u8]) -> Result<Self, ArchiveError> {
        let container = Container::open(bytes)?;
        let manifest_bytes = container
            .get(MANIFEST_PATH)
            .map_err(|_| ArchiveError::MissingManifest)?;
        let manifest = Manifest::parse(manifest_bytes).map_err(ArchiveError::ManifestParse)?;
        for entry in manifest.entries() {
            if let Some(path) = entry.path() {
                if !container.contains(&path) {
                    return Err(ArchiveError::DanglingManifestEntry(
                        entry.location().to_string(),
                    ));
                }
            }
        }
        let mut archive = Archive {
            container,
            manifest,
            metadata: None,
        };
        archive.metadata = archive
            .metadata_path()
            .and_then(|path| MetadataSet::parse(archive.container.get(path.as_str()).ok()?).ok());
        Ok(archive)
    }

    pub fn open_file(path: impl AsRef<Path>) -> Result<Self, ArchiveError> {
        let path = path.as_ref();
        let bytes = fs::read(path).map_err(io_error(format!("reading {}", path.display())))?;
        Self::open(&bytes)
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>, ArchiveError> {
        Ok(self.container.to_bytes()?)
    }

    pub fn container(&self) -> &Container {
        &self.container
    }

    pub fn manifest(&self) -> &Manifest {
        &self.manifest
    }

    pub fn metadata(&self) -> Option<&MetadataSet> {
        self.metadata.as_ref()
    }

    /// Container path of the metadata document, if one is present.
    pub fn metadata_path(&self) -> Option<EntryPath> {
        discover_metadata(&self.container, &self.manifest)
    }

    /// Bytes stored at a manifest location.
    pub fn entry_bytes(&self, location: &str) -> Result<&[u8], ArchiveError> {
        let path = parse_location(location)
            .ok()
            .flatten()
            .ok_or_else(|| ArchiveError::NoSuchEntry(location.to_string()))?;
        self.container
            .get(path.as_str())
            .map_err(|_| ArchiveError::NoSuchEntry(location.to_string()))
    }

    /// Entries flagged as master, in manifest order.
    pub fn master(&self) -> Vec<&ContentEntry> {
        self.manifest.master_entries()
    }

    pub fn suggested_extension(&self) -> ArchiveExtension {
        infer_extension(&self.manifest)
    }

    pub fn add_entry(&self, file: ArchiveFile) -> Result<Self, ArchiveError> {
        let mut next = self.clone();
        next.insert_file(file)?;
        next.sync()?;
        Ok(next)
    }

    /// Removes a listed or stored file. Metadata about it is dropped.
    pub fn remove_entry(&self, location: &str) -> Result<Self, ArchiveError> {
        let path = reserved_check(location)?;
        let mut next = self.clone();
        let listed = next.manifest.remove(location).is_some();
        let stored = next.container.remove(path.as_str()).is_ok();
        if !listed && !stored {
            return Err(ArchiveError::NoSuchEntry(location.to_string()));
        }
        if let Some(mut metadata) = next.metadata.clone() {
            if metadata.remove(location).is_some() && next.metadata_path().is_some() {
                next.write_metadata(&metadata)?;
            }
        }
        next.sync()?;
        Ok(next)
    }

    /// Replaces the metadata document.
    pub fn with_metadata(&self, metadata: &MetadataSet) -> Result<Self, ArchiveError> {
        let mut next = self.clone();
        next.write_metadata(metadata)?;
        next.sync()?;
        Ok(next)
    }

    /// Writes every stored file under `destination`, returning the written
    /// paths in container order. Existing symbolic links inside the
    /// destination are never followed.
    pub fn extract_all(&self, destination: impl AsRef<Path>) -> Result<Vec<PathBuf>, ArchiveError> {
        let destination = destination.as_ref();
        fs::create_dir_all(destination)
            .map_err(io_error(format!("creating {}", destination.display())))?;
        let mut written = Vec::with_capacity(self.container.len());
        for entry in self.container.entries() {
            let mut target = destination.to_path_buf();
            let segments: Vec<&str> = entry.path.segments().collect();
            for (i, segment) in segments.iter().enumerate() {
                target.push(segment);
                let last = i + 1 == segments.len();
                match fs::symlink_metadata(&target) {
                    Ok(meta) if meta.file_type().is_symlink() => {
                        return Err(ArchiveError::Io {
                            context: format!("extracting {}", entry.path),
                            source: io::Error::new(
                                io::ErrorKind::InvalidInput,
                                format!("{} is a symbolic link", target.display()),
                            ),
                        });
                    }
                    Ok(_) => {}
                    Err(e) if e.kind() == io::ErrorKind::NotFound => {
                        if !last {
                            fs::create_dir(&target)
                                .map_err(io_error(format!("creating {}", target.display())))?;
                        }
                    }
                    Err(e) => return Err(io_error(format!("inspecting {}", target.display()))(e)),
                }
            }
            fs::write(&target, &entry.bytes)
                .map_err(io_error(format!("writing {}", target.display())))?;
            written.push(target);
        }
        Ok(written)
    }

    /// Formats must classify as a COMBINE specification or media type, so
    /// that every built archive passes strict validation.
    fn insert_file(&mut self, file: ArchiveFile) -> Result<(), ArchiveError> {
        let path = reserved_check(&file.location)?;
        if classify_format(&file.format).kind == FormatKind::Invalid {
            return Err(ArchiveError::InvalidFormatUri(file.format));
        }
        let entry = ContentEntry::new(&file.location, &file.format)?
            .with_master(file.master.then_some(true));
        if self.container.contains(&path) {
            return Err(ArchiveError::DuplicateLocation(
                entry.location().to_string(),
            ));
        }
        self.manifest.push(entry)?;
        self.container
            .insert_path(path, file.bytes, file.compression);
        Ok(())
    }

    fn write_metadata(&mut self, metadata: &MetadataSet) -> Result<(), ArchiveError> {
        let bytes = metadata.to_xml()?;
        match self.metadata_path() {
            Some(path) => {
                let compression = self
                    .container
                    .entry(path.as_str())
                    .map(|e| e.compression)
                    .unwrap_or_default();
                self.container.insert_path(path, bytes, compression);
            }
            None => {
                let entry = ContentEntry::new(METADATA_FILE, METADATA_FORMAT)?;
                let path = EntryPath::new(METADATA_FILE).expect("constant path is valid");
                if self.container.contains(&path) {
                    return Err(ArchiveError::DuplicateLocation(METADATA_FILE.to_string()));
                }
                self.manifest.push(entry)?;
                self.container
                    .insert_path(path, bytes, Compression::Deflate);
            }
        }
        Ok(())
    }

    /// Re-serializes the manifest into the container and re-reads metadata.
    fn sync(&mut self) -> Result<(), ArchiveError> {
        let manifest_bytes = self.manifest.to_xml()?;
        let path = EntryPath::new(MANIFEST_PATH).expect("constant path is valid");
        let compression = self
            .container
            .entry(MANIFEST_PATH)
            .map(|e| e.compression)
            .unwrap_or_default();
        self.container
            .insert_path(path, manifest_bytes, compression);
        self.metadata = self
            .metadata_path()
            .and_then(|path| MetadataSet::parse(self.container.get(path.as_str()).ok()?).ok());
        Ok(())
    }
}

/// Rejects `.` and `manifest.xml`; returns the container path otherwise.
fn reserved_check(location: &str) -> Result<EntryPath, ArchiveError> {
    let canonical =
        normalize_location(location).map_err(|reason| ArchiveError::InvalidLocation {
            location: location.to_string(),
            reason,
        })?;
    if canonical == ARCHIVE_LOCATION || canonical == MANIFEST_PATH {
        return Err(ArchiveError::ReservedLocation(location.to_string()));
    }
    Ok(parse_location(&canonical)
        .ok()
        .flatten()
        .expect("canonical location names a path"))
}

/// Metadata lookup: first manifest entry with the metadata format that is
/// stored in the container, then a root-level `metadata.rdf`.
pub(crate) fn discover_metadata(container: &Container, manifest: &Manifest) -> Option<EntryPath> {
    manifest
        .entries()
        .iter()
        .filter(|e| e.format() == METADATA_FORMAT)
        .filter_map(ContentEntry::path)
        .find(|p| container.contains(p))
        .or_else(|| {
            let fallback = EntryPath::new(METADATA_FILE).ok()?;
            container.contains(&fallback).then_some(fallback)
        })
}
