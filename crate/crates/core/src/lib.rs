//! Reading, writing, validating and extracting COMBINE archives (OMEX).
//!
//! An OMEX file is a ZIP container holding a mandatory `manifest.xml` that
//! lists every file with its format URI, plus an optional `metadata.rdf`
//! with Dublin Core and vCard descriptions.
//!
//! ```no_run
//! use omex_core::{Archive, ArchiveFile, ValidationMode};
//!
//! # fn main() -> Result<(), Box<dyn std::error::Error>> {
//! let archive = Archive::create(
//!     vec![ArchiveFile::new(
//!         "model.xml",
//!         "http://identifiers.org/combine.specifications/sbml",
//!         std::fs::read("model.xml")?,
//!     )
//!     .master(true)],
//!     None,
//! )?;
//! let bytes = archive.to_bytes()?;
//! let report = omex_core::validate(&bytes, ValidationMode::Strict);
//! assert!(!report.has_errors());
//! std::fs::write(format!("model.{}", archive.suggested_extension()), bytes)?;
//! # Ok(())
//! # }
//! ```

pub mod archive;
pub mod container;
pub mod formats;
pub mod manifest;
pub mod metadata;
pub mod path;
pub mod report;
mod xml;

pub use archive::{
    pack_directory, validate, Archive, ArchiveError, ArchiveFile, PackOptions, ValidationMode,
};
pub use container::{Compression, Container, ContainerEntry, ContainerError, MANIFEST_PATH};
pub use formats::{
    classify_format, format_for_file, format_for_filename, infer_extension, ArchiveExtension,
    FormatClass, FormatKind,
};
pub use manifest::{ContentEntry, Manifest, ManifestError};
pub use metadata::{
    Creator, DescriptionBlock, MetadataError, MetadataSet, Object, Reference, W3cDateTime,
};
pub use path::{EntryPath, PathError};
pub use report::{Issue, Severity, ValidationReport};
