//! The mandatory `manifest.xml`.
//!
//! ```xml
//! <?xml version="1.0" encoding="utf-8"?>
//! <omexManifest xmlns="http://identifiers.org/combine.specifications/omex-manifest">
//!   <content location="." format="http://identifiers.org/combine.specifications/omex"/>
//!   <content location="simulation.xml" master="true"
//!     format="http://identifiers.org/combine.specifications/sed-ml"/>
//! </omexManifest>
//! ```
//!
//! Locations are stored in canonical form (see [`crate::path`]). Unknown
//! attributes and unknown child elements are ignored on parse and are not
//! written back.

use std::collections::HashSet;

use crate::container::MANIFEST_PATH;
use crate::formats::{is_absolute_uri, OMEX_FORMAT};
use crate::path::{normalize_location, parse_location, EntryPath, PathError, ARCHIVE_LOCATION};
use crate::report::{rules, ValidationReport};
use crate::xml::{self, Element};

pub const MANIFEST_NS: &str = "http://identifiers.org/combine.specifications/omex-manifest";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ManifestError {
    #[error("malformed XML: {0}")]
    MalformedXml(String),
    #[error("root element is `{0}`, expected `omexManifest`")]
    WrongRootElement(String),
    #[error("root element namespace is `{0}`, expected `{MANIFEST_NS}`")]
    WrongNamespace(String),
    #[error("content entry #{index} has no `{attribute}` attribute")]
    MissingAttribute {
        index: usize,
        attribute: &'static str,
    },
    #[error("content entry #{index} has invalid `master` value `{value}`")]
    InvalidMaster { index: usize, value: String },
    #[error("invalid location `{location}`: {reason}")]
    InvalidLocation { location: String, reason: PathError },
    #[error("invalid format URI `{0}`")]
    InvalidFormatUri(String),
    #[error("duplicate location `{0}`")]
    DuplicateLocation(String),
    #[error("manifest has no entry for the archive itself (`.`)")]
    MissingArchiveEntry,
    #[error("invalid manifest: {0}")]
    InvalidManifest(String),
}

impl ManifestError {
    /// Report rule identifier for this error.
    pub fn rule(&self) -> &'static str {
        match self {
            ManifestError::MalformedXml(_) => rules::MANIFEST_MALFORMED,
            ManifestError::WrongRootElement(_) => rules::MANIFEST_ROOT,
            ManifestError::WrongNamespace(_) => rules::MANIFEST_NAMESPACE,
            ManifestError::MissingAttribute { .. } => rules::MISSING_ATTRIBUTE,
            ManifestError::InvalidMaster { .. } => rules::INVALID_ATTRIBUTE,
            ManifestError::InvalidLocation { .. } => rules::INVALID_LOCATION,
            ManifestError::InvalidFormatUri(_) => rules::INVALID_FORMAT,
            ManifestError::DuplicateLocation(_) => rules::DUPLICATE_LOCATION,
            ManifestError::MissingArchiveEntry => rules::MISSING_ARCHIVE_ENTRY,
            ManifestError::InvalidManifest(_) => rules::MANIFEST_MALFORMED,
        }
    }

    /// The location this error concerns, when it names one.
    pub fn location(&self) -> &str {
        match self {
            ManifestError::InvalidLocation { location, .. }
            | ManifestError::DuplicateLocation(location) => location,
            ManifestError::MissingArchiveEntry => ARCHIVE_LOCATION,
            _ => MANIFEST_PATH,
        }
    }
}

/// One `<content>` element.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ContentEntry {
    location: String,
    format: String,
    master: Option<bool>,
}

impl ContentEntry {
    /// Builds an entry, canonicalizing the location and checking that the
    /// format is an absolute URI.
    pub fn new(location: &str, format: &str) -> Result<Self, ManifestError> {
        if !is_absolute_uri(format) {
            return Err(ManifestError::InvalidFormatUri(format.to_string()));
        }
        Ok(ContentEntry {
            location: canonical_location(location)?,
            format: format.to_string(),
            master: None,
        })
    }

    /// The entry describing the archive itself.
    pub fn archive() -> Self {
        ContentEntry {
            location: ARCHIVE_LOCATION.to_string(),
            format: OMEX_FORMAT.to_string(),
            master: None,
        }
    }

    pub fn with_master(mut self, master: Option<bool>) -> Self {
        self.master = master;
        self
    }

    pub fn location(&self) -> &str {
        &self.location
    }

    pub fn format(&self) -> &str {
        &self.format
    }

    pub fn master(&self) -> Option<bool> {
        self.master
    }

    pub fn is_master(&self) -> bool {
        self.master == Some(true)
    }

    pub fn is_archive(&self) -> bool {
        self.location == ARCHIVE_LOCATION
    }

    /// Container path named by this entry; `None` for the archive entry.
    pub fn path(&self) -> Option<EntryPath> {
        parse_location(&self.location).ok().flatten()
    }
}

fn canonical_location(raw: &str) -> Result<String, ManifestError> {
    normalize_location(raw).map_err(|reason| ManifestError::InvalidLocation {
        location: raw.to_string(),
        reason,
    })
}

/// Parsed `manifest.xml`: entries in document order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Manifest {
    entries: Vec<ContentEntry>,
}

impl Default for Manifest {
    fn default() -> Self {
        Self::new()
    }
}

impl Manifest {
    /// A manifest holding only the archive entry.
    pub fn new() -> Self {
        Manifest {
            entries: vec![ContentEntry::archive()],
        }
    }

    pub fn from_entries(entries: Vec<ContentEntry>) -> Result<Self, ManifestError> {
        let manifest = Manifest { entries };
        manifest.check()?;
        Ok(manifest)
    }

    fn check(&self) -> Result<(), ManifestError> {
        let mut seen = HashSet::new();
        for entry in &self.entries {
            if !seen.insert(entry.location.as_str()) {
                return Err(ManifestError::DuplicateLocation(entry.location.clone()));
            }
        }
        if !seen.contains(ARCHIVE_LOCATION) {
            return Err(ManifestError::MissingArchiveEntry);
        }
        Ok(())
    }

    pub fn entries(&self) -> &[ContentEntry] {
        &self.entries
    }

    pub fn get(&self, location: &str) -> Option<&ContentEntry> {
        let location = normalize_location(location).ok()?;
        self.entries.iter().find(|e| e.location == location)
    }

    pub fn push(&mut self, entry: ContentEntry) -> Result<(), ManifestError> {
        if self.entries.iter().any(|e| e.location == entry.location) {
            return Err(ManifestError::DuplicateLocation(entry.location));
        }
        self.entries.push(entry);
        Ok(())
    }

    /// Removes the entry at `location`. The archive entry cannot be removed.
    pub fn remove(&mut self, location: &str) -> Option<ContentEntry> {
        let location = normalize_location(location).ok()?;
        if location == ARCHIVE_LOCATION {
            return None;
        }
        let index = self.entries.iter().position(|e| e.location == location)?;
        Some(self.entries.remove(index))
    }

    /// Entries flagged `master="true"`, in document order.
    pub fn master_entries(&self) -> Vec<&ContentEntry> {
        self.entries.iter().filter(|e| e.is_master()).collect()
    }

    pub fn parse(xml: &[u8]) -> Result<Self, ManifestError> {
        let (manifest, mut issues) = Self::parse_recovering(xml)?;
        if issues.is_empty() {
            Ok(manifest)
        } else {
            Err(issues.swap_remove(0))
        }
    }

    /// Parses as much as possible. Document-level problems (malformed XML,
    /// wrong root) are fatal; problems with individual `<content>` elements
    /// skip that element and are returned alongside the result.
    pub fn parse_recovering(xml: &[u8]) -> Result<(Self, Vec<ManifestError>), ManifestError> {
        let root = xml::parse_document(xml).map_err(|e| ManifestError::MalformedXml(e.0))?;
        if root.local != "omexManifest" {
            return Err(ManifestError::WrongRootElement(root.local));
        }
        if root.ns.as_deref() != Some(MANIFEST_NS) {
            return Err(ManifestError::WrongNamespace(root.ns.unwrap_or_default()));
        }

        let mut entries: Vec<ContentEntry> = Vec::new();
        let mut issues = Vec::new();
        let contents = root.elements().filter(|e| e.is(MANIFEST_NS, "content"));
        for (index, element) in contents.enumerate() {
            match parse_content(index, element) {
                Ok(entry) => {
                    if entries.iter().any(|e| e.location == entry.location) {
                        issues.push(ManifestError::DuplicateLocation(entry.location));
                    } else {
                        entries.push(entry);
                    }
                }
                Err(issue) => issues.push(issue),
            }
        }
        if !entries.iter().any(ContentEntry::is_archive) {
            issues.push(ManifestError::MissingArchiveEntry);
        }
        Ok((Manifest { entries }, issues))
    }

    pub fn to_xml(&self) -> Result<Vec<u8>, ManifestError> {
        self.check()
            .map_err(|e| ManifestError::InvalidManifest(e.to_string()))?;
        let mut out = String::from("<?xml version=\"1.0\" encoding=\"utf-8\"?>\n");
        out.push_str(&format!("<omexManifest xmlns=\"{MANIFEST_NS}\">\n"));
        for entry in &self.entries {
            if !is_absolute_uri(&entry.format) {
                return Err(ManifestError::InvalidManifest(format!(
                    "entry `{}` has invalid format URI `{}`",
                    entry.location, entry.format
                )));
            }
            out.push_str(&format!(
                "  <content location=\"{}\"",
                xml::escape(&entry.location)
            ));
            if let Some(master) = entry.master {
                out.push_str(&format!(" master=\"{master}\""));
            }
            out.push_str(&format!(" format=\"{}\"/>\n", xml::escape(&entry.format)));
        }
        out.push_str("</omexManifest>\n");
        Ok(out.into_bytes())
    }

    /// Checks the manifest against the set of files present in a container.
    ///
    /// Errors for listed locations that are missing; warnings for stored
    /// files the manifest does not list (other than `manifest.xml`) and for
    /// more than one master entry.
    pub fn validate_against<I, P>(&self, paths: I) -> ValidationReport
    where
        I: IntoIterator<Item = P>,
        P: AsRef<str>,
    {
        let present: HashSet<String> = paths.into_iter().map(|p| p.as_ref().to_string()).collect();
        let mut report = ValidationReport::new();

        let mut listed = HashSet::new();
        for entry in &self.entries {
            let Some(path) = entry.path() else { continue };
            if !present.contains(path.as_str()) {
                report.error(
                    rules::DANGLING_ENTRY,
                    entry.location(),
                    format!(
                        "`{}` is listed in the manifest but not stored in the archive",
                        entry.location()
                    ),
                );
            }
            listed.insert(path.as_str().to_string());
        }

        for path in &present {
            if path == MANIFEST_PATH || listed.contains(path) {
                continue;
            }
            let location = EntryPath::new(path)
                .map(|p| p.to_location())
                .unwrap_or_else(|_| path.clone());
            report.warning(
                rules::UNLISTED_FILE,
                location,
                format!("`{path}` is stored in the archive but not listed in the manifest"),
            );
        }

        let masters = self.master_entries();
        if masters.len() > 1 {
            let names: Vec<&str> = masters.iter().map(|e| e.location()).collect();
            report.warning(
                rules::MULTIPLE_MASTERS,
                MANIFEST_PATH,
                format!(
                    "{} entries are flagged master: {}",
                    masters.len(),
                    names.join(", ")
                ),
            );
        }
        report
    }
}

fn parse_content(index: usize, element: &Element) -> Result<ContentEntry, ManifestError> {
    let location = element
        .attr(None, "location")
        .ok_or(ManifestError::MissingAttribute {
            index,
            attribute: "location",
        })?;
    let format = element
        .attr(None, "format")
        .ok_or(ManifestError::MissingAttribute {
            index,
            attribute: "format",
        })?;
    let master = match element.attr(None, "master") {
        None => None,
        Some(raw) => Some(match raw.trim() {
            "true" | "1" => true,
            "false" | "0" => false,
            _ => {
                return Err(ManifestError::InvalidMaster {
                    index,
                    value: raw.to_string(),
                })
            }
        }),
    };
    Ok(ContentEntry {
        location: canonical_location(location)?,
        // Format validity is reported by validation, not enforced here.
        format: format.to_string(),
        master,
    })
}
