use crate::container::{Container, ContainerError, MANIFEST_PATH};
use crate::formats::{classify_format, FormatKind};
use crate::manifest::Manifest;
use crate::metadata::{MetadataSet, METADATA_FILE};
use crate::path::ARCHIVE_LOCATION;
use crate::report::{rules, Severity, ValidationReport};

use super::discover_metadata;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub enum ValidationMode {
    #[default]
    Strict,
    Lenient,
}

impl ValidationMode {
    fn severity(self) -> Severity {
        match self {
            ValidationMode::Strict => Severity::Error,
            ValidationMode::Lenient => Severity::Warning,
        }
    }
}

/// Checks archive bytes and reports every finding. Never fails: even input
/// that is not a ZIP yields a report.
///
/// Strict and Lenient differ only in the severity of unlisted files and
/// unrecognized format URIs.
pub fn validate(bytes: &[u8], mode: ValidationMode) -> ValidationReport {
    let mut report = ValidationReport::new();

    let container = match Container::open(bytes) {
        Ok(container) => container,
        Err(e) => {
            let (rule, location) = match &e {
                ContainerError::NotAZip(_) => (rules::NOT_A_ZIP, String::new()),
                ContainerError::CorruptEntry { path, .. } => (rules::CORRUPT_ENTRY, path.clone()),
                ContainerError::UnsafePath { path, .. } => (rules::UNSAFE_PATH, path.clone()),
                ContainerError::Unsupported { path, .. } => {
                    (rules::UNSUPPORTED_ENTRY, path.clone())
                }
                ContainerError::DuplicateEntry(path) => (rules::DUPLICATE_ENTRY, path.clone()),
                ContainerError::NoSuchEntry(path) | ContainerError::InvalidContainer(path) => {
                    (rules::CORRUPT_ENTRY, path.clone())
                }
            };
            report.error(rule, location, e.to_string());
            return report;
        }
    };

    let Ok(manifest_bytes) = container.get(MANIFEST_PATH) else {
        report.error(
            rules::MISSING_MANIFEST,
            MANIFEST_PATH,
            "archive has no manifest.xml",
        );
        return report;
    };
    let manifest = match Manifest::parse_recovering(manifest_bytes) {
        Ok((manifest, issues)) => {
            for issue in issues {
                report.error(issue.rule(), issue.location(), issue.to_string());
            }
            manifest
        }
        Err(e) => {
            report.error(e.rule(), e.location(), e.to_string());
            return report;
        }
    };

    let mut listing = manifest.validate_against(container.paths());
    listing.set_severity(rules::UNLISTED_FILE, mode.severity());
    report.merge(listing);

    for entry in manifest.entries() {
        let class = classify_format(entry.format());
        if class.kind == FormatKind::Invalid {
            report.add(
                mode.severity(),
                rules::INVALID_FORMAT,
                entry.location(),
                format!(
                    "`{}` is neither a COMBINE specification nor a media type URI",
                    entry.format()
                ),
            );
        }
    }

    match discover_metadata(&container, &manifest) {
        None => report.warning(
            rules::MISSING_METADATA,
            ARCHIVE_LOCATION,
            format!("archive has no {METADATA_FILE}"),
        ),
        Some(path) => match container.get(path.as_str()).map(MetadataSet::parse) {
            Ok(Ok(metadata)) => report.merge(metadata.check_minimum_information()),
            Ok(Err(e)) => {
                report.warning(rules::METADATA_MALFORMED, path.to_location(), e.to_string())
            }
            Err(e) => report.warning(rules::METADATA_MALFORMED, path.to_location(), e.to_string()),
        },
    }

    report
}
