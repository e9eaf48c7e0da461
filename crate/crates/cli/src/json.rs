//! Machine-readable output. Every document carries `schemaVersion`; fields
//! are only ever added under the same version.

use serde::Serialize;

use omex_core::{
    classify_format, Archive, Creator, DescriptionBlock, FormatKind, MetadataSet, Object,
    ValidationReport,
};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Listing {
    pub schema_version: u32,
    pub entries: Vec<ListedEntry>,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ListedEntry {
    pub location: String,
    pub format: String,
    pub format_class: FormatKind,
    pub format_key: String,
    /// Stored size in bytes; absent for the archive entry.
    pub size: Option<u64>,
    pub master: bool,
}

impl Listing {
    pub fn of(archive: &Archive) -> Self {
        let entries = archive
            .manifest()
            .entries()
            .iter()
            .map(|entry| {
                let class = classify_format(entry.format());
                ListedEntry {
                    location: entry.location().to_string(),
                    format: entry.format().to_string(),
                    format_class: class.kind,
                    format_key: class.key,
                    size: (!entry.is_archive())
                        .then(|| archive.entry_bytes(entry.location()).ok())
                        .flatten()
                        .map(|b| b.len() as u64),
                    master: entry.is_master(),
                }
            })
            .collect();
        Listing {
            schema_version: SCHEMA_VERSION,
            entries,
        }
    }
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Validation<'a> {
    pub schema_version: u32,
    pub mode: &'static str,
    pub valid: bool,
    pub errors: usize,
    pub warnings: usize,
    pub items: &'a [omex_core::Issue],
}

impl<'a> Validation<'a> {
    pub fn of(report: &'a ValidationReport, mode: &'static str) -> Self {
        Validation {
            schema_version: SCHEMA_VERSION,
            mode,
            valid: !report.has_errors(),
            errors: report.errors().count(),
            warnings: report.warnings().count(),
            items: report.items(),
        }
    }
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CreatorJson {
    pub family_name: Option<String>,
    pub given_name: Option<String>,
    pub email: Option<String>,
    pub organization: Option<String>,
    pub url: Option<String>,
}

impl From<&Creator> for CreatorJson {
    fn from(c: &Creator) -> Self {
        CreatorJson {
            family_name: c.family_name.clone(),
            given_name: c.given_name.clone(),
            email: c.email.clone(),
            organization: c.organization.clone(),
            url: c.url.clone(),
        }
    }
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ReferenceJson {
    pub predicate: String,
    pub resource: Option<String>,
    pub literal: Option<String>,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
pub struct BlockJson {
    pub about: String,
    pub description: Option<String>,
    pub creators: Vec<CreatorJson>,
    pub created: Option<String>,
    pub modified: Vec<String>,
    pub references: Vec<ReferenceJson>,
}

impl From<&DescriptionBlock> for BlockJson {
    fn from(b: &DescriptionBlock) -> Self {
        BlockJson {
            about: b.about().to_string(),
            description: b.description.clone(),
            creators: b.creators.iter().map(CreatorJson::from).collect(),
            created: b.created.map(|t| t.to_string()),
            modified: b.modified.iter().map(ToString::to_string).collect(),
            references: b
                .references
                .iter()
                .map(|r| match &r.object {
                    Object::Resource(uri) => ReferenceJson {
                        predicate: r.predicate.clone(),
                        resource: Some(uri.clone()),
                        literal: None,
                    },
                    Object::Literal(text) => ReferenceJson {
                        predicate: r.predicate.clone(),
                        resource: None,
                        literal: Some(text.clone()),
                    },
                })
                .collect(),
        }
    }
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
pub struct MetadataJson {
    pub schema_version: u32,
    /// Container path of the metadata file; absent when there is none.
    pub path: Option<String>,
    /// False when a metadata file exists but cannot be parsed.
    pub parsed: bool,
    pub blocks: Vec<BlockJson>,
}

impl MetadataJson {
    pub fn of(archive: &Archive) -> Self {
        let path = archive.metadata_path().map(|p| p.to_string());
        MetadataJson {
            schema_version: SCHEMA_VERSION,
            parsed: archive.metadata().is_some(),
            path,
            blocks: archive
                .metadata()
                .map(MetadataSet::blocks)
                .into_iter()
                .flatten()
                .map(BlockJson::from)
                .collect(),
        }
    }
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Info {
    pub schema_version: u32,
    pub entries: usize,
    pub masters: Vec<String>,
    pub suggested_extension: &'static str,
    pub metadata_path: Option<String>,
    /// The block describing the archive itself.
    pub archive: Option<BlockJson>,
}

impl Info {
    pub fn of(archive: &Archive) -> Self {
        Info {
            schema_version: SCHEMA_VERSION,
            entries: archive.manifest().entries().len(),
            masters: archive
                .master()
                .iter()
                .map(|e| e.location().to_string())
                .collect(),
            suggested_extension: archive.suggested_extension().as_str(),
            metadata_path: archive.metadata_path().map(|p| p.to_string()),
            archive: archive
                .metadata()
                .and_then(MetadataSet::archive_block)
                .map(BlockJson::from),
        }
    }
}
