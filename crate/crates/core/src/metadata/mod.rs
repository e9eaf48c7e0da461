//! The recommended `metadata.rdf`.
//!
//! Supports the RDF/XML shapes used for archive metadata: `rdf:Description`
//! blocks keyed by `rdf:about`, Dublin Core `description`, `creator`,
//! `created` and `modified`, vCard creator details, and arbitrary
//! `rdf:resource` references (for example `bqmodel:is`). Other predicates
//! survive a parse/serialize cycle as opaque [`Reference`]s.

mod rdf;
mod timestamp;

use std::collections::BTreeMap;

pub use timestamp::{Precision, TimestampError, W3cDateTime};

use crate::path::{normalize_location, ARCHIVE_LOCATION};
use crate::report::{rules, ValidationReport};

pub const RDF_NS: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
pub const DCTERMS_NS: &str = "http://purl.org/dc/terms/";
pub const VCARD_NS: &str = "http://www.w3.org/2006/vcard/ns#";
pub const BQMODEL_NS: &str = "http://biomodels.net/model-qualifiers/";
pub const BQBIOL_NS: &str = "http://biomodels.net/biology-qualifiers/";

/// Conventional file name of the metadata document.
pub const METADATA_FILE: &str = "metadata.rdf";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MetadataError {
    #[error("malformed XML: {0}")]
    MalformedXml(String),
    #[error("root element is not rdf:RDF")]
    NotRdf,
    #[error("bad timestamp: {0}")]
    BadTimestamp(#[from] TimestampError),
    #[error("invalid rdf:about `{0}`")]
    InvalidAbout(String),
    #[error("unsupported RDF construct: {0}")]
    Unsupported(String),
    #[error("invalid metadata: {0}")]
    InvalidMetadata(String),
}

/// A vCard person or organization.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Creator {
    pub family_name: Option<String>,
    pub given_name: Option<String>,
    /// Bare address; written as a `mailto:` resource.
    pub email: Option<String>,
    pub organization: Option<String>,
    pub url: Option<String>,
}

impl Creator {
    pub fn is_empty(&self) -> bool {
        self.family_name.is_none()
            && self.given_name.is_none()
            && self.email.is_none()
            && self.organization.is_none()
            && self.url.is_none()
    }

    /// Display name built from the given and family names.
    pub fn display_name(&self) -> Option<String> {
        let parts: Vec<&str> = [self.given_name.as_deref(), self.family_name.as_deref()]
            .into_iter()
            .flatten()
            .collect();
        (!parts.is_empty()).then(|| parts.join(" "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Object {
    Resource(String),
    Literal(String),
}

impl Object {
    pub fn value(&self) -> &str {
        match self {
            Object::Resource(v) | Object::Literal(v) => v,
        }
    }

    pub fn is_literal(&self) -> bool {
        matches!(self, Object::Literal(_))
    }
}

/// A property the model carries without interpreting it.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Reference {
    pub predicate: String,
    pub object: Object,
}

impl Reference {
    pub fn resource(predicate: impl Into<String>, uri: impl Into<String>) -> Self {
        Reference {
            predicate: predicate.into(),
            object: Object::Resource(uri.into()),
        }
    }

    pub fn literal(predicate: impl Into<String>, value: impl Into<String>) -> Self {
        Reference {
            predicate: predicate.into(),
            object: Object::Literal(value.into()),
        }
    }
}

/// Everything said about one subject.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DescriptionBlock {
    about: String,
    pub description: Option<String>,
    pub creators: Vec<Creator>,
    pub created: Option<W3cDateTime>,
    pub modified: Vec<W3cDateTime>,
    pub references: Vec<Reference>,
}

impl DescriptionBlock {
    /// A block about `about`, which is canonicalized like a manifest
    /// location. Absolute URIs are kept verbatim.
    pub fn new(about: &str) -> Result<Self, MetadataError> {
        Ok(Self::empty(canonical_about(about)?))
    }

    pub fn for_archive() -> Self {
        Self::empty(ARCHIVE_LOCATION.to_string())
    }

    fn empty(about: String) -> Self {
        DescriptionBlock {
            about,
            description: None,
            creators: Vec::new(),
            created: None,
            modified: Vec::new(),
            references: Vec::new(),
        }
    }

    pub fn about(&self) -> &str {
        &self.about
    }

    pub fn is_empty(&self) -> bool {
        self.description.is_none()
            && self.creators.is_empty()
            && self.created.is_none()
            && self.modified.is_empty()
            && self.references.is_empty()
    }

    /// Most recent `modified` timestamp.
    pub fn last_modified(&self) -> Option<&W3cDateTime> {
        self.modified.iter().max_by_key(|t| t.instant())
    }

    /// Folds another block about the same subject into this one.
    fn absorb(&mut self, other: DescriptionBlock) {
        match (&self.description, other.description) {
            (None, d) => self.description = d,
            (Some(_), Some(d)) => self
                .references
                .push(Reference::literal(format!("{DCTERMS_NS}description"), d)),
            (Some(_), None) => {}
        }
        match (&self.created, other.created) {
            (None, c) => self.created = c,
            (Some(_), Some(c)) => self.references.push(Reference::literal(
                format!("{DCTERMS_NS}created"),
                c.to_string(),
            )),
            (Some(_), None) => {}
        }
        self.creators.extend(other.creators);
        self.modified.extend(other.modified);
        self.references.extend(other.references);
    }
}

fn canonical_about(raw: &str) -> Result<String, MetadataError> {
    match normalize_location(raw) {
        Ok(location) => Ok(location),
        Err(_) if crate::formats::is_absolute_uri(raw) => Ok(raw.to_string()),
        Err(_) => Err(MetadataError::InvalidAbout(raw.to_string())),
    }
}

/// All description blocks of a metadata document, one per subject.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MetadataSet {
    blocks: BTreeMap<String, DescriptionBlock>,
}

impl MetadataSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn parse(xml: &[u8]) -> Result<Self, MetadataError> {
        rdf::parse(xml)
    }

    pub fn to_xml(&self) -> Result<Vec<u8>, MetadataError> {
        rdf::serialize(self)
    }

    /// Blocks with the archive block first, then by subject.
    pub fn blocks(&self) -> impl Iterator<Item = &DescriptionBlock> {
        let archive = self.blocks.get(ARCHIVE_LOCATION);
        archive.into_iter().chain(
            self.blocks
                .iter()
                .filter(|(about, _)| about.as_str() != ARCHIVE_LOCATION)
                .map(|(_, block)| block),
        )
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn block(&self, about: &str) -> Option<&DescriptionBlock> {
        let key = canonical_about(about).ok()?;
        self.blocks.get(&key)
    }

    pub fn archive_block(&self) -> Option<&DescriptionBlock> {
        self.blocks.get(ARCHIVE_LOCATION)
    }

    /// The archive block, created empty if absent.
    pub fn archive_block_mut(&mut self) -> &mut DescriptionBlock {
        self.blocks
            .entry(ARCHIVE_LOCATION.to_string())
            .or_insert_with(DescriptionBlock::for_archive)
    }

    /// Inserts a block, merging it into an existing block with the same
    /// subject.
    pub fn insert(&mut self, block: DescriptionBlock) {
        match self.blocks.get_mut(&block.about) {
            Some(existing) => existing.absorb(block),
            None => {
                self.blocks.insert(block.about.clone(), block);
            }
        }
    }

    pub fn remove(&mut self, about: &str) -> Option<DescriptionBlock> {
        let key = canonical_about(about).ok()?;
        self.blocks.remove(&key)
    }

    /// Records archive creation: sets `created` and adds `creator` when the
    /// archive block has none yet. Existing values are left alone.
    pub fn stamp(&mut self, when: W3cDateTime, creator: Option<Creator>) {
        let block = self.archive_block_mut();
        if block.created.is_none() {
            block.created = Some(when);
        }
        if block.creators.is_empty() {
            if let Some(creator) = creator.filter(|c| !c.is_empty()) {
                block.creators.push(creator);
            }
        }
    }

    /// Appends a `modified` timestamp to the archive block.
    pub fn touch(&mut self, when: W3cDateTime) {
        self.archive_block_mut().modified.push(when);
    }

    /// Warnings for each missing piece of the minimum archive-level
    /// information: creation date, last-update date, and creator.
    pub fn check_minimum_information(&self) -> ValidationReport {
        let mut report = ValidationReport::new();
        let Some(block) = self.archive_block() else {
            report.warning(
                rules::METADATA_NO_ARCHIVE_BLOCK,
                ARCHIVE_LOCATION,
                "metadata has no description of the archive itself",
            );
            return report;
        };
        if block.created.is_none() {
            report.warning(
                rules::METADATA_MISSING_CREATED,
                ARCHIVE_LOCATION,
                "archive creation date is missing",
            );
        }
        if block.modified.is_empty() {
            report.warning(
                rules::METADATA_MISSING_MODIFIED,
                ARCHIVE_LOCATION,
                "archive last-update date is missing",
            );
        }
        if block.creators.is_empty() {
            report.warning(
                rules::METADATA_MISSING_CREATOR,
                ARCHIVE_LOCATION,
                "archive creator is missing",
            );
        }
        report
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn when(raw: &str) -> W3cDateTime {
        W3cDateTime::parse(raw).unwrap()
    }

    #[test]
    fn minimum_information_outcomes() {
        let report = MetadataSet::new().check_minimum_information();
        assert_eq!(report.len(), 1);
        assert_eq!(report.items()[0].rule, rules::METADATA_NO_ARCHIVE_BLOCK);

        let mut set = MetadataSet::new();
        set.archive_block_mut();
        let rules_hit: Vec<_> = set
            .check_minimum_information()
            .items()
            .iter()
            .map(|i| i.rule.clone())
            .collect();
        assert_eq!(
            rules_hit,
            [
                rules::METADATA_MISSING_CREATED,
                rules::METADATA_MISSING_CREATOR,
                rules::METADATA_MISSING_MODIFIED
            ]
        );

        set.stamp(
            when("2020-01-01T00:00:00Z"),
            Some(Creator {
                given_name: Some("Ada".into()),
                ..Creator::default()
            }),
        );
        set.touch(when("2020-02-01"));
        assert!(set.check_minimum_information().is_empty());
    }

    #[test]
    fn stamp_keeps_existing_values() {
        let mut set = MetadataSet::new();
        set.stamp(when("2020-01-01"), None);
        set.stamp(
            when("2021-01-01"),
            Some(Creator {
                email: Some("a@b".into()),
                ..Creator::default()
            }),
        );
        let block = set.archive_block().unwrap();
        assert_eq!(block.created, Some(when("2020-01-01")));
        assert_eq!(block.creators.len(), 1);
        set.stamp(when("2022-01-01"), Some(Creator::default()));
        assert_eq!(set.archive_block().unwrap().creators.len(), 1);
    }

    #[test]
    fn insert_merges_same_subject() {
        let mut set = MetadataSet::new();
        let mut a = DescriptionBlock::new("./model.xml").unwrap();
        a.description = Some("first".into());
        a.modified.push(when("2020-01-01"));
        let mut b = DescriptionBlock::new("model.xml").unwrap();
        b.description = Some("second".into());
        b.modified.push(when("2021-01-01"));
        set.insert(a);
        set.insert(b);
        assert_eq!(set.len(), 1);
        let block = set.block("model.xml").unwrap();
        assert_eq!(block.description.as_deref(), Some("first"));
        assert_eq!(block.modified.len(), 2);
        assert_eq!(block.last_modified(), Some(&when("2021-01-01")));
        assert_eq!(
            block.references,
            [Reference::literal(
                format!("{DCTERMS_NS}description"),
                "second"
            )]
        );
    }

    #[test]
    fn about_rules() {
        assert_eq!(DescriptionBlock::new("./").unwrap().about(), ".");
        assert_eq!(
            DescriptionBlock::new("http://example.org/a.omex")
                .unwrap()
                .about(),
            "http://example.org/a.omex"
        );
        assert!(matches!(
            DescriptionBlock::new("../x"),
            Err(MetadataError::InvalidAbout(_))
        ));
    }

    #[test]
    fn archive_block_listed_first() {
        let mut set = MetadataSet::new();
        set.insert(DescriptionBlock::new("!bang").unwrap());
        set.insert(DescriptionBlock::for_archive());
        let abouts: Vec<_> = set.blocks().map(|b| b.about()).collect();
        assert_eq!(abouts, [".", "!bang"]);
    }
}
