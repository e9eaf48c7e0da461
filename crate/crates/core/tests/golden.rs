mod common;

use omex_core::metadata::DCTERMS_NS;
use omex_core::{
    validate, Archive, ArchiveError, ArchiveFile, Compression, Container, DescriptionBlock,
    Manifest, MetadataSet, Severity, ValidationMode, W3cDateTime,
};

use common::*;

const FIVE_PATHS: [&str; 5] = [
    "manifest.xml",
    "models/model.xml",
    "simulation.xml",
    "doc/article.pdf",
    "metadata.rdf",
];

#[test]
fn reference_manifest_master_and_listing() {
    let manifest = Manifest::parse(GOLDEN_MANIFEST).unwrap();
    let masters: Vec<&str> = manifest
        .master_entries()
        .iter()
        .map(|e| e.location())
        .collect();
    assert_eq!(masters, ["simulation.xml"]);

    assert!(manifest.validate_against(FIVE_PATHS).is_empty());

    let report = manifest.validate_against(FIVE_PATHS.iter().filter(|p| **p != "doc/article.pdf"));
    assert_eq!(
        summary(report.items()),
        [(
            "dangling-entry".to_string(),
            Severity::Error,
            "doc/article.pdf".to_string()
        )]
    );
}

#[test]
fn duplicated_reference_entry_is_rejected() {
    let text = String::from_utf8(GOLDEN_MANIFEST.to_vec()).unwrap();
    let entry = "  <content location=\"simulation.xml\" master=\"true\"\n    format=\"http://identifiers.org/combine.specifications/sed-ml\"/>\n";
    assert!(text.contains(entry));
    let doubled = text.replace(entry, &format!("{entry}{entry}"));
    assert!(matches!(
        Manifest::parse(doubled.as_bytes()),
        Err(omex_core::ManifestError::DuplicateLocation(l)) if l == "simulation.xml"
    ));
}

#[test]
fn reference_metadata_minimum_information() {
    let set = MetadataSet::parse(GOLDEN_METADATA).unwrap();
    let report = set.check_minimum_information();
    assert_eq!(
        summary(report.items()),
        [(
            "metadata-missing-modified".to_string(),
            Severity::Warning,
            ".".to_string()
        )]
    );
}

#[test]
fn reference_metadata_serializes_to_equivalent_document() {
    let set = MetadataSet::parse(GOLDEN_METADATA).unwrap();
    let xml = String::from_utf8(set.to_xml().unwrap()).unwrap();
    for needle in [
        "rdf:about=\".\"",
        "<vCard:family-name>Le Novere</vCard:family-name>",
        "<vCard:given-name>Nicolas</vCard:given-name>",
        "rdf:resource=\"mailto:lenov@babraham.ac.uk\"",
        "<dcterms:W3CDTF>2014-06-26T10:29:00Z</dcterms:W3CDTF>",
        "rdf:resource=\"http://identifiers.org/biomodels.db/MODEL1311110001\"",
        "rdf:resource=\"http://identifiers.org/arxiv/1311.5696\"",
    ] {
        assert!(xml.contains(needle), "missing {needle} in\n{xml}");
    }
    assert_eq!(MetadataSet::parse(xml.as_bytes()).unwrap(), set);
}

#[test]
fn created_only_block_has_one_timestamp_pair() {
    let mut block = DescriptionBlock::for_archive();
    block.created = Some(W3cDateTime::parse("2020-02-29").unwrap());
    let mut set = MetadataSet::new();
    set.insert(block);
    let xml = String::from_utf8(set.to_xml().unwrap()).unwrap();
    assert_eq!(xml.matches("<dcterms:created").count(), 1);
    assert_eq!(
        xml.matches("<dcterms:W3CDTF>2020-02-29</dcterms:W3CDTF>")
            .count(),
        1
    );
    assert!(!xml.contains(&format!("{DCTERMS_NS}modified")));
    assert_eq!(MetadataSet::parse(xml.as_bytes()).unwrap(), set);
}

#[test]
fn five_file_archive_has_reference_manifest() {
    let archive = golden_archive();
    let reference = Manifest::parse(GOLDEN_MANIFEST).unwrap();
    assert_eq!(archive.manifest(), &reference);
    let stored = Manifest::parse(archive.container().get("manifest.xml").unwrap()).unwrap();
    assert_eq!(stored, reference);
    assert_eq!(archive.master()[0].location(), "simulation.xml");
}

#[test]
fn reference_archive_validates_with_one_warning() {
    for bytes in [golden_bytes(), golden_container().to_bytes().unwrap()] {
        let report = validate(&bytes, ValidationMode::Strict);
        assert!(!report.has_errors());
        assert_eq!(
            summary(report.items()),
            [(
                "metadata-missing-modified".to_string(),
                Severity::Warning,
                ".".to_string()
            )]
        );
    }
}

#[test]
fn unlisted_file_severity_depends_on_mode() {
    let mut container = golden_container();
    container
        .add("notes.txt", b"n".to_vec(), Compression::Deflate)
        .unwrap();
    let bytes = container.to_bytes().unwrap();
    let find = |mode| {
        validate(&bytes, mode)
            .items()
            .iter()
            .find(|i| i.rule == "unlisted-file")
            .map(|i| (i.severity, i.location.clone()))
    };
    assert_eq!(
        find(ValidationMode::Strict),
        Some((Severity::Error, "notes.txt".into()))
    );
    assert_eq!(
        find(ValidationMode::Lenient),
        Some((Severity::Warning, "notes.txt".into()))
    );
}

#[test]
fn open_reports_structural_problems() {
    let mut container = golden_container();
    container.remove("doc/article.pdf").unwrap();
    match Archive::open(&container.to_bytes().unwrap()) {
        Err(ArchiveError::DanglingManifestEntry(location)) => {
            assert_eq!(location, "doc/article.pdf")
        }
        other => panic!("unexpected {other:?}"),
    }

    let mut container = Container::new();
    container
        .add("a.txt", b"a".to_vec(), Compression::Deflate)
        .unwrap();
    assert!(matches!(
        Archive::open(&container.to_bytes().unwrap()),
        Err(ArchiveError::MissingManifest)
    ));

    let report = validate(b"just some text\n", ValidationMode::Strict);
    assert_eq!(
        summary(report.items()),
        [("not-a-zip".to_string(), Severity::Error, String::new())]
    );
    assert!(matches!(
        Archive::open(b"just some text\n"),
        Err(ArchiveError::NotAZip(_))
    ));
}

#[test]
fn reopening_gives_equal_model() {
    let archive = golden_archive();
    let reopened = Archive::open(&archive.to_bytes().unwrap()).unwrap();
    assert_eq!(reopened, archive);
    assert!(reopened.metadata().is_some());
}

#[test]
fn adding_an_entry_adds_exactly_one_manifest_entry() {
    let archive = golden_archive();
    let grown = archive
        .add_entry(ArchiveFile::new("models/m2.xml", SBML, b"<sbml/>".to_vec()))
        .unwrap();
    let before = archive.manifest().entries();
    let after = grown.manifest().entries();
    assert_eq!(after.len(), before.len() + 1);
    let added: Vec<_> = after.iter().filter(|e| !before.contains(e)).collect();
    assert_eq!(added.len(), 1);
    assert_eq!(added[0].location(), "models/m2.xml");

    assert!(matches!(
        archive.remove_entry("manifest.xml"),
        Err(ArchiveError::ReservedLocation(_))
    ));
    assert!(matches!(
        archive.remove_entry("."),
        Err(ArchiveError::ReservedLocation(_))
    ));
}

#[test]
fn extracting_reference_archive_writes_five_files() {
    let archive = golden_archive();
    let dir = tempfile::tempdir().unwrap();
    let written = archive.extract_all(dir.path()).unwrap();
    assert_eq!(written.len(), 5);
    let tree = read_tree(dir.path());
    let mut expected: Vec<&str> = FIVE_PATHS.to_vec();
    expected.sort();
    assert_eq!(
        tree.keys().map(String::as_str).collect::<Vec<_>>(),
        expected
    );
    for (path, bytes) in &tree {
        assert_eq!(archive.container().get(path).unwrap(), &bytes[..], "{path}");
    }
    assert_eq!(tree["doc/article.pdf"], ARTICLE_BYTES);
    assert_eq!(tree["metadata.rdf"], GOLDEN_METADATA);
}
