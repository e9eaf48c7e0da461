#![allow(dead_code)]

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use omex_core::{Archive, ArchiveFile, Compression, Container, Issue, Severity};

pub const GOLDEN_MANIFEST: &[u8] = include_bytes!("../fixtures/manifest.xml");
pub const GOLDEN_METADATA: &[u8] = include_bytes!("../fixtures/metadata.rdf");

pub const OMEX: &str = "http://identifiers.org/combine.specifications/omex";
pub const SBML: &str = "http://identifiers.org/combine.specifications/sbml";
pub const SEDML: &str = "http://identifiers.org/combine.specifications/sed-ml";
pub const CELLML: &str = "http://identifiers.org/combine.specifications/cellml";
pub const PDF: &str = "http://purl.org/NET/mediatypes/application/pdf";
pub const METADATA: &str = "http://identifiers.org/combine.specifications/omex-metadata";

pub const MODEL_BYTES: &[u8] =
    b"<?xml version=\"1.0\"?>\n<sbml xmlns=\"http://www.sbml.org/sbml/level3/version1/core\"/>\n";
pub const SIMULATION_BYTES: &[u8] =
    b"<?xml version=\"1.0\"?>\n<sedML xmlns=\"http://sed-ml.org/sed-ml/level1/version3\"/>\n";
pub const ARTICLE_BYTES: &[u8] =
    b"%PDF-1.4\n%\xe2\xe3\xcf\xd3\n1 0 obj<<>>endobj\ntrailer<<>>\n%%EOF\n";

/// The five files of the reference archive, in manifest order.
pub fn golden_files() -> Vec<ArchiveFile> {
    vec![
        ArchiveFile::new("models/model.xml", SBML, MODEL_BYTES),
        ArchiveFile::new("simulation.xml", SEDML, SIMULATION_BYTES).master(true),
        ArchiveFile::new("doc/article.pdf", PDF, ARTICLE_BYTES),
        ArchiveFile::new("metadata.rdf", METADATA, GOLDEN_METADATA),
    ]
}

pub fn golden_archive() -> Archive {
    Archive::create(golden_files(), None).expect("reference archive builds")
}

pub fn golden_bytes() -> Vec<u8> {
    golden_archive()
        .to_bytes()
        .expect("reference archive serializes")
}

/// Container of the reference archive with its original manifest bytes.
pub fn golden_container() -> Container {
    let mut container = Container::open(&golden_bytes()).unwrap();
    container
        .put(
            "manifest.xml",
            GOLDEN_MANIFEST.to_vec(),
            Compression::Deflate,
        )
        .unwrap();
    container
}

pub fn summary(items: &[Issue]) -> Vec<(String, Severity, String)> {
    items
        .iter()
        .map(|i| (i.rule.clone(), i.severity, i.location.clone()))
        .collect()
}

/// Every regular file under `dir`, keyed by `/`-joined relative path.
pub fn read_tree(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fn walk(root: &Path, dir: &Path, out: &mut BTreeMap<String, Vec<u8>>) {
        for item in fs::read_dir(dir).unwrap() {
            let item = item.unwrap();
            let kind = item.file_type().unwrap();
            let path = item.path();
            if kind.is_dir() {
                walk(root, &path, out);
            } else {
                let rel = path.strip_prefix(root).unwrap();
                let key: Vec<&str> = rel.iter().map(|s| s.to_str().unwrap()).collect();
                out.insert(key.join("/"), fs::read(&path).unwrap());
            }
        }
    }
    let mut out = BTreeMap::new();
    walk(dir, dir, &mut out);
    out
}

pub fn write_tree(dir: &Path, files: &BTreeMap<String, Vec<u8>>) {
    for (rel, bytes) in files {
        let path = dir.join(rel);
        fs::create_dir_all(path.parent().unwrap()).unwrap();
        fs::write(path, bytes).unwrap();
    }
}

/// One member of a hand-built ZIP.
pub struct RawEntry {
    pub name: Vec<u8>,
    pub data: Vec<u8>,
    /// Upper 16 bits of the external attributes (unix mode).
    pub unix_mode: Option<u32>,
}

impl RawEntry {
    pub fn file(name: impl AsRef<[u8]>, data: impl AsRef<[u8]>) -> Self {
        RawEntry {
            name: name.as_ref().to_vec(),
            data: data.as_ref().to_vec(),
            unix_mode: None,
        }
    }

    pub fn symlink(name: impl AsRef<[u8]>, target: impl AsRef<[u8]>) -> Self {
        RawEntry {
            name: name.as_ref().to_vec(),
            data: target.as_ref().to_vec(),
            unix_mode: Some(0o120777),
        }
    }
}

const UTF8_NAMES: u16 = 1 << 11;

/// Writes a stored-only ZIP byte for byte, bypassing any name checks a ZIP
/// library would apply.
pub fn raw_zip(entries: &[RawEntry]) -> Vec<u8> {
    let mut out = Vec::new();
    let mut central = Vec::new();
    for entry in entries {
        let mut crc = flate2::Crc::new();
        crc.update(&entry.data);
        let crc = crc.sum();
        let offset = out.len() as u32;
        let size = entry.data.len() as u32;
        let name_len = entry.name.len() as u16;

        out.extend_from_slice(&0x0403_4b50u32.to_le_bytes());
        out.extend_from_slice(&20u16.to_le_bytes()); // version needed
        out.extend_from_slice(&UTF8_NAMES.to_le_bytes());
        out.extend_from_slice(&0u16.to_le_bytes()); // stored
        out.extend_from_slice(&0u16.to_le_bytes()); // time
        out.extend_from_slice(&0x0021u16.to_le_bytes()); // 1980-01-01
        out.extend_from_slice(&crc.to_le_bytes());
        out.extend_from_slice(&size.to_le_bytes());
        out.extend_from_slice(&size.to_le_bytes());
        out.extend_from_slice(&name_len.to_le_bytes());
        out.extend_from_slice(&0u16.to_le_bytes());
        out.extend_from_slice(&entry.name);
        out.extend_from_slice(&entry.data);

        let (made_by, external) = match entry.unix_mode {
            Some(mode) => ((3u16 << 8) | 20, mode << 16),
            None => (20u16, 0u32),
        };
        central.extend_from_slice(&0x0201_4b50u32.to_le_bytes());
        central.extend_from_slice(&made_by.to_le_bytes());
        central.extend_from_slice(&20u16.to_le_bytes());
        central.extend_from_slice(&UTF8_NAMES.to_le_bytes());
        central.extend_from_slice(&0u16.to_le_bytes());
        central.extend_from_slice(&0u16.to_le_bytes());
        central.extend_from_slice(&0x0021u16.to_le_bytes());
        central.extend_from_slice(&crc.to_le_bytes());
        central.extend_from_slice(&size.to_le_bytes());
        central.extend_from_slice(&size.to_le_bytes());
        central.extend_from_slice(&name_len.to_le_bytes());
        central.extend_from_slice(&0u16.to_le_bytes()); // extra
        central.extend_from_slice(&0u16.to_le_bytes()); // comment
        central.extend_from_slice(&0u16.to_le_bytes()); // disk
        central.extend_from_slice(&0u16.to_le_bytes()); // internal attrs
        central.extend_from_slice(&external.to_le_bytes());
        central.extend_from_slice(&offset.to_le_bytes());
        central.extend_from_slice(&entry.name);
    }
    let central_offset = out.len() as u32;
    let count = entries.len() as u16;
    out.extend_from_slice(&central);
    out.extend_from_slice(&0x0605_4b50u32.to_le_bytes());
    out.extend_from_slice(&0u16.to_le_bytes());
    out.extend_from_slice(&0u16.to_le_bytes());
    out.extend_from_slice(&count.to_le_bytes());
    out.extend_from_slice(&count.to_le_bytes());
    out.extend_from_slice(&(central.len() as u32).to_le_bytes());
    out.extend_from_slice(&central_offset.to_le_bytes());
    out.extend_from_slice(&0u16.to_le_bytes());
    out
}

/// Minimal manifest listing `.` plus the given `(location, format)` pairs.
pub fn manifest_xml(entries: &[(&str, &str)]) -> Vec<u8> {
    let mut xml = String::from(
        "<?xml version=\"1.0\" encoding=\"utf-8\"?>\n<omexManifest xmlns=\"http://identifiers.org/combine.specifications/omex-manifest\">\n",
    );
    xml.push_str(&format!("  <content location=\".\" format=\"{OMEX}\"/>\n"));
    for (location, format) in entries {
        xml.push_str(&format!(
            "  <content location=\"{location}\" format=\"{format}\"/>\n"
        ));
    }
    xml.push_str("</omexManifest>\n");
    xml.into_bytes()
}
