//! Workloads shared by the benchmarks.

use omex_core::{Archive, ArchiveFile, ContentEntry, Manifest};

pub const SBML: &str = "http://identifiers.org/combine.specifications/sbml";
pub const SEDML: &str = "http://identifiers.org/combine.specifications/sed-ml";

/// SBML-like text of roughly `len` bytes.
pub fn model_text(len: usize) -> Vec<u8> {
    let mut out = b"<?xml version=\"1.0\"?>\n<sbml xmlns=\"http://www.sbml.org/sbml/level3/version1/core\">\n".to_vec();
    let mut i = 0;
    while out.len() < len {
        out.extend_from_slice(
            format!(
                "  <species id=\"s{i}\" compartment=\"c\" initialConcentration=\"{}\"/>\n",
                i % 97
            )
            .as_bytes(),
        );
        i += 1;
    }
    out.extend_from_slice(b"</sbml>\n");
    out
}

/// `count` model files of `size` bytes each plus one master simulation.
pub fn files(count: usize, size: usize) -> Vec<ArchiveFile> {
    let mut files: Vec<ArchiveFile> = (0..count)
        .map(|i| ArchiveFile::new(format!("models/model-{i:04}.xml"), SBML, model_text(size)))
        .collect();
    files.push(ArchiveFile::new("simulation.sedml", SEDML, &b"<sedML/>"[..]).master(true));
    files
}

pub fn archive(count: usize, size: usize) -> Archive {
    Archive::create(files(count, size), None).expect("workload archive builds")
}

/// A manifest listing `count` entries.
pub fn manifest(count: usize) -> Manifest {
    let mut entries = vec![ContentEntry::archive()];
    for i in 0..count {
        entries
            .push(ContentEntry::new(&format!("data/file-{i:05}.xml"), SBML).expect("valid entry"));
    }
    Manifest::from_entries(entries).expect("unique locations")
}
