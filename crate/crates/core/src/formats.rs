//! Format URI classification and archive extension inference.

use std::fmt;

use serde::Serialize;

use crate::manifest::Manifest;

pub const COMBINE_PREFIX: &str = "http://identifiers.org/combine.specifications/";
pub const MEDIA_TYPE_PREFIX: &str = "http://purl.org/NET/mediatypes/";

pub const OMEX_FORMAT: &str = "http://identifiers.org/combine.specifications/omex";
pub const MANIFEST_FORMAT: &str = "http://identifiers.org/combine.specifications/omex-manifest";
pub const METADATA_FORMAT: &str = "http://identifiers.org/combine.specifications/omex-metadata";
pub const OCTET_STREAM_FORMAT: &str = "http://purl.org/NET/mediatypes/application/octet-stream";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FormatKind {
    CombineRegistered,
    RegisteredMediaType,
    UnregisteredMediaType,
    Invalid,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct FormatClass {
    pub kind: FormatKind,
    /// COMBINE specification key, media type, or the raw input when invalid.
    pub key: String,
}

impl FormatClass {
    fn invalid(raw: &str) -> Self {
        FormatClass {
            kind: FormatKind::Invalid,
            key: raw.to_string(),
        }
    }
}

/// Classifies a `format` attribute value. Total: every input maps to exactly
/// one class.
pub fn classify_format(uri: &str) -> FormatClass {
    if let Some(key) = uri.strip_prefix(COMBINE_PREFIX) {
        let valid = !key.is_empty()
            && key
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '.' | '_' | '/'));
        return if valid {
            FormatClass {
                kind: FormatKind::CombineRegistered,
                key: key.to_string(),
            }
        } else {
            FormatClass::invalid(uri)
        };
    }
    if let Some(media_type) = uri.strip_prefix(MEDIA_TYPE_PREFIX) {
        let Some((top, sub)) = media_type.split_once('/') else {
            return FormatClass::invalid(uri);
        };
        if !is_restricted_name(top) || !is_restricted_name(sub) {
            return FormatClass::invalid(uri);
        }
        let kind = if sub.starts_with("x.") {
            FormatKind::UnregisteredMediaType
        } else {
            FormatKind::RegisteredMediaType
        };
        return FormatClass {
            kind,
            key: media_type.to_string(),
        };
    }
    FormatClass::invalid(uri)
}

// restricted-name from RFC 6838
fn is_restricted_name(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphanumeric())
        && s.len() <= 127
        && chars.all(|c| {
            c.is_ascii_alphanumeric()
                || matches!(c, '!' | '#' | '$' | '&' | '-' | '^' | '_' | '.' | '+')
        })
}

/// Syntactic check for an absolute URI: `scheme ":" rest` with no
/// whitespace or control characters.
pub fn is_absolute_uri(uri: &str) -> bool {
    let Some((scheme, rest)) = uri.split_once(':') else {
        return false;
    };
    let mut chars = scheme.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '.'))
        && !rest.is_empty()
        && !uri
            .chars()
            .any(|c| c.is_whitespace() || c.is_control() || matches!(c, '"' | '<' | '>'))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ArchiveExtension {
    Omex,
    Sedx,
    Sbex,
    Cmex,
    Sbox,
    Neux,
    Phex,
}

impl ArchiveExtension {
    pub const ALL: [ArchiveExtension; 7] = [
        ArchiveExtension::Omex,
        ArchiveExtension::Sedx,
        ArchiveExtension::Sbex,
        ArchiveExtension::Cmex,
        ArchiveExtension::Sbox,
        ArchiveExtension::Neux,
        ArchiveExtension::Phex,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ArchiveExtension::Omex => "omex",
            ArchiveExtension::Sedx => "sedx",
            ArchiveExtension::Sbex => "sbex",
            ArchiveExtension::Cmex => "cmex",
            ArchiveExtension::Sbox => "sbox",
            ArchiveExtension::Neux => "neux",
            ArchiveExtension::Phex => "phex",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        let name = name.strip_prefix('.').unwrap_or(name);
        Self::ALL
            .into_iter()
            .find(|ext| ext.as_str().eq_ignore_ascii_case(name))
    }
}

impl fmt::Display for ArchiveExtension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

const SEDML_KEY: &str = "sed-ml";

/// Model families that select a dedicated extension, matched by key prefix.
const MODEL_FAMILIES: [(&str, ArchiveExtension); 5] = [
    ("sbml", ArchiveExtension::Sbex),
    ("cellml", ArchiveExtension::Cmex),
    ("sbol", ArchiveExtension::Sbox),
    ("neuroml", ArchiveExtension::Neux),
    ("pharmml", ArchiveExtension::Phex),
];

/// Picks the conventional extension for an archive with this manifest.
///
/// Any SED-ML entry selects `sedx`. Otherwise, if every model-bearing entry
/// belongs to one family, that family's extension is used. Everything else
/// is `omex`. The archive entry and the manifest/metadata formats are
/// ignored.
pub fn infer_extension(manifest: &Manifest) -> ArchiveExtension {
    let mut family: Option<ArchiveExtension> = None;
    let mut mixed = false;
    for entry in manifest.entries() {
        if entry.is_archive() {
            continue;
        }
        let class = classify_format(entry.format());
        if class.kind != FormatKind::CombineRegistered || class.key.starts_with("omex") {
            continue;
        }
        if class.key.starts_with(SEDML_KEY) {
            return ArchiveExtension::Sedx;
        }
        if let Some((_, ext)) = MODEL_FAMILIES
            .iter()
            .find(|(prefix, _)| class.key.starts_with(prefix))
        {
            match family {
                None => family = Some(*ext),
                Some(existing) if existing != *ext => mixed = true,
                Some(_) => {}
            }
        }
    }
    match family {
        Some(ext) if !mixed => ext,
        _ => ArchiveExtension::Omex,
    }
}

/// Default format URI for a file, guessed from its name.
pub fn format_for_filename(name: &str) -> String {
    let file_name = name.rsplit('/').next().unwrap_or(name);
    if file_name == "metadata.rdf" {
        return METADATA_FORMAT.to_string();
    }
    let ext = match file_name.rsplit_once('.') {
        Some((stem, ext)) if !stem.is_empty() => ext.to_ascii_lowercase(),
        _ => return OCTET_STREAM_FORMAT.to_string(),
    };
    let combine = |key: &str| format!("{COMBINE_PREFIX}{key}");
    let media = |ty: &str| format!("{MEDIA_TYPE_PREFIX}{ty}");
    match ext.as_str() {
        "sbml" => combine("sbml"),
        "sedml" | "sedx" => combine("sed-ml"),
        "cellml" => combine("cellml"),
        "sbol" => combine("sbol"),
        "nml" => combine("neuroml"),
        "omex" => combine("omex"),
        "xml" => media("application/xml"),
        "rdf" => media("application/rdf+xml"),
        "pdf" => media("application/pdf"),
        "txt" | "text" => media("text/plain"),
        "md" => media("text/markdown"),
        "csv" => media("text/csv"),
        "tsv" => media("text/tab-separated-values"),
        "html" | "htm" => media("text/html"),
        "json" => media("application/json"),
        "zip" => media("application/zip"),
        "png" => media("image/png"),
        "jpg" | "jpeg" => media("image/jpeg"),
        "gif" => media("image/gif"),
        "svg" => media("image/svg+xml"),
        "tif" | "tiff" => media("image/tiff"),
        _ => OCTET_STREAM_FORMAT.to_string(),
    }
}

/// Like [`format_for_filename`], but a generic XML file is recognized by its
/// root element when it is an SBML, SED-ML, CellML, NeuroML or PharmML
/// document.
pub fn format_for_file(name: &str, bytes: &[u8]) -> String {
    let by_name = format_for_filename(name);
    if by_name != format!("{MEDIA_TYPE_PREFIX}application/xml") {
        return by_name;
    }
    let Some((ns, local)) = xml_root(bytes) else {
        return by_name;
    };
    let key = match local.as_str() {
        "sbml" => "sbml",
        "sedML" => "sed-ml",
        "model" if ns.contains("cellml.org/cellml") => "cellml",
        "neuroml" | "Neuroml" => "neuroml",
        "PharmML" => "pharmml",
        _ => return by_name,
    };
    format!("{COMBINE_PREFIX}{key}")
}

fn xml_root(bytes: &[u8]) -> Option<(String, String)> {
    use quick_xml::events::Event;
    use quick_xml::name::ResolveResult;

    let mut reader = quick_xml::NsReader::from_reader(bytes);
    loop {
        match reader.read_resolved_event().ok()? {
            (ns, Event::Start(e) | Event::Empty(e)) => {
                let ns = match ns {
                    ResolveResult::Bound(ns) => String::from_utf8(ns.as_ref().to_vec()).ok()?,
                    _ => String::new(),
                };
                let local = String::from_utf8(e.local_name().as_ref().to_vec()).ok()?;
                return Some((ns, local));
            }
            (_, Event::Eof) => return None,
            _ => {}
        }
    }
}
