//! Entry paths and manifest locations.
//!
//! Two related spellings of "where a file lives inside the archive" exist:
//!
//! * an [`EntryPath`] is the decoded, slash-separated name stored in the ZIP
//!   central directory;
//! * a *location* is the relative URI written in `manifest.xml` and in
//!   `rdf:about` attributes. The literal `.` denotes the archive itself.
//!
//! Locations are kept in a canonical form: leading `./` and `.` segments are
//! dropped, percent-escapes are decoded, and the result is re-encoded with
//! the minimal escape set. Non-ASCII characters are left as-is (IRI style).

use std::fmt;

/// Location of the archive itself.
pub const ARCHIVE_LOCATION: &str = ".";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PathError {
    #[error("path is empty")]
    Empty,
    #[error("path contains a backslash")]
    Backslash,
    #[error("path contains a NUL character")]
    Nul,
    #[error("path is absolute")]
    Absolute,
    #[error("path starts with a drive or scheme prefix")]
    Prefix,
    #[error("path contains a `..` segment")]
    Traversal,
    #[error("path contains an empty segment")]
    EmptySegment,
    #[error("location has a network authority")]
    Authority,
    #[error("location carries a query or fragment")]
    QueryOrFragment,
    #[error("malformed percent-escape")]
    BadEscape,
    #[error("decoded location is not valid UTF-8")]
    NotUtf8,
}

/// A validated relative path of a file stored in the container.
///
/// Invariants: non-empty, `/` separated, no `..` or empty segments, no
/// leading `/`, no backslash, no drive or scheme prefix. `.` segments are
/// removed during construction.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EntryPath(String);

impl EntryPath {
    pub fn new(raw: &str) -> Result<Self, PathError> {
        if raw.is_empty() {
            return Err(PathError::Empty);
        }
        if raw.contains('\\') {
            return Err(PathError::Backslash);
        }
        if raw.contains('\0') {
            return Err(PathError::Nul);
        }
        if raw.starts_with('/') {
            return Err(PathError::Absolute);
        }
        if has_scheme_prefix(raw) {
            return Err(PathError::Prefix);
        }
        let mut kept = Vec::new();
        for segment in raw.split('/') {
            match segment {
                "" => return Err(PathError::EmptySegment),
                "." => {}
                ".." => return Err(PathError::Traversal),
                s => kept.push(s),
            }
        }
        if kept.is_empty() {
            return Err(PathError::Empty);
        }
        Ok(EntryPath(kept.join("/")))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn segments(&self) -> impl Iterator<Item = &str> {
        self.0.split('/')
    }

    /// The canonical manifest location naming this path.
    pub fn to_location(&self) -> String {
        encode_location(&self.0)
    }
}

impl fmt::Display for EntryPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl AsRef<str> for EntryPath {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

// `scheme ":"` per RFC 3986; a one-letter scheme doubles as a drive letter.
fn has_scheme_prefix(raw: &str) -> bool {
    let first = raw.split('/').next().unwrap_or("");
    let Some(colon) = first.find(':') else {
        return false;
    };
    let scheme = &first[..colon];
    let mut chars = scheme.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '.'))
}

/// Canonicalizes a manifest location.
///
/// Returns `"."` for the archive itself, otherwise the canonical encoding of
/// a valid [`EntryPath`].
pub fn normalize_location(raw: &str) -> Result<String, PathError> {
    Ok(match parse_location(raw)? {
        None => ARCHIVE_LOCATION.to_string(),
        Some(path) => path.to_location(),
    })
}

/// Resolves a location to the container path it names; `None` means the
/// archive itself.
pub fn parse_location(raw: &str) -> Result<Option<EntryPath>, PathError> {
    if raw.is_empty() {
        return Err(PathError::Empty);
    }
    if raw.starts_with("//") {
        return Err(PathError::Authority);
    }
    if raw.starts_with('/') {
        return Err(PathError::Absolute);
    }
    if has_scheme_prefix(raw) {
        return Err(PathError::Prefix);
    }
    if raw.contains(['?', '#']) {
        return Err(PathError::QueryOrFragment);
    }
    let decoded = percent_decode(raw)?;
    if decoded
        .split('/')
        .all(|segment| segment == "." || segment.is_empty())
        && decoded.starts_with('.')
    {
        // ".", "./", "./." all name the archive
        return Ok(None);
    }
    EntryPath::new(&decoded).map(Some)
}

fn percent_decode(raw: &str) -> Result<String, PathError> {
    let bytes = raw.as_bytes();
    let mut out = Vec::with_capacity(bytes.len());
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] == b'%' {
            let hex = bytes.get(i + 1..i + 3).ok_or(PathError::BadEscape)?;
            let hex = std::str::from_utf8(hex).map_err(|_| PathError::BadEscape)?;
            let value = u8::from_str_radix(hex, 16).map_err(|_| PathError::BadEscape)?;
            out.push(value);
            i += 3;
        } else {
            out.push(bytes[i]);
            i += 1;
        }
    }
    String::from_utf8(out).map_err(|_| PathError::NotUtf8)
}

fn encode_location(path: &str) -> String {
    const HEX: &[u8; 16] = b"0123456789ABCDEF";
    let mut out = String::with_capacity(path.len());
    for c in path.chars() {
        let keep = !c.is_ascii()
            || c.is_ascii_alphanumeric()
            || matches!(
                c,
                '-' | '.'
                    | '_'
                    | '~'
                    | '!'
                    | '$'
                    | '&'
                    | '\''
                    | '('
                    | ')'
                    | '*'
                    | '+'
                    | ','
                    | ';'
                    | '='
                    | ':'
                    | '@'
                    | '/'
            );
        if keep {
            out.push(c);
        } else {
            let b = c as u8;
            out.push('%');
            out.push(HEX[(b >> 4) as usize] as char);
            out.push(HEX[(b & 0xF) as usize] as char);
        }
    }
    out
}
