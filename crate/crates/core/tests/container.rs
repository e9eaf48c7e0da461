mod common;

use std::collections::BTreeMap;
use std::io::Write;

use flate2::write::DeflateEncoder;
use omex_core::{Compression, Container, ContainerError};
use proptest::prelude::*;

use common::{raw_zip, RawEntry};

fn path_strategy() -> impl Strategy<Value = String> {
    let segment =
        "[a-zA-Z0-9 _.+=é模Ω-]{1,12}".prop_filter("not a dot segment", |s| s != "." && s != "..");
    prop::collection::vec(segment, 1..4).prop_map(|segments| segments.join("/"))
}

fn container_of(files: &BTreeMap<String, (Vec<u8>, bool)>) -> Container {
    let mut container = Container::new();
    for (path, (bytes, stored)) in files {
        let compression = if *stored {
            Compression::Store
        } else {
            Compression::Deflate
        };
        container.add(path, bytes.clone(), compression).unwrap();
    }
    container
}

fn mapping(container: &Container) -> BTreeMap<String, Vec<u8>> {
    container
        .entries()
        .map(|e| (e.path.to_string(), e.bytes.clone()))
        .collect()
}

/// Drops paths that would need to be both a file and a directory.
fn without_prefix_clashes(
    files: BTreeMap<String, (Vec<u8>, bool)>,
) -> BTreeMap<String, (Vec<u8>, bool)> {
    let keys: Vec<String> = files.keys().cloned().collect();
    files
        .into_iter()
        .filter(|(path, _)| !keys.iter().any(|k| k.starts_with(&format!("{path}/"))))
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn fifty_entry_round_trip(
        files in prop::collection::btree_map(
            path_strategy(),
            (prop::collection::vec(any::<u8>(), 0..2048), any::<bool>()),
            50,
        )
        .prop_map(without_prefix_clashes)
    ) {
        let container = container_of(&files);
        let bytes = container.to_bytes().unwrap();
        let reopened = Container::open(&bytes).unwrap();
        prop_assert_eq!(mapping(&reopened), mapping(&container));
        prop_assert_eq!(&reopened, &container);

        // write(open(z)) opens to the same container and the same bytes.
        let again = reopened.to_bytes().unwrap();
        prop_assert_eq!(&Container::open(&again).unwrap(), &reopened);
        prop_assert_eq!(&again, &bytes);
        prop_assert_eq!(container.to_bytes().unwrap(), bytes);
    }
}

fn deflate_oracle(payload: &[u8]) -> usize {
    let mut encoder = DeflateEncoder::new(Vec::new(), flate2::Compression::new(6));
    encoder.write_all(payload).unwrap();
    encoder.finish().unwrap().len()
}

fn repeated_lines(len: usize) -> Vec<u8> {
    let line = b"0123456789abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ#\n";
    assert_eq!(line.len(), 64);
    line.iter().copied().cycle().take(len).collect()
}

#[test]
fn repeated_text_compresses_to_a_fifth() {
    let payload = repeated_lines(1 << 20);
    // An independent deflate implementation shows the bound is attainable.
    assert!(deflate_oracle(&payload) * 5 <= payload.len());

    let mut container = Container::new();
    container
        .add("lines.txt", payload.clone(), Compression::Deflate)
        .unwrap();
    let bytes = container.to_bytes().unwrap();
    assert!(bytes.len() * 5 <= payload.len(), "{} bytes", bytes.len());
    assert_eq!(
        Container::open(&bytes).unwrap().get("lines.txt").unwrap(),
        &payload[..]
    );
}

#[test]
fn numbered_lines_also_compress() {
    let mut payload = Vec::new();
    let mut i = 0;
    while payload.len() < 1 << 20 {
        payload.extend_from_slice(
            format!("{i:>10} the same words on every line of this file\n").as_bytes(),
        );
        i += 1;
    }
    let mut container = Container::new();
    container
        .add("numbered.txt", payload.clone(), Compression::Deflate)
        .unwrap();
    let bytes = container.to_bytes().unwrap();
    assert!(bytes.len() * 5 <= payload.len());
    assert!(bytes.len() < deflate_oracle(&payload) * 2);
}

#[test]
fn deflate_beats_store_from_64_kib() {
    for len in [64 << 10, 100_000, 256 << 10, 1 << 20] {
        let payload = repeated_lines(len);
        let size = |compression| {
            let mut container = Container::new();
            container
                .add("a.txt", payload.clone(), compression)
                .unwrap();
            container.to_bytes().unwrap().len()
        };
        assert!(
            size(Compression::Deflate) < size(Compression::Store),
            "{len}"
        );
    }
}

#[test]
fn stored_entries_keep_their_method() {
    let mut container = Container::new();
    container
        .add("raw.bin", vec![7u8; 1000], Compression::Store)
        .unwrap();
    let reopened = Container::open(&container.to_bytes().unwrap()).unwrap();
    assert_eq!(
        reopened.entry("raw.bin").unwrap().compression,
        Compression::Store
    );
}

#[test]
fn hostile_names_are_rejected_at_open() {
    for name in [
        "../x",
        "a/../../x",
        "/etc/x",
        "a\\b",
        "C:/x",
        "c:x",
        "x\0y",
        "a//b",
        "..",
        "../",
    ] {
        let bytes = raw_zip(&[RawEntry::file(name, b"x")]);
        assert!(
            matches!(
                Container::open(&bytes),
                Err(ContainerError::UnsafePath { .. })
            ),
            "{name:?}"
        );
    }
}

#[test]
fn symlinks_and_aliases_are_rejected_at_open() {
    let bytes = raw_zip(&[RawEntry::symlink("link", "/etc")]);
    assert!(matches!(
        Container::open(&bytes),
        Err(ContainerError::Unsupported { .. })
    ));

    let bytes = raw_zip(&[
        RawEntry::file("a/b.txt", b"1"),
        RawEntry::file("a/./b.txt", b"2"),
    ]);
    assert!(
        matches!(Container::open(&bytes), Err(ContainerError::DuplicateEntry(p)) if p == "a/b.txt")
    );
}

#[test]
fn leading_dot_segments_are_normalized() {
    let bytes = raw_zip(&[
        RawEntry::file("./a/./b.txt", b"x"),
        RawEntry::file("dir/", b""),
    ]);
    let container = Container::open(&bytes).unwrap();
    assert_eq!(
        container.paths().map(|p| p.as_str()).collect::<Vec<_>>(),
        ["a/b.txt"]
    );
}

#[test]
fn garbage_is_not_a_zip() {
    for bytes in [&b""[..], b"PK", b"PK\x03\x04 truncated", b"plain text\n"] {
        assert!(matches!(
            Container::open(bytes),
            Err(ContainerError::NotAZip(_))
        ));
    }
}
