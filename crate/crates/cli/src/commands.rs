use std::env;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use omex_core::{
    pack_directory, validate, Archive, ArchiveExtension, Creator, MetadataSet, Object, PackOptions,
    ValidationMode, W3cDateTime,
};
use serde::Serialize;

use crate::json::{Info, Listing, MetadataJson, Validation};
use crate::{CliError, Command, Extension, MetaCommand, MetaSetArgs, PackArgs};

pub fn run(command: Command) -> Result<u8, CliError> {
    match command {
        Command::Pack(args) => pack(args),
        Command::Unpack {
            archive,
            destination,
            force,
        } => unpack(&archive, &destination, force),
        Command::List { archive, json } => list(&archive, json),
        Command::Validate {
            archive,
            strict: _,
            lenient,
            json,
        } => check(&archive, lenient, json),
        Command::Info { archive, json } => info(&archive, json),
        Command::Meta(MetaCommand::Show { archive, json }) => meta_show(&archive, json),
        Command::Meta(MetaCommand::Set(args)) => meta_set(args),
    }
}

fn io_error(context: String) -> impl FnOnce(io::Error) -> CliError {
    move |source| CliError::Io { context, source }
}

fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(io_error(format!("reading {}", path.display())))
}

fn open(path: &Path) -> Result<Archive, CliError> {
    Ok(Archive::open(&read(path)?)?)
}

fn print_json<T: Serialize>(value: &T) -> Result<(), CliError> {
    let mut out = io::stdout().lock();
    let written = serde_json::to_writer_pretty(&mut out, value).map_err(io::Error::from);
    match written.and_then(|()| writeln!(out)) {
        Err(e) if e.kind() == io::ErrorKind::BrokenPipe => Ok(()),
        other => other.map_err(io_error("writing to stdout".into())),
    }
}

/// Writes through a temporary file in the target directory, so readers
/// never see a partial archive.
fn write_atomically(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let context = || format!("writing {}", path.display());
    let mut file = tempfile::NamedTempFile::new_in(dir).map_err(io_error(context()))?;
    file.write_all(bytes).map_err(io_error(context()))?;
    file.persist(path).map_err(|e| CliError::Io {
        context: context(),
        source: e.error,
    })?;
    Ok(())
}

/// `SOURCE_DATE_EPOCH` when set, so that stamped archives can be reproduced.
fn now() -> Result<W3cDateTime, CliError> {
    match env::var("SOURCE_DATE_EPOCH") {
        Ok(raw) => raw
            .trim()
            .parse::<i64>()
            .ok()
            .and_then(W3cDateTime::from_unix)
            .ok_or_else(|| CliError::Usage(format!("invalid SOURCE_DATE_EPOCH `{raw}`"))),
        Err(_) => Ok(W3cDateTime::now()),
    }
}

/// Parses `family;given;email;organization;url`. Trailing fields may be
/// left out and empty fields are unset.
fn parse_creator(raw: &str) -> Result<Creator, CliError> {
    let fields: Vec<&str> = raw.split(';').map(str::trim).collect();
    if fields.len() > 5 {
        return Err(CliError::Usage(format!(
            "creator `{raw}` has more than five `;`-separated fields"
        )));
    }
    let field = |i: usize| {
        fields
            .get(i)
            .filter(|f| !f.is_empty())
            .map(|f| f.to_string())
    };
    let creator = Creator {
        family_name: field(0),
        given_name: field(1),
        email: field(2).map(|e| e.strip_prefix("mailto:").map(str::to_string).unwrap_or(e)),
        organization: field(3),
        url: field(4),
    };
    if creator.is_empty() {
        return Err(CliError::Usage(format!("creator `{raw}` is empty")));
    }
    Ok(creator)
}

fn current_user() -> Option<Creator> {
    let name = env::var("USER")
        .or_else(|_| env::var("LOGNAME"))
        .or_else(|_| env::var("USERNAME"))
        .ok()
        .filter(|n| !n.trim().is_empty())?;
    Some(Creator {
        given_name: Some(name.trim().to_string()),
        ..Creator::default()
    })
}

fn explicit_extension(ext: Extension) -> Option<ArchiveExtension> {
    Some(match ext {
        Extension::Auto => return None,
        Extension::Omex => ArchiveExtension::Omex,
        Extension::Sedx => ArchiveExtension::Sedx,
        Extension::Sbex => ArchiveExtension::Sbex,
        Extension::Cmex => ArchiveExtension::Cmex,
        Extension::Sbox => ArchiveExtension::Sbox,
        Extension::Neux => ArchiveExtension::Neux,
        Extension::Phex => ArchiveExtension::Phex,
    })
}

/// With `auto`, a name that already has an extension is kept; an explicit
/// extension replaces whatever the name has.
fn output_path(output: &Path, ext: Extension, archive: &Archive) -> PathBuf {
    match explicit_extension(ext) {
        Some(ext) => output.with_extension(ext.as_str()),
        None if output.extension().is_some() => output.to_path_buf(),
        None => output.with_extension(archive.suggested_extension().as_str()),
    }
}

fn pack(args: PackArgs) -> Result<u8, CliError> {
    if !args.directory.is_dir() {
        return Err(CliError::Usage(format!(
            "{} is not a directory",
            args.directory.display()
        )));
    }
    let stamp = if args.no_stamp {
        None
    } else {
        let creator = match &args.creator {
            Some(raw) => Some(parse_creator(raw)?),
            None => current_user(),
        };
        Some((now()?, creator))
    };
    let options = PackOptions {
        formats: args.formats.into_iter().collect(),
        masters: args.masters,
        stamp,
    };
    let archive = pack_directory(&args.directory, &options)?;
    let path = output_path(&args.output, args.ext, &archive);
    write_atomically(&path, &archive.to_bytes()?)?;
    println!("{}", path.display());
    Ok(0)
}

fn unpack(archive_path: &Path, destination: &Path, force: bool) -> Result<u8, CliError> {
    let archive = open(archive_path)?;
    if !force {
        if let Ok(mut items) = fs::read_dir(destination) {
            if items.next().is_some() {
                return Err(CliError::Usage(format!(
                    "{} is not empty; use --force to extract into it",
                    destination.display()
                )));
            }
        }
    }
    let written = archive.extract_all(destination)?;
    println!(
        "{} files extracted to {}",
        written.len(),
        destination.display()
    );
    Ok(0)
}

fn list(path: &Path, json: bool) -> Result<u8, CliError> {
    let listing = Listing::of(&open(path)?);
    if json {
        print_json(&listing)?;
        return Ok(0);
    }
    for entry in &listing.entries {
        let size = entry
            .size
            .map(|s| s.to_string())
            .unwrap_or_else(|| "-".into());
        let master = if entry.master { "*" } else { " " };
        println!(
            "{master} {size:>10}  {:<16} {}",
            entry.format_key, entry.location
        );
    }
    Ok(0)
}

fn check(path: &Path, lenient: bool, json: bool) -> Result<u8, CliError> {
    let bytes = read(path)?;
    let (mode, name) = if lenient {
        (ValidationMode::Lenient, "lenient")
    } else {
        (ValidationMode::Strict, "strict")
    };
    let report = validate(&bytes, mode);
    if json {
        print_json(&Validation::of(&report, name))?;
    } else {
        for issue in report.items() {
            let location = if issue.location.is_empty() {
                "-"
            } else {
                &issue.location
            };
            println!(
                "{:<7} {:<26} {location}: {}",
                issue.severity.to_string(),
                issue.rule,
                issue.message
            );
        }
        let errors = report.errors().count();
        let warnings = report.warnings().count();
        println!(
            "{}: {errors} error(s), {warnings} warning(s)",
            if errors == 0 { "valid" } else { "invalid" }
        );
    }
    Ok(if report.has_errors() { 1 } else { 0 })
}

fn info(path: &Path, json: bool) -> Result<u8, CliError> {
    let archive = open(path)?;
    let info = Info::of(&archive);
    if json {
        print_json(&info)?;
        return Ok(0);
    }
    println!("entries:      {}", info.entries);
    println!("extension:    .{}", info.suggested_extension);
    for master in &info.masters {
        println!("master:       {master}");
    }
    let block = archive.metadata().and_then(MetadataSet::archive_block);
    match (&info.metadata_path, block) {
        (None, _) => println!("metadata:     none"),
        (Some(path), None) => println!("metadata:     {path} (no description of the archive)"),
        (Some(path), Some(block)) => {
            println!("metadata:     {path}");
            if let Some(description) = &block.description {
                println!("description:  {description}");
            }
            for creator in &block.creators {
                println!("creator:      {}", describe_creator(creator));
            }
            if let Some(created) = &block.created {
                println!("created:      {created}");
            }
            for modified in &block.modified {
                println!("modified:     {modified}");
            }
            for reference in &block.references {
                let object = match &reference.object {
                    Object::Resource(uri) => format!("<{uri}>"),
                    Object::Literal(text) => format!("{text:?}"),
                };
                println!("reference:    {} {object}", reference.predicate);
            }
        }
    }
    Ok(0)
}

fn describe_creator(creator: &Creator) -> String {
    let mut text = creator.display_name().unwrap_or_default();
    for (open, value, close) in [
        ("<", &creator.email, ">"),
        ("(", &creator.organization, ")"),
        ("", &creator.url, ""),
    ] {
        if let Some(value) = value {
            if !text.is_empty() {
                text.push(' ');
            }
            text.push_str(&format!("{open}{value}{close}"));
        }
    }
    text
}

fn meta_show(path: &Path, json: bool) -> Result<u8, CliError> {
    let archive = open(path)?;
    if json {
        print_json(&MetadataJson::of(&archive))?;
        return Ok(0);
    }
    match archive.metadata_path() {
        Some(path) => {
            let bytes = archive
                .container()
                .get(path.as_str())
                .expect("discovered path is stored");
            io::stdout()
                .write_all(bytes)
                .map_err(io_error("writing to stdout".into()))?;
        }
        None => eprintln!("omex: archive has no metadata"),
    }
    Ok(0)
}

fn meta_set(args: MetaSetArgs) -> Result<u8, CliError> {
    if args.creators.is_empty() && args.description.is_none() && !args.touch {
        return Err(CliError::Usage(
            "nothing to set; give --creator, --description or --touch".into(),
        ));
    }
    let creators = args
        .creators
        .iter()
        .map(|raw| parse_creator(raw))
        .collect::<Result<Vec<_>, _>>()?;
    let archive = open(&args.archive)?;
    if archive.metadata_path().is_some() && archive.metadata().is_none() {
        return Err(CliError::Usage(
            "the archive metadata cannot be parsed; refusing to overwrite it".into(),
        ));
    }

    let mut metadata = archive.metadata().cloned().unwrap_or_default();
    let block = metadata.archive_block_mut();
    for creator in creators {
        if !block.creators.contains(&creator) {
            block.creators.push(creator);
        }
    }
    if let Some(description) = args.description {
        block.description = Some(description);
    }
    if args.touch {
        metadata.touch(now()?);
    }

    let updated = archive.with_metadata(&metadata)?;
    let output = args.output.as_deref().unwrap_or(&args.archive);
    write_atomically(output, &updated.to_bytes()?)?;
    Ok(0)
}
