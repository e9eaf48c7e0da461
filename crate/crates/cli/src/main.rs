//! `omex`: pack, unpack, inspect and validate COMBINE/OMEX archives.
//!
//! Exit status is 0 on success, 1 when the archive has validation errors or
//! cannot be read as an archive, and 2 for usage and I/O failures.

mod commands;
mod json;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use omex_core::ArchiveError;

#[derive(Debug, Parser)]
#[command(name = "omex", version, about = "Work with COMBINE/OMEX archives")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Pack a directory into an archive.
    ///
    /// Formats are guessed from file names and XML root elements unless
    /// given with --format. A `manifest.xml` at the top of the directory
    /// supplies formats and master flags instead of being packed.
    Pack(PackArgs),

    /// Extract every file of an archive, `manifest.xml` included.
    Unpack {
        archive: PathBuf,
        destination: PathBuf,
        /// Extract into a non-empty directory, overwriting files.
        #[arg(short, long)]
        force: bool,
    },

    /// List manifest entries with their format class and size.
    List {
        archive: PathBuf,
        #[arg(long)]
        json: bool,
    },

    /// Check an archive and report every problem found.
    Validate {
        archive: PathBuf,
        /// Unlisted files and unrecognized formats are errors (default).
        #[arg(long, conflicts_with = "lenient")]
        strict: bool,
        /// Unlisted files and unrecognized formats are warnings.
        #[arg(long)]
        lenient: bool,
        #[arg(long)]
        json: bool,
    },

    /// Summarize the manifest and the archive-level metadata.
    Info {
        archive: PathBuf,
        #[arg(long)]
        json: bool,
    },

    /// Show or edit the archive metadata.
    #[command(subcommand)]
    Meta(MetaCommand),
}

#[derive(Debug, Args)]
struct PackArgs {
    directory: PathBuf,
    output: PathBuf,
    /// Flag a location as master; repeatable.
    #[arg(long = "master", value_name = "LOCATION")]
    masters: Vec<String>,
    /// Set the format URI of a location; repeatable.
    #[arg(long = "format", value_name = "LOCATION=URI", value_parser = parse_format)]
    formats: Vec<(String, String)>,
    /// Do not record creation time and creator in the metadata.
    #[arg(long, env = "OMEX_NO_STAMP")]
    no_stamp: bool,
    /// Creator to record when stamping, as `family;given;email;organization;url`.
    /// Defaults to the current user name.
    #[arg(long, value_name = "CREATOR")]
    creator: Option<String>,
    /// Output file extension. `auto` adds the inferred extension when the
    /// output name has none.
    #[arg(long, value_enum, default_value_t = Extension::Auto)]
    ext: Extension,
}

#[derive(Debug, Subcommand)]
enum MetaCommand {
    /// Print the metadata document, or its blocks with --json.
    Show {
        archive: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Update the archive-level description block.
    Set(MetaSetArgs),
}

#[derive(Debug, Args)]
struct MetaSetArgs {
    archive: PathBuf,
    /// Add a creator, as `family;given;email;organization;url`; repeatable.
    #[arg(long = "creator", value_name = "CREATOR")]
    creators: Vec<String>,
    /// Replace the archive description.
    #[arg(long)]
    description: Option<String>,
    /// Append the current time as a `modified` date.
    #[arg(long)]
    touch: bool,
    /// Write the result here instead of replacing the archive.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Extension {
    Auto,
    Omex,
    Sedx,
    Sbex,
    Cmex,
    Sbox,
    Neux,
    Phex,
}

fn parse_format(raw: &str) -> Result<(String, String), String> {
    match raw.split_once('=') {
        Some((location, uri)) if !location.is_empty() && !uri.is_empty() => {
            Ok((location.to_string(), uri.to_string()))
        }
        _ => Err("expected LOCATION=URI".to_string()),
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Archive(#[from] ArchiveError),
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot write JSON: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Archive(
                ArchiveError::Container(_)
                | ArchiveError::NotAZip(_)
                | ArchiveError::MissingManifest
                | ArchiveError::ManifestParse(_)
                | ArchiveError::DanglingManifestEntry(_)
                | ArchiveError::Metadata(_),
            ) => 1,
            _ => 2,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("omex: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
