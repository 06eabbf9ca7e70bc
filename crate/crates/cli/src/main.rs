//! Command-line front door for speechframe corpora: initialisation,
//! import, validation, staged search, statistics and segmentation export.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Parser, Subcommand, ValueEnum};

use speechframe_core::corpus::SegmentationSource;

#[derive(Parser)]
#[command(
    name = "speechframe",
    version,
    about = "Manage speech corpora: a relational store of signals, speakers, sound units and segmentation"
)]
struct Cli {
    /// Corpus directory.
    #[arg(long, global = true, value_name = "PATH")]
    corpus: Option<PathBuf>,

    /// Output mode: human-readable text or line-delimited records.
    #[arg(long, global = true, value_enum, default_value_t = OutputMode::Text)]
    output: OutputMode,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputMode {
    Text,
    Records,
}

#[derive(Clone, Copy, ValueEnum)]
enum SourceArg {
    Manual,
    Automatic,
}

impl From<SourceArg> for SegmentationSource {
    fn from(s: SourceArg) -> SegmentationSource {
        match s {
            SourceArg::Manual => SegmentationSource::Manual,
            SourceArg::Automatic => SegmentationSource::Automatic,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Initialise a corpus directory with the 27 tables and seeded
    /// reference books.
    Init {
        /// Also install the shipped Russian sound alphabet (77 units).
        #[arg(long)]
        with_seed: bool,
    },
    /// Import line-delimited records into one table, all-or-nothing.
    Import {
        /// Target table name, e.g. SPEAKER.
        #[arg(long, value_name = "TABLE")]
        table: String,
        /// File of records, one JSON object per line.
        #[arg(long, value_name = "FILE")]
        file: PathBuf,
    },
    /// Audit the corpus: key integrity, segmentation rules, symbol
    /// coverage and expert checks.
    Validate,
    /// Staged multi-parameter search over speech-signal descriptions.
    Search {
        /// A search stage, `attribute=value`; repeat for more stages.
        /// Ranges use `lo..hi`. Values may be codes or book titles.
        #[arg(long = "where", value_name = "ATTR=VALUE")]
        criteria: Vec<String>,
    },
    /// Print corpus statistics.
    Stats,
    /// Export one signal's segmentation as a tab-separated table.
    ExportSegmentation {
        /// Signal file name.
        #[arg(long, value_name = "FILE_NAME")]
        file_name: String,
        /// Restrict to one segmentation source.
        #[arg(long, value_enum)]
        source: Option<SourceArg>,
        /// Write to this path instead of stdout.
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let Some(corpus) = cli.corpus else {
        bail!("--corpus <PATH> is required");
    };
    let records = cli.output == OutputMode::Records;
    match cli.command {
        Command::Init { with_seed } => commands::init(&corpus, with_seed),
        Command::Import { table, file } => commands::import(&corpus, &table, &file),
        Command::Validate => commands::validate(&corpus),
        Command::Search { criteria } => commands::search(&corpus, &criteria, records),
        Command::Stats => commands::stats(&corpus, records),
        Command::ExportSegmentation { file_name, source, out } => commands::export_segmentation(
            &corpus,
            &file_name,
            source.map(SegmentationSource::from),
            out.as_deref(),
        ),
    }
}
