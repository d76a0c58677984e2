use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use kwlab::cli::{self, Format};
use kwlab::{Record, Result};

#[derive(Parser)]
#[command(
    name = "kwlab",
    version,
    about = "Selection, coding and statistics for binary sequences"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Descriptor {
    /// Descriptor file of `key = value` lines.
    #[arg(long, value_name = "FILE")]
    descriptor: Option<PathBuf>,
    /// Extra or overriding `key=value` pairs.
    #[arg(long = "param", value_name = "KEY=VALUE")]
    params: Vec<String>,
}

impl Descriptor {
    fn record(&self, key: &str, value: Option<&str>) -> Result<Record> {
        let mut base = match &self.descriptor {
            Some(p) => Record::load(p)?,
            None => Record::new(),
        };
        if let Some(v) = value {
            base.set(key, v);
        }
        cli::record_from_pairs(base, &self.params)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Write a prefix of a generated sequence.
    Generate {
        #[arg(long)]
        kind: Option<String>,
        #[command(flatten)]
        desc: Descriptor,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "text")]
        format: Format,
    },
    /// Select from `--in` the bits where `--in2` has a one.
    Select {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long = "in2")]
        selector: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Write the selected positions here, one per line.
        #[arg(long)]
        positions: Option<PathBuf>,
        #[arg(long, default_value = "text")]
        format: Format,
    },
    /// Block statistics of a sequence file.
    Stats {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "1")]
        k: Vec<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write `pattern,count` rows for the single given k.
        #[arg(long)]
        blocks: Option<PathBuf>,
        #[arg(long, default_value = "text")]
        format: Format,
    },
    /// Arithmetic-code a sequence under a measure.
    Encode {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        family: Option<String>,
        #[command(flatten)]
        measure: Descriptor,
        #[arg(long)]
        out: PathBuf,
        /// Write the code-length curve as CSV.
        #[arg(long)]
        curve: Option<PathBuf>,
        #[arg(long, default_value = "text")]
        format: Format,
    },
    /// Decode at most `--n` bits of a code.
    Decode {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        family: Option<String>,
        #[command(flatten)]
        measure: Descriptor,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "text")]
        format: Format,
    },
    /// Run an experiment manifest.
    Experiment {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn run(cmd: Command) -> Result<bool> {
    let msg = match cmd {
        Command::Generate {
            kind,
            desc,
            n,
            out,
            format,
        } => cli::generate(&desc.record("kind", kind.as_deref())?, n, &out, format)?,
        Command::Select {
            input,
            selector,
            out,
            positions,
            format,
        } => cli::select_files(&input, &selector, &out, positions.as_deref(), format)?,
        Command::Stats {
            input,
            k,
            out,
            blocks,
            format,
        } => cli::stats_file(&input, &k, out.as_deref(), blocks.as_deref(), format)?,
        Command::Encode {
            input,
            family,
            measure,
            out,
            curve,
            format,
        } => cli::encode_file(
            &input,
            &measure.record("family", family.as_deref())?,
            &out,
            curve.as_deref(),
            format,
        )?,
        Command::Decode {
            input,
            family,
            measure,
            n,
            out,
            format,
        } => cli::decode_file(
            &input,
            &measure.record("family", family.as_deref())?,
            n,
            &out,
            format,
        )?,
        Command::Experiment { manifest, out } => {
            let report = cli::experiment_file(&manifest, &out)?;
            print!("{}", report.summary());
            return Ok(report.passed());
        }
    };
    println!("{msg}");
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse().command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("kwlab: {e}");
            ExitCode::from(2)
        }
    }
}
