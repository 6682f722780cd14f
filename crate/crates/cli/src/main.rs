//! `algorec` command-line front end.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 backend error.

mod commands;
mod config;
mod error;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgAction, Args, Parser, Subcommand};

use crate::config::RunConfig;
use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "algorec", version, about = "Recognise algorithm implementations in Java method corpora")]
struct Cli {
    /// JSON config file; flags given on the command line win.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Raise log verbosity (-v info, -vv debug).
    #[arg(short, long, global = true, action = ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Extract method records from .java files or a JSONL corpus.
    Extract(ExtractArgs),
    /// Run a pre-filter over a corpus.
    #[command(subcommand)]
    Filter(FilterCommand),
    /// Score every method of a corpus for one algorithm.
    Classify(ClassifyArgs),
    /// Rename method-declared identifiers.
    Obfuscate(ObfuscateArgs),
    /// Make a stratified test/validation split, optionally thinning negatives.
    Split(SplitArgs),
    /// Filter, classify and score a labeled corpus.
    Evaluate(EvaluateArgs),
    /// Build CSV and JSON reports from results files.
    Report(ReportArgs),
    /// Print the threshold sweep of results files.
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
pub struct ExtractArgs {
    /// Directory of .java files, a .java file, or a JSONL corpus.
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum FilterCommand {
    /// Keyword (regex-group) filter.
    Keywords(KeywordArgs),
    /// AST pattern filter.
    Structural(StructuralArgs),
}

#[derive(Debug, Args)]
pub struct KeywordArgs {
    /// Pattern file holding one pattern or an array; defaults to the shipped family.
    #[arg(long)]
    pub patterns: Option<PathBuf>,
    /// Shipped family used without --patterns: rf or ep.
    #[arg(long, default_value = "rf")]
    pub family: String,
    /// Restrict to one algorithm.
    #[arg(long)]
    pub algorithm: Option<String>,
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct StructuralArgs {
    /// Pattern file; defaults to the shipped patterns.
    #[arg(long)]
    pub pattern: Option<PathBuf>,
    /// Restrict the shipped patterns to one algorithm.
    #[arg(long)]
    pub algorithm: Option<String>,
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BackendArgs {
    /// Prompt style: yesno, score, cot, icl:<n>p<m>n, optionally +random.
    #[arg(long)]
    pub style: Option<String>,
    /// mock, or openai for any OpenAI-compatible endpoint configured through
    /// ALGOREC_API_BASE, ALGOREC_API_KEY, ALGOREC_MODEL, ALGOREC_TIMEOUT_SECS
    /// and ALGOREC_CONTEXT_TOKENS.
    #[arg(long)]
    pub backend: Option<String>,
    /// Concurrent requests.
    #[arg(long)]
    pub parallelism: Option<usize>,
    /// Directory for cached verdicts.
    #[arg(long)]
    pub cache_dir: Option<PathBuf>,
    /// Score undecodable answers as 0 instead of failing the record.
    #[arg(long)]
    pub lenient: bool,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    #[arg(long)]
    pub algorithm: Option<String>,
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    #[command(flatten)]
    pub backend: BackendArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ObfuscateArgs {
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub strip_comments: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SplitArgs {
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    #[arg(long)]
    pub truth: Option<PathBuf>,
    /// Test-side fraction.
    #[arg(long)]
    pub ratio: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Split file to write.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write a thinned corpus.jsonl and truth.jsonl here.
    #[arg(long)]
    pub reduced_dir: Option<PathBuf>,
    /// Fraction of negatives kept for thinned algorithms.
    #[arg(long, default_value_t = algorec_core::eval::DEFAULT_KEEP_FRACTION)]
    pub keep_fraction: f64,
    /// Algorithms to thin, comma separated.
    #[arg(long, value_delimiter = ',', default_values = ["bubble_sort", "binary_search"])]
    pub thin: Vec<String>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    #[arg(long)]
    pub truth: Option<PathBuf>,
    /// none, keyword:<family>, or structural.
    #[arg(long)]
    pub filter: Option<String>,
    /// Pattern files replacing the shipped ones (structural also takes directories).
    #[arg(long, num_args = 1..)]
    pub patterns: Option<Vec<PathBuf>>,
    #[command(flatten)]
    pub backend: BackendArgs,
    /// standard or lower-bound.
    #[arg(long)]
    pub mode: Option<String>,
    /// test, validation or all.
    #[arg(long)]
    pub split: Option<String>,
    /// Split file; without one, a split is drawn from --seed and saved.
    #[arg(long)]
    pub split_file: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Also pick a best threshold per algorithm.
    #[arg(long)]
    pub per_algorithm: bool,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Results files written by `evaluate`.
    #[arg(long, num_args = 1.., required = true)]
    pub results: Vec<PathBuf>,
    /// Re-score every run with unlabeled positives counted as false positives.
    #[arg(long)]
    pub lower_bound: bool,
    #[arg(long)]
    pub per_algorithm: bool,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, num_args = 1.., required = true)]
    pub results: Vec<PathBuf>,
    #[arg(long)]
    pub per_algorithm: bool,
    /// Write the sweep as JSON instead of printing a table.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn run(cli: Cli) -> Result<(), CliError> {
    let cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    match cli.command {
        Command::Extract(a) => commands::extract(a, &cfg),
        Command::Filter(FilterCommand::Keywords(a)) => commands::filter_keywords(a, &cfg),
        Command::Filter(FilterCommand::Structural(a)) => commands::filter_structural(a, &cfg),
        Command::Classify(a) => commands::classify(a, &cfg),
        Command::Obfuscate(a) => commands::obfuscate(a, &cfg),
        Command::Split(a) => commands::split(a, &cfg),
        Command::Evaluate(a) => commands::evaluate(a, &cfg),
        Command::Report(a) => commands::report(a, &cfg),
        Command::Sweep(a) => commands::sweep(a, &cfg),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
