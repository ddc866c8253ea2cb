//! `satz`: train, apply and evaluate a sentence boundary labeler.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};

use satz::segmenter::FlagMode;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(satz::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Core(satz::Error::Argument(_)) => 1,
            CliError::Core(satz::Error::Training { .. }) => 3,
            CliError::Core(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<satz::Error> for CliError {
    fn from(e: satz::Error) -> Self {
        CliError::Core(e)
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "satz",
    version,
    about = "Sentence boundary disambiguation with a trainable network"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Train a network on sentinel-annotated training and cross-validation texts
    #[command(visible_alias = "trainnet")]
    Train(TrainArgs),
    /// Insert sentinels after the sentence boundaries of plain texts
    #[command(visible_alias = "bound")]
    Label(LabelArgs),
    /// Score a trained network, or an already labeled text, against gold annotation
    Eval(EvalArgs),
    /// Re-classify cached scores over several threshold pairs
    Sweep(SweepArgs),
    /// Count candidates and boundaries in annotated texts
    Stats(StatsArgs),
    /// Show the resolved tags and descriptor array of every token
    #[command(visible_alias = "getfreqs")]
    Inspect(InspectArgs),
    /// Write a synthetic annotated corpus and matching lexicon
    Gen(GenArgs),
}

#[derive(Args, Debug)]
pub struct CommonArgs {
    /// key=value configuration file; command-line flags take precedence
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Sentence boundary marker in annotated text
    #[arg(long, default_value = satz::tokenizer::DEFAULT_SENTINEL)]
    pub sentinel: String,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum FlagArg {
    /// Capitalized and directly after a candidate
    #[default]
    AfterCandidate,
    /// Capitalized and directly after any punctuation
    AfterPunctuation,
}

impl FromStr for FlagArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        FlagArg::from_str_value(s)
    }
}

impl FlagArg {
    fn from_str_value(s: &str) -> Result<Self, String> {
        <FlagArg as ValueEnum>::from_str(s, true)
    }

    pub fn mode(self) -> FlagMode {
        match self {
            FlagArg::AfterCandidate => FlagMode::AfterCandidate,
            FlagArg::AfterPunctuation => FlagMode::AfterPunctuation,
        }
    }
}

#[derive(Args, Debug)]
pub struct LexiconArgs {
    /// Directory holding words.dict, chars.dict, endings.dict and optionally abbrev.dict, propnoun.dict
    #[arg(long, value_name = "DIR")]
    pub lexicon_dir: Option<PathBuf>,
    /// Tag to category mapping file [default: built-in Brown mapping]
    #[arg(long, value_name = "FILE")]
    pub mapping: Option<PathBuf>,
    /// Proper-noun share for unknown capitalized words
    #[arg(long, default_value_t = 0.9)]
    pub np_share_unknown: f64,
    /// Proper-noun share mixed into known capitalized words
    #[arg(long, default_value_t = 0.5)]
    pub np_share_known: f64,
    /// When the second capitalization flag is set
    #[arg(long, value_enum, default_value_t)]
    pub flag_mode: FlagArg,
}

#[derive(Args, Debug)]
pub struct ModelArgs {
    /// Weights file
    #[arg(long, default_value = "weights.net")]
    pub weights: PathBuf,
    /// Context tokens around each candidate (even)
    #[arg(long, short = 'k', default_value_t = 6)]
    pub context: usize,
}

#[derive(Args, Debug)]
pub struct ThresholdArgs {
    /// Scores below t0 are not boundaries
    #[arg(long, default_value_t = 0.5)]
    pub t0: f64,
    /// Scores at or above t1 are boundaries
    #[arg(long, default_value_t = 0.5)]
    pub t1: f64,
}

#[derive(Args, Debug)]
pub struct TrainArgs {
    /// Annotated training text
    pub training: PathBuf,
    /// Annotated cross-validation text
    pub cross: PathBuf,
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub lexicon: LexiconArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    /// Hidden units
    #[arg(long, short = 'j', default_value_t = 2)]
    pub hidden: usize,
    /// Learning rate
    #[arg(long, default_value_t = 0.1)]
    pub eta: f64,
    /// Seed for weight initialization and shuffling
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 5000)]
    pub max_epochs: usize,
    /// Epochs without cross-validation improvement before stopping
    #[arg(long, default_value_t = 50)]
    pub patience: usize,
    #[arg(long, default_value_t = 20)]
    pub min_epochs: usize,
    /// Initial weights are uniform in [-r, r]
    #[arg(long, default_value_t = 0.5)]
    pub init_range: f64,
    /// Shuffle training cases every epoch
    #[arg(long)]
    pub shuffle: bool,
}

#[derive(Args, Debug)]
pub struct LabelArgs {
    /// Plain texts to label
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub lexicon: LexiconArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub thresholds: ThresholdArgs,
    /// Marker for sites scored between t0 and t1
    #[arg(long, default_value = satz::segmenter::DEFAULT_AMBIGUOUS_MARKER)]
    pub marker: String,
    /// Output file, or directory when several inputs are given [default: standard output]
    #[arg(long, short = 'o')]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    #[default]
    Table,
    /// key=value lines
    Kv,
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    /// Gold annotated text
    pub gold: PathBuf,
    /// Compare this labeled output instead of running the network
    #[arg(long, value_name = "FILE", conflicts_with = "baseline")]
    pub labeled: Option<PathBuf>,
    /// Evaluate the label-everything baseline instead of the network
    #[arg(long)]
    pub baseline: bool,
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub lexicon: LexiconArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub thresholds: ThresholdArgs,
    /// Marker for ambiguous sites in a labeled file
    #[arg(long, default_value = satz::segmenter::DEFAULT_AMBIGUOUS_MARKER)]
    pub marker: String,
    #[arg(long, value_enum, default_value_t)]
    pub format: ReportFormat,
    /// Also print an approximate breakdown of errors by site shape
    #[arg(long)]
    pub errors: bool,
    #[arg(long, short = 'o')]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    /// Gold annotated text
    pub gold: PathBuf,
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub lexicon: LexiconArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    /// Threshold pair as t0,t1; repeatable [default: 0.5,0.5 0.4,0.6 0.3,0.7 0.2,0.8 0.1,0.9]
    #[arg(long = "pair", value_name = "T0,T1")]
    pub pairs: Vec<String>,
    #[arg(long, short = 'o')]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct StatsArgs {
    /// Annotated texts
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    #[command(flatten)]
    pub common: CommonArgs,
    /// Lexicon whose abbreviations the tokenizer should know
    #[arg(long, value_name = "DIR")]
    pub lexicon_dir: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct InspectArgs {
    /// Text to inspect, or - for standard input
    pub input: PathBuf,
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub lexicon: LexiconArgs,
    #[arg(long, short = 'o')]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    #[arg(long, default_value_t = 500)]
    pub sentences: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[command(flatten)]
    pub common: CommonArgs,
    /// Fraction of sentences ending in an abbreviation
    #[arg(long, default_value_t = 0.06)]
    pub abbreviation_eos_rate: f64,
    /// Fraction of numbers written with a decimal point
    #[arg(long, default_value_t = 0.5)]
    pub decimal_rate: f64,
    /// Fraction of sentences with a title before a name
    #[arg(long, default_value_t = 0.12)]
    pub title_rate: f64,
    /// Also write the matching lexicon files here
    #[arg(long, value_name = "DIR")]
    pub lexicon_out: Option<PathBuf>,
    /// Corpus file [default: standard output]
    #[arg(long, short = 'o')]
    pub out: Option<PathBuf>,
}

fn run(args: impl IntoIterator<Item = std::ffi::OsString>) -> Result<(), CliError> {
    let matches = match Cli::command().try_get_matches_from(args) {
        Ok(m) => m,
        Err(e) => {
            // help and version are not failures
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            if code == 0 {
                return Ok(());
            }
            return Err(CliError::Usage(String::new()));
        }
    };
    let cli = Cli::from_arg_matches(&matches).map_err(|e| CliError::Usage(e.to_string()))?;
    let sub = matches.subcommand().map(|(_, m)| m).expect("subcommand is required");
    match cli.command {
        Command::Train(a) => commands::train(&a, sub),
        Command::Label(a) => commands::label(&a, sub),
        Command::Eval(a) => commands::eval(&a, sub),
        Command::Sweep(a) => commands::sweep(&a, sub),
        Command::Stats(a) => commands::stats(&a, sub),
        Command::Inspect(a) => commands::inspect(&a, sub),
        Command::Gen(a) => commands::gen(&a, sub),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(std::env::args_os()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let msg = e.to_string();
            if !msg.is_empty() {
                eprintln!("satz: {msg}");
            }
            ExitCode::from(e.exit_code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        let core = |e| CliError::Core(e).exit_code();
        assert_eq!(CliError::Usage("x".into()).exit_code(), 1);
        assert_eq!(core(satz::Error::Argument("x".into())), 1);
        assert_eq!(core(satz::Error::Format("x".into())), 2);
        assert_eq!(core(satz::Error::Decode { offset: 3 }), 2);
        assert_eq!(
            core(satz::Error::Training {
                epoch: 4,
                message: "x".into()
            }),
            3
        );
    }

    #[test]
    fn flag_mode_parses_from_config_text() {
        assert_eq!(
            "after-punctuation".parse::<FlagArg>().unwrap(),
            FlagArg::AfterPunctuation
        );
        assert!("sideways".parse::<FlagArg>().is_err());
    }
}
