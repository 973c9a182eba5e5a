//! The `kie-leakage` command line.
//!
//! Subcommands `audit`, `group`, `tune`, `resample`, `eval` and `report`
//! share one set of settings, read from an optional `--config` file and
//! overridden by flags.
//!
//! Exit codes: 0 success (and no leakage for `audit`), 1 runtime failure,
//! 2 usage or configuration error, 3 leakage found by `audit`.

mod commands;
pub mod config;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use thiserror::Error;

pub use commands::{
    cmd_audit, cmd_eval, cmd_group, cmd_report, cmd_resample, cmd_tune, EvalOutcome, Provenance,
    ResampleOutcome,
};
pub use config::{FoldMode, RunConfig, Settings};

pub const EXIT_OK: i32 = 0;
pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_LEAKAGE: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Runtime(_) => EXIT_RUNTIME,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "kie-leakage", version, about = "Template leakage audits for document IE benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Group documents by template and report test documents whose template
    /// also appears in training. Exits 3 when leakage is found.
    Audit(Flags),
    /// Group documents by template and write groups.json and histogram.csv.
    Group(Flags),
    /// Score a threshold grid against hand-labeled groups (tuning.csv).
    Tune(Flags),
    /// Write a group-atomic manifest.tsv plus fold_<i>.tsv train/val folds.
    Resample(Flags),
    /// Memorizer F1 on the original split versus a group-atomic one.
    Eval(Flags),
    /// Summarize earlier outputs into summary.md and histogram CSVs.
    Report(Flags),
}

#[derive(Debug, Clone, Default, clap::Args)]
struct Flags {
    /// key = value config file; flags override it
    #[arg(short, long)]
    config: Option<PathBuf>,
    /// funsd, sroie or generic
    #[arg(long)]
    dataset: Option<String>,
    #[arg(long)]
    data_root: Option<String>,
    /// question_overlap, business_key, shingle or shingle:<k>
    #[arg(long)]
    metric: Option<String>,
    /// Similarity threshold in (0, 1]
    #[arg(long)]
    threshold: Option<String>,
    /// train,val,test fractions summing to 1
    #[arg(long)]
    ratios: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    k_folds: Option<String>,
    #[arg(long)]
    train_fraction: Option<String>,
    #[arg(short, long)]
    output_dir: Option<String>,
    /// Hand-labeled groups as JSON, {"groups": [[..]]} or {"pairs": [[a, b]]}
    #[arg(long)]
    ground_truth: Option<String>,
    /// Comma-separated threshold grid for `tune`
    #[arg(long)]
    thresholds: Option<String>,
    /// group (default) or random
    #[arg(long)]
    fold_mode: Option<String>,
    /// Audit this manifest.tsv instead of the corpus's own split
    #[arg(long)]
    manifest: Option<String>,
    /// Model predictions to score in `eval`, a JSON list of {doc_id, label, text}
    #[arg(long)]
    predictions: Option<String>,
}

impl Flags {
    fn settings(&self) -> Result<Settings, CliError> {
        let file = match &self.config {
            Some(path) => Settings::load(path)?,
            None => Settings::default(),
        };
        let mut flags = Settings::default();
        for (key, value) in [
            ("dataset", &self.dataset),
            ("data_root", &self.data_root),
            ("metric", &self.metric),
            ("threshold", &self.threshold),
            ("ratios", &self.ratios),
            ("seed", &self.seed),
            ("k_folds", &self.k_folds),
            ("train_fraction", &self.train_fraction),
            ("output_dir", &self.output_dir),
            ("ground_truth", &self.ground_truth),
            ("thresholds", &self.thresholds),
            ("fold_mode", &self.fold_mode),
            ("manifest", &self.manifest),
            ("predictions", &self.predictions),
        ] {
            if let Some(v) = value {
                flags.set(key, v, Path::new(""))?;
            }
        }
        Ok(file.overlay(flags))
    }
}

fn execute(command: &Command) -> Result<i32, CliError> {
    let flags = match command {
        Command::Audit(f)
        | Command::Group(f)
        | Command::Tune(f)
        | Command::Resample(f)
        | Command::Eval(f)
        | Command::Report(f) => f,
    };
    let config = RunConfig::resolve(flags.settings()?)?;
    match command {
        Command::Audit(_) => {
            let report = cmd_audit(&config)?;
            println!(
                "leakage: {} of {} test documents ({:.1}%) share a template with training",
                report.n_leaked_test,
                report.n_test,
                100.0 * report.leak_fraction
            );
            Ok(if report.n_leaked_test > 0 { EXIT_LEAKAGE } else { EXIT_OK })
        }
        Command::Group(_) => {
            let groups = cmd_group(&config)?;
            println!(
                "{} documents in {} groups, largest {}",
                groups.num_documents(),
                groups.groups.len(),
                groups.max_group_size()
            );
            Ok(EXIT_OK)
        }
        Command::Tune(_) => {
            let table = cmd_tune(&config)?;
            if let Some(best) = table.selected() {
                println!("best threshold {} (pairwise F1 {:.4})", best.threshold, best.f1);
            }
            Ok(EXIT_OK)
        }
        Command::Resample(_) => {
            let out = cmd_resample(&config)?;
            let m = &out.manifest;
            println!(
                "train {} / val {} / test {}, {} folds",
                m.count(crate::resampling::Split::Train),
                m.count(crate::resampling::Split::Val),
                m.count(crate::resampling::Split::Test),
                out.folds.len()
            );
            Ok(EXIT_OK)
        }
        Command::Eval(_) => {
            let out = cmd_eval(&config)?;
            println!(
                "memorizer F1: leaky {:.4}, clean {:.4}, gap {:.4}",
                out.gap.f1_leaky, out.gap.f1_clean, out.gap.gap
            );
            Ok(EXIT_OK)
        }
        Command::Report(_) => {
            let path = cmd_report(&config)?;
            println!("wrote {}", path.display());
            Ok(EXIT_OK)
        }
    }
}

/// Parses `args` (program name first) and runs one subcommand, returning
/// the process exit code. Diagnostics go to standard error.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(&cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("kie-leakage: {e}");
            e.exit_code()
        }
    }
}
