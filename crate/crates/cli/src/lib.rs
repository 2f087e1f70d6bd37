//! The `sms` command surface: campaign runs, statistics, power analysis,
//! the degeneration check and text reports over a result bundle.

pub mod bundle;
pub mod commands;
pub mod render;

use clap::{Parser, Subcommand, ValueEnum};
use sms_core::HarnessError;
use std::fmt;
use std::path::PathBuf;

pub const EXIT_OK: i32 = 0;
pub const EXIT_OTHER: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_MISSING: i32 = 3;
pub const EXIT_MISMATCH: i32 = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn other(message: impl Into<String>) -> CliError {
        CliError { code: EXIT_OTHER, message: message.into() }
    }

    pub fn config(message: impl Into<String>) -> CliError {
        CliError { code: EXIT_CONFIG, message: message.into() }
    }

    pub fn missing(message: impl Into<String>) -> CliError {
        CliError { code: EXIT_MISSING, message: message.into() }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

/// Maps harness failures onto the documented exit statuses.
pub fn exit_code(e: &HarnessError) -> i32 {
    match e {
        HarnessError::ConfigInvalid(_)
        | HarnessError::InvalidArgument(_)
        | HarnessError::UnreachableTarget { .. }
        | HarnessError::ConfigIncomplete(_)
        | HarnessError::UnknownPut(_)
        | HarnessError::UnknownMetaPattern => EXIT_CONFIG,
        HarnessError::IncompleteInput(_) => EXIT_MISSING,
        HarnessError::MismatchDetected { .. } | HarnessError::TrivialisationViolated(_) => EXIT_MISMATCH,
        _ => EXIT_OTHER,
    }
}

impl From<HarnessError> for CliError {
    fn from(e: HarnessError) -> CliError {
        CliError { code: exit_code(&e), message: e.to_string() }
    }
}

#[derive(Debug, Parser)]
#[command(name = "sms", version, about = "Semantic Mutation Score campaigns over scientific kernels")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    E1e2,
    E1,
    E2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PowerModeArg {
    Plugin,
    Stipulated,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the full campaign and write the result bundle.
    Run {
        /// TOML file with CampaignConfig fields; defaults apply when absent.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        keq: Option<usize>,
        #[arg(long)]
        replicates: Option<usize>,
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
        /// Output directory; overrides `output_directory` from the config.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads; results do not depend on this.
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Recompute the statistics report from a bundle.
    Stats {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Power of the aligned-versus-cross delta.
    Power {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "plugin")]
        mode: PowerModeArg,
        /// Target delta for the stipulated alternative.
        #[arg(long, default_value_t = 0.474)]
        target: f64,
        /// Simulated studies; 5000 for plug-in, 2000 for stipulated.
        #[arg(long)]
        nsim: Option<usize>,
        /// Defaults to the campaign seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Check that SMS reduces to the classical mutation score on A1-A3.
    DegenerateCheck {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Directory for degeneration_report.json; printed only when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Text heatmap, class marginals, verdicts and coverage of a bundle.
    Report {
        #[arg(long = "in")]
        input: PathBuf,
    },
}

/// Runs one parsed invocation, printing its human-readable output.
pub fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run { config, seed, keq, replicates, mode, out, workers } => {
            let args = commands::RunArgs { config, seed, keq, replicates, mode, out, workers };
            let summary = commands::run(&args)?;
            print!("{}", render::run_summary(&summary));
        }
        Command::Stats { input } => {
            let file = commands::stats(&input)?;
            print!("{}", render::stats_summary(&file));
        }
        Command::Power { input, mode, target, nsim, seed } => {
            let report = commands::power(&input, mode, target, nsim, seed)?;
            print!("{}", render::power(&report.data));
        }
        Command::DegenerateCheck { seed, out } => {
            let reports = commands::degenerate_check(seed, out.as_deref())?;
            print!("{}", render::degeneration(&reports.data));
        }
        Command::Report { input } => {
            print!("{}", commands::report(&input)?);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harness_errors_map_to_documented_statuses() {
        let cases = [
            (HarnessError::ConfigInvalid("x".into()), EXIT_CONFIG),
            (HarnessError::InvalidArgument("x".into()), EXIT_CONFIG),
            (HarnessError::UnreachableTarget { target: 0.5, observed: 0.6 }, EXIT_CONFIG),
            (HarnessError::ConfigIncomplete("x".into()), EXIT_CONFIG),
            (HarnessError::IncompleteInput("x".into()), EXIT_MISSING),
            (HarnessError::MismatchDetected { put: "A1".into(), sms: 1.0, ms: 0.5 }, EXIT_MISMATCH),
            (HarnessError::TrivialisationViolated("x".into()), EXIT_MISMATCH),
            (HarnessError::NonFiniteOutput, EXIT_OTHER),
        ];
        for (e, code) in cases {
            assert_eq!(CliError::from(e.clone()).code, code, "{e}");
        }
    }

    #[test]
    fn flags_parse() {
        let cli = Cli::try_parse_from(["sms", "run", "--seed", "3", "--mode", "e2", "--workers", "2"]).unwrap();
        match cli.command {
            Command::Run { seed, mode, workers, .. } => {
                assert_eq!((seed, mode, workers), (Some(3), Some(ModeArg::E2), Some(2)));
            }
            other => panic!("{other:?}"),
        }
        assert!(Cli::try_parse_from(["sms", "run", "--mode", "e3"]).is_err());
        assert!(Cli::try_parse_from(["sms", "power", "--in", "d", "--mode", "stipulated", "--target", "0.4"]).is_ok());
    }
}
