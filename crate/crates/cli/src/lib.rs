//! The `clc` command line: tally a ballot file or a Llull matrix, and run
//! the property suites.

pub mod report;

use clap::{Args, Parser, Subcommand, ValueEnum};
use clc_core::projection::ProjectionError;
use clc_core::rational::{parse_rational, Rational};
use clc_core::{
    parse_matrix_csv, parse_profile, run_matrix, run_profile, InterpretationRules,
    ListedVsUnlisted, PipelineError, RateFormula, RunOptions, RunReport, UnlistedPair, Variant,
};
use clc_harness::{run_suite, Suite};
use std::io::{self, Write};
use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Parser)]
#[command(
    name = "clc",
    version,
    about = "Continuous ratings from ranked, truncated or approval ballots"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Rate the candidates of a ballot file or Llull matrix.
    Run(RunArgs),
    /// Run property suites on generated profiles.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    Main,
    Codual,
    Balanced,
    #[value(name = "margin-based", alias = "margin")]
    MarginBased,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Main => Variant::Main,
            VariantArg::Codual => Variant::Codual,
            VariantArg::Balanced => Variant::Balanced,
            VariantArg::MarginBased => Variant::MarginBased,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ListedArg {
    Preferred,
    Noinfo,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum UnlistedArg {
    Noinfo,
    Tied,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FormulaArg {
    Main,
    #[value(alias = "alternative")]
    Alt,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Ballot file, or a matrix CSV with --matrix.
    pub input: PathBuf,
    #[arg(long, value_enum, default_value = "main")]
    pub variant: VariantArg,
    /// A listed candidate against an unlisted one.
    #[arg(long, value_enum, default_value = "preferred")]
    pub listed_vs_unlisted: ListedArg,
    /// Two unlisted candidates.
    #[arg(long, value_enum, default_value = "noinfo")]
    pub unlisted_pair: UnlistedArg,
    /// Total number of voters V (integer, decimal or p/q); defaults to the
    /// total ballot weight.
    #[arg(long, value_parser = parse_total)]
    pub total_voters: Option<Rational>,
    #[arg(long, value_enum, default_value = "main")]
    pub formula: FormulaArg,
    /// Read every ballot as its approved set only.
    #[arg(long)]
    pub approval_only: bool,
    /// Input is a Llull matrix CSV.
    #[arg(long)]
    pub matrix: bool,
    /// Print intermediate matrices.
    #[arg(long)]
    pub intermediates: bool,
    #[arg(long)]
    pub json: bool,
}

fn parse_total(text: &str) -> Result<Rational, String> {
    parse_rational(text).ok_or_else(|| format!("`{text}` is not a number"))
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Suite name, or `all`.
    #[arg(long, default_value = "all")]
    pub suite: String,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Random cases per suite.
    #[arg(long, default_value_t = 100)]
    pub cases: usize,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Infeasible(String),
    #[error("{0}")]
    NotAdmissible(String),
    #[error("verification failed: {0}")]
    Verification(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } => 1,
            CliError::Parse(_) => 2,
            CliError::Infeasible(_) => 3,
            CliError::NotAdmissible(_) => 4,
            CliError::Verification(_) => 5,
        }
    }

    fn from_pipeline(path: &str, e: PipelineError) -> Self {
        let message = format!("{path}: {e}");
        match e {
            PipelineError::Projection(ProjectionError::Qp(_)) => CliError::Infeasible(message),
            PipelineError::Projection(ProjectionError::Order(_)) => {
                CliError::NotAdmissible(message)
            }
            _ => CliError::Parse(message),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(source: io::Error) -> Self {
        CliError::Io {
            path: "<output>".into(),
            source,
        }
    }
}

impl RunArgs {
    pub fn options(&self) -> RunOptions {
        RunOptions {
            variant: self.variant.into(),
            rules: InterpretationRules {
                listed_vs_unlisted: match self.listed_vs_unlisted {
                    ListedArg::Preferred => ListedVsUnlisted::Preferred,
                    ListedArg::Noinfo => ListedVsUnlisted::NoInfo,
                },
                unlisted_pair: match self.unlisted_pair {
                    UnlistedArg::Noinfo => UnlistedPair::NoInfo,
                    UnlistedArg::Tied => UnlistedPair::Tied,
                },
            },
            total_voters: self.total_voters.clone(),
            formula: match self.formula {
                FormulaArg::Main => RateFormula::Main,
                FormulaArg::Alt => RateFormula::Alternative,
            },
            approval_only: self.approval_only,
            ..RunOptions::default()
        }
    }
}

/// Reads and rates the input named by `args`.
pub fn tally(args: &RunArgs) -> Result<RunReport, CliError> {
    let path = args.input.display().to_string();
    let text = std::fs::read_to_string(&args.input).map_err(|source| CliError::Io {
        path: path.clone(),
        source,
    })?;
    let options = args.options();
    if args.matrix {
        let input = parse_matrix_csv(&text).map_err(|e| CliError::Parse(format!("{path}: {e}")))?;
        let llull = match &options.total_voters {
            Some(v) => clc_core::LlullMatrix::from_absolute(input.llull.absolute(), v.clone())
                .map_err(|e| CliError::Parse(format!("{path}: {e}")))?,
            None => input.llull,
        };
        run_matrix(input.candidates, llull, options).map_err(|e| CliError::from_pipeline(&path, e))
    } else {
        let profile = parse_profile(&text).map_err(|e| CliError::Parse(format!("{path}: {e}")))?;
        run_profile(&profile, options).map_err(|e| CliError::from_pipeline(&path, e))
    }
}

pub fn execute(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Run(args) => {
            let report = tally(args)?;
            if args.json {
                writeln!(out, "{}", report::to_json(&report, args.intermediates))?;
            } else {
                write!(out, "{}", report::to_text(&report, args.intermediates))?;
            }
            Ok(())
        }
        Command::Verify(args) => verify(args, out),
    }
}

fn verify(args: &VerifyArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let suites: Vec<Suite> = if args.suite == "all" {
        Suite::ALL.to_vec()
    } else {
        vec![args.suite.parse().map_err(CliError::Parse)?]
    };
    let mut failed = Vec::new();
    for suite in suites {
        let report = run_suite(suite, args.seed, args.cases);
        writeln!(out, "{report}")?;
        for note in &report.notes {
            writeln!(out, "  note: {note}")?;
        }
        if let Some(first) = report.failures.first() {
            writeln!(out, "{first}")?;
            failed.push(suite.name());
        }
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Verification(failed.join(", ")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clc_core::order::OrderError;
    use clc_core::qp::QpError;

    #[test]
    fn exit_codes_follow_the_error_kind() {
        let infeasible =
            PipelineError::Projection(ProjectionError::Qp(QpError::Infeasible("empty".into())));
        assert_eq!(CliError::from_pipeline("f", infeasible).exit_code(), 3);
        let order = PipelineError::Projection(ProjectionError::Order(OrderError::NotAdmissible {
            before: 1,
            after: 0,
        }));
        assert_eq!(CliError::from_pipeline("f", order).exit_code(), 4);
        let domain = PipelineError::Llull(clc_core::LlullError::NonPositiveTotal);
        assert_eq!(CliError::from_pipeline("f", domain).exit_code(), 2);
        assert_eq!(CliError::Verification("x".into()).exit_code(), 5);
    }

    #[test]
    fn flags_map_to_options() {
        let cli = Cli::try_parse_from([
            "clc",
            "run",
            "in.txt",
            "--variant",
            "codual",
            "--unlisted-pair",
            "tied",
            "--listed-vs-unlisted",
            "noinfo",
            "--total-voters",
            "7/2",
            "--formula",
            "alt",
        ])
        .unwrap();
        let Command::Run(args) = cli.command else {
            panic!("expected run")
        };
        let o = args.options();
        assert_eq!(o.variant, Variant::Codual);
        assert_eq!(o.rules.unlisted_pair, UnlistedPair::Tied);
        assert_eq!(o.rules.listed_vs_unlisted, ListedVsUnlisted::NoInfo);
        assert_eq!(o.total_voters, Some(clc_core::rational::ratio(7, 2)));
        assert_eq!(o.formula, RateFormula::Alternative);
    }
}
