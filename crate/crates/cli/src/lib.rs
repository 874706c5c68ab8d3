//! Command-line front-end: single-integral evaluation, corpus verification
//! and randomized identity checks.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

pub mod eval;
pub mod identities;
pub mod verify;

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_SAMPLES: usize = 1000;
pub const DEFAULT_SEED: u64 = 42;

/// Exit statuses shared by all subcommands.
pub mod exit {
    pub const OK: i32 = 0;
    pub const USAGE: i32 = 1;
    pub const DISAGREE: i32 = 2;
    pub const NO_CLOSED_FORM: i32 = 3;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Json,
    #[value(name = "md", alias = "markdown")]
    Markdown,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Command {
    Eval,
    Verify,
    Identities,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CliConfig {
    pub command: Command,
    pub input: String,
    pub corpus_path: Option<PathBuf>,
    pub rel_tol: f64,
    pub format: Format,
    pub trace: bool,
    pub jobs: usize,
    pub seed: u64,
    pub samples: usize,
}

/// What a command wants printed, and how the process should exit.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    pub fn usage_error(message: impl Into<String>) -> Self {
        Outcome { code: exit::USAGE, stdout: String::new(), stderr: message.into() }
    }
}

#[derive(Debug, Parser)]
#[command(name = "trigbeta", version, about = "Beta-function closed forms for trigonometric integrals")]
struct Args {
    #[command(subcommand)]
    command: Cmd,

    /// Relative tolerance for agreement between closed form and quadrature
    #[arg(long = "tol", global = true, default_value_t = DEFAULT_TOL)]
    tol: f64,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Print the derivation
    #[arg(long, global = true)]
    trace: bool,

    /// Worker threads for verify (default: available parallelism)
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Reduce one integral and compare it with quadrature
    Eval {
        /// e.g. "int[0,pi/2] tan(x)^(1/2) dx"
        input: String,
    },
    /// Check every corpus entry against quadrature
    Verify {
        #[arg(long)]
        corpus: Option<PathBuf>,
    },
    /// Spot-check gamma and beta identities at random points
    Identities {
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        samples: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
}

fn available_jobs() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

impl CliConfig {
    /// Parses command-line arguments, program name first.
    pub fn try_parse_from<I, T>(args: I) -> Result<CliConfig, clap::Error>
    where
        I: IntoIterator<Item = T>,
        T: Into<OsString> + Clone,
    {
        let a = Args::try_parse_from(args)?;
        let mut cfg = CliConfig {
            command: Command::Eval,
            input: String::new(),
            corpus_path: None,
            rel_tol: a.tol,
            format: a.format,
            trace: a.trace,
            jobs: a.jobs.unwrap_or_else(available_jobs),
            seed: DEFAULT_SEED,
            samples: DEFAULT_SAMPLES,
        };
        match a.command {
            Cmd::Eval { input } => cfg.input = input,
            Cmd::Verify { corpus } => {
                cfg.command = Command::Verify;
                cfg.corpus_path = corpus;
            }
            Cmd::Identities { samples, seed } => {
                cfg.command = Command::Identities;
                cfg.samples = samples;
                cfg.seed = seed;
            }
        }
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), String> {
        if !(self.rel_tol.is_finite() && self.rel_tol > 0.0) {
            return Err(format!("--tol must be a positive number, got {}", self.rel_tol));
        }
        if self.jobs == 0 {
            return Err("--jobs must be at least 1".into());
        }
        if self.command == Command::Identities && self.samples == 0 {
            return Err("--samples must be at least 1".into());
        }
        Ok(())
    }
}

pub fn run(cfg: &CliConfig) -> Outcome {
    if let Err(msg) = cfg.validate() {
        return Outcome::usage_error(format!("error: {msg}\n"));
    }
    match cfg.command {
        Command::Eval => eval::cmd_eval(cfg),
        Command::Verify => verify::cmd_verify(cfg),
        Command::Identities => identities::cmd_identities(cfg),
    }
}

/// Parses and runs. `--help` and `--version` exit 0; any other argument
/// error is a usage error.
pub fn run_args<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match CliConfig::try_parse_from(args) {
        Ok(cfg) => run(&cfg),
        Err(e) => {
            let text = e.render().to_string();
            match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    Outcome { code: exit::OK, stdout: text, stderr: String::new() }
                }
                _ => Outcome::usage_error(text),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let cfg = CliConfig::try_parse_from(["trigbeta", "verify"]).unwrap();
        assert_eq!(cfg.command, Command::Verify);
        assert_eq!(cfg.rel_tol, DEFAULT_TOL);
        assert_eq!(cfg.format, Format::Text);
        assert!(cfg.jobs >= 1);
        assert!(!cfg.trace);

        let cfg = CliConfig::try_parse_from(["trigbeta", "identities"]).unwrap();
        assert_eq!((cfg.samples, cfg.seed), (DEFAULT_SAMPLES, DEFAULT_SEED));
    }

    #[test]
    fn flags_after_subcommand() {
        let cfg = CliConfig::try_parse_from([
            "trigbeta", "verify", "--tol", "1e-2", "--format", "md", "--jobs", "3", "--corpus", "x.json",
        ])
        .unwrap();
        assert_eq!(cfg.rel_tol, 1e-2);
        assert_eq!(cfg.format, Format::Markdown);
        assert_eq!(cfg.jobs, 3);
        assert_eq!(cfg.corpus_path, Some(PathBuf::from("x.json")));
    }

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(run_args(["trigbeta"]).code, exit::USAGE);
        assert_eq!(run_args(["trigbeta", "frobnicate"]).code, exit::USAGE);
        assert_eq!(run_args(["trigbeta", "identities", "--samples", "0"]).code, exit::USAGE);
        assert_eq!(run_args(["trigbeta", "verify", "--tol", "-1"]).code, exit::USAGE);
        assert_eq!(run_args(["trigbeta", "verify", "--jobs", "0"]).code, exit::USAGE);
        assert_eq!(run_args(["trigbeta", "--format", "xml", "verify"]).code, exit::USAGE);
        assert_eq!(run_args(["trigbeta", "--help"]).code, exit::OK);
    }
}
