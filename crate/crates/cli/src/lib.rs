//! Command-line front end for `nilgen-core`.
//!
//! Every subcommand maps onto one library operation, prints a key=value
//! [`RunReport`] and writes artifacts to `--out`. Exit codes: 0 for success
//! or an all-pass check, 1 for a property violation (certificates are
//! printed in the report), 2 for usage and input errors.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use nilgen_core::format::{
    parse_alt, parse_document, serialize_alt, serialize_document, AltFile, Document, FormatError,
};
use nilgen_core::Error as CoreError;

pub mod certificate;
mod commands;
pub mod report;

pub use certificate::recheck;
pub use report::{extract_certificates, RunReport};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("{path}: {source}")]
    Format { path: PathBuf, source: FormatError },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0}")]
    Usage(String),
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(
    name = "nilgen",
    version,
    about = "Finite 2-nilpotent exponent-p groups and their alternating systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Seed {
    /// Seed for every random choice; never drawn from entropy.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args)]
struct Input {
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
}

#[derive(Debug, Args)]
struct Output {
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Relatively free system on `--rank` generators.
    GenFree {
        #[arg(short, default_value_t = 3)]
        p: u64,
        #[arg(long)]
        rank: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Amalgam of `--in A` and `--other C` over their common prefix of
    /// dimension `--base`.
    Amalgamate {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_name = "FILE")]
        other: PathBuf,
        #[arg(long, default_value_t = 0)]
        base: usize,
        /// Seeded random values on the new cross pairs instead of zero.
        #[arg(long)]
        random_filler: bool,
        #[command(flatten)]
        seed: Seed,
        #[command(flatten)]
        out: Output,
    },
    /// Finite approximation of the generic limit.
    BuildGeneric {
        #[arg(short, default_value_t = 3)]
        p: u64,
        #[arg(short, default_value_t = 1)]
        n: usize,
        #[arg(short, default_value_t = 2)]
        t: usize,
        #[arg(long, default_value_t = 2)]
        rounds: usize,
        /// Embedding enumeration budget per base before sampling.
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long)]
        random_filler: bool,
        #[command(flatten)]
        seed: Seed,
        #[command(flatten)]
        out: Output,
    },
    /// Axiom checks: group laws, centre equal to P, extension property to `-t`.
    CheckSigma {
        #[command(flatten)]
        input: Input,
        #[arg(short, default_value_t = 2)]
        t: usize,
        /// Axioms to check (1, 2, 3); all when absent.
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
        axiom: Vec<u8>,
        /// Embedding budget of the extension check before sampling.
        #[arg(long)]
        budget: Option<u64>,
        /// Random triples for the group-law check of large groups.
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[command(flatten)]
        seed: Seed,
    },
    /// Centre, derived subgroup and class flags.
    Classify {
        #[command(flatten)]
        input: Input,
    },
    /// Isomorphism test between `--in` and `--other`.
    Iso {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_name = "FILE")]
        other: PathBuf,
    },
    /// First embedding of `--in` into `--other`.
    Embed {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_name = "FILE")]
        other: PathBuf,
    },
    /// Quantifier-free type code of set `a`; compared with set `b` if present.
    Qftype {
        #[command(flatten)]
        input: Input,
    },
    /// Whether `a` is independent from `c` over `b`.
    Indep {
        #[command(flatten)]
        input: Input,
    },
    /// Smallest subset of `a` over which `abar` is independent from `a`.
    LocalBase {
        #[command(flatten)]
        input: Input,
    },
    /// Random Kim-Pillay law suite; `--out` names a directory receiving
    /// one file per certificate.
    KpSuite {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        /// Run against a deliberately broken relation (harness self-test).
        #[arg(long)]
        mutate: bool,
        #[command(flatten)]
        seed: Seed,
        #[command(flatten)]
        out: Output,
    },
    /// Exhaustive rank-one forking law over all subspace pairs.
    SuRankCheck {
        #[command(flatten)]
        input: Input,
        /// Restrict to the leading coordinates.
        #[arg(long)]
        prefix: Option<usize>,
    },
    /// Realise the type of `abar` over `b` independently from `a`.
    Existence {
        #[command(flatten)]
        input: Input,
        /// A larger stage having the input as a prefix to place witnesses in.
        #[arg(long, value_name = "FILE")]
        realize_in: Option<PathBuf>,
        #[command(flatten)]
        out: Output,
    },
    /// Common realisation of `a0` over `m b0` and `a1` over `m b1`.
    IndepAmalgam {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        out: Output,
    },
    /// Independence-property witnesses in a central product of planes.
    IpWitness {
        #[arg(short, default_value_t = 3)]
        p: u64,
        #[arg(short, default_value_t = 5)]
        m: usize,
        /// Bitmask of the subset; every subset when absent.
        #[arg(long)]
        subset: Option<u64>,
    },
    /// Chain of commuting planes sharing one commutator.
    ExtractD1 {
        #[command(flatten)]
        input: Input,
        #[arg(short, default_value_t = 2)]
        k: usize,
    },
    /// Tree-property array over a free system.
    Tp2 {
        #[arg(long)]
        rows: usize,
        #[arg(long)]
        cols: usize,
        #[arg(short, default_value_t = 3)]
        p: u64,
        #[arg(long, conflicts_with = "path")]
        all_paths: bool,
        /// A path `f(0),f(1),...`; repeatable.
        #[arg(long, action = clap::ArgAction::Append)]
        path: Vec<String>,
    },
}

/// Parses `argv` (program name first), runs the command, writes the report
/// to `out` and diagnostics to `err`, and returns the exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return if code == 0 { 0 } else { 2 };
        }
    };
    let echo: Vec<String> = argv
        .iter()
        .skip(1)
        .map(|a| a.to_string_lossy().into_owned())
        .collect();
    match commands::execute(cli.command, echo.join(" ")) {
        Ok(report) => {
            let _ = out.write_all(report.render().as_bytes());
            report.status()
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn load_alt(path: &Path) -> CliResult<AltFile> {
    parse_alt(&read(path)?).map_err(|source| CliError::Format {
        path: path.to_path_buf(),
        source,
    })
}

fn load_doc(path: &Path) -> CliResult<Document> {
    parse_document(&read(path)?).map_err(|source| CliError::Format {
        path: path.to_path_buf(),
        source,
    })
}

fn save_alt(out: &Output, file: &AltFile) -> CliResult<()> {
    match &out.out {
        Some(path) => write(path, &serialize_alt(file)),
        None => Ok(()),
    }
}

fn save_doc(out: &Output, doc: &Document) -> CliResult<()> {
    match &out.out {
        Some(path) => write(path, &serialize_document(doc)),
        None => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(
            std::iter::once("nilgen").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run_str(&[]).0, 2);
        assert_eq!(run_str(&["frobnicate"]).0, 2);
        assert_eq!(run_str(&["tp2", "--rows", "x", "--cols", "2"]).0, 2);
        let (code, _, err) = run_str(&["classify", "--in", "/nonexistent/file.alt"]);
        assert_eq!(code, 2);
        assert!(err.starts_with("error: "));
    }

    #[test]
    fn help_exits_zero() {
        let (code, out, _) = run_str(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("build-generic"));
    }

    #[test]
    fn ip_witness_all_subsets() {
        let (code, out, _) = run_str(&["ip-witness", "-m", "3"]);
        assert_eq!(code, 0);
        assert!(out.contains("trials=8\npasses=8\nfailures=0\n"));
    }
}
