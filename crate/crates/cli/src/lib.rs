//! Command-line front end: the workspace language, CSV ingestion, Graphviz
//! output and the `regcalc` subcommands.
//!
//! [`run`] executes one invocation and returns its exit code and output
//! instead of touching the process, so it can be driven from tests.

pub mod commands;
pub mod dot;
pub mod dsl;
pub mod ingest;

use std::path::{Path, PathBuf};

use clap::Parser;

pub use commands::{run_command, Command, CommandError, Options, Output};
pub use dsl::{parse_dsl, DslError, DslErrorKind, Workspace};
pub use ingest::{ingest_csv, IngestError};

/// Exit code for an error of any kind.
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "regcalc", version, about = "Wiring diagrams, graphical terms and finite models")]
pub struct Cli {
    /// Workspace file.
    pub file: PathBuf,
    /// Extra file with domains and relations, loaded after the workspace.
    #[arg(long, global = true)]
    pub model: Option<PathBuf>,
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Search bound for `axioms`: largest arity and tuple count enumerated.
    #[arg(long, global = true)]
    pub bound: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

fn load_file(ws: &mut Workspace, path: &Path) -> Result<(), String> {
    let src = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    ws.load(&src, path.parent())
        .map_err(|e| format!("{}:{e}", path.display()))
}

/// Runs one invocation; `args` includes the program name.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome {
                    code: EXIT_ERROR,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                Outcome {
                    code: 0,
                    stdout: text,
                    stderr: String::new(),
                }
            };
        }
    };
    let fail = |msg: String| Outcome {
        code: EXIT_ERROR,
        stdout: String::new(),
        stderr: format!("error: {msg}\n"),
    };
    let mut ws = Workspace::default();
    if let Err(e) = load_file(&mut ws, &cli.file) {
        return fail(e);
    }
    if let Some(m) = &cli.model {
        if let Err(e) = load_file(&mut ws, m) {
            return fail(e);
        }
    }
    let opts = Options {
        json: cli.json,
        bound: cli.bound,
    };
    match run_command(&ws, &cli.command, opts) {
        Ok(out) => Outcome {
            code: out.code,
            stdout: out.stdout,
            stderr: String::new(),
        },
        Err(e) => fail(e.to_string()),
    }
}
