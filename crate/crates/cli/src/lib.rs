//! Command-line front end for `dml`.
//!
//! [`run`] is the whole program minus process plumbing, so tests can drive
//! it directly. Exit codes: 0 success, 1 violation or failed verification,
//! 2 usage, I/O or parse error.

mod commands;
mod demo;

use std::ffi::OsString;
use std::fmt;
use std::io::IsTerminal;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

pub use demo::DEMOS;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommandResult {
    pub exit_code: i32,
    pub report: String,
    /// Line-oriented `key=value` pairs, in emission order.
    pub machine_report: Vec<(String, String)>,
}

impl CommandResult {
    pub fn machine_text(&self) -> String {
        self.machine_report
            .iter()
            .map(|(k, v)| format!("{k}={v}\n"))
            .collect()
    }

    /// First value recorded under `key`.
    pub fn get(&self, key: &str) -> Option<&str> {
        self.machine_report
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn get_all<'a>(&'a self, key: &'a str) -> impl Iterator<Item = &'a str> + 'a {
        self.machine_report
            .iter()
            .filter(move |(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "dml",
    version,
    about = "Pushouts, OO constructions and code skeletons for diagrammatic models"
)]
struct Cli {
    /// Rewriting depth bound for path equality.
    #[arg(long, global = true, default_value_t = dml_core::DEFAULT_DEPTH)]
    depth: usize,
    /// Print the key=value report instead of the human one.
    #[arg(long, global = true)]
    machine: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DialectArg {
    Curly,
    Interface,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PolicyArg {
    Qualified,
    Opaque,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse and check a diagram.
    Validate { file: PathBuf },
    /// Compute the pushout of a named span.
    Pushout {
        file: PathBuf,
        #[arg(long)]
        span: String,
        #[arg(long)]
        vertex: String,
        #[arg(long, value_enum, default_value_t = PolicyArg::Qualified)]
        naming: PolicyArg,
    },
    /// Check that a declared pushout cone is a pushout.
    Verify {
        file: PathBuf,
        #[arg(long)]
        cone: String,
    },
    /// Name the OO construction a declared pushout expresses.
    Classify {
        file: PathBuf,
        #[arg(long)]
        pushout: String,
    },
    /// Write one source skeleton per specification.
    Skeleton {
        file: PathBuf,
        #[arg(long, value_enum)]
        dialect: DialectArg,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write a Graphviz rendering.
    Dot {
        file: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Decide whether two parallel paths are equal.
    Paths {
        file: PathBuf,
        #[arg(long)]
        lhs: String,
        #[arg(long)]
        rhs: String,
    },
    /// Run a bundled diagram end to end.
    Demo {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(DEMOS.iter().map(|(n, _)| *n)))]
        name: String,
        /// Also write skeletons and DOT into this directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Why a command stopped.
#[derive(Debug)]
pub(crate) enum Failure {
    /// Exit 2.
    Input { code: &'static str, message: String },
    /// Exit 1.
    Domain { code: String, message: String },
}

impl Failure {
    pub(crate) fn domain(code: impl Into<String>, message: impl fmt::Display) -> Self {
        Failure::Domain {
            code: code.into(),
            message: message.to_string(),
        }
    }

    fn exit_code(&self) -> i32 {
        match self {
            Failure::Input { .. } => 2,
            Failure::Domain { .. } => 1,
        }
    }
}

impl From<dml_core::dsl::DslError> for Failure {
    fn from(e: dml_core::dsl::DslError) -> Self {
        match e {
            dml_core::dsl::DslError::Parse(_) => Failure::Input {
                code: "ParseError",
                message: e.to_string(),
            },
            other => Failure::domain(other.code(), other),
        }
    }
}

/// Human and machine output built side by side.
pub(crate) struct Report {
    color: bool,
    lines: Vec<String>,
    pairs: Vec<(String, String)>,
    failed: bool,
}

impl Report {
    fn new(color: bool) -> Self {
        Report {
            color,
            lines: Vec::new(),
            pairs: Vec::new(),
            failed: false,
        }
    }

    pub(crate) fn line(&mut self, text: impl Into<String>) {
        self.lines.push(text.into());
    }

    pub(crate) fn kv(&mut self, key: impl Into<String>, value: impl fmt::Display) {
        self.pairs.push((key.into(), value.to_string()));
    }

    fn paint(&self, code: &str, text: &str) -> String {
        if self.color {
            format!("\x1b[{code}m{text}\x1b[0m")
        } else {
            text.to_owned()
        }
    }

    pub(crate) fn good(&mut self, text: &str) {
        let t = self.paint("32", "ok");
        self.lines.push(format!("{t} {text}"));
    }

    /// A failed check: the command will exit 1.
    pub(crate) fn bad(&mut self, text: &str) {
        self.failed = true;
        let t = self.paint("31", "FAILED");
        self.lines.push(format!("{t} {text}"));
    }

    fn error(&mut self, f: &Failure) {
        let (code, message) = match f {
            Failure::Input { code, message } => (code.to_string(), message.clone()),
            Failure::Domain { code, message } => (code.clone(), message.clone()),
        };
        let t = self.paint("31", &format!("error[{code}]"));
        self.lines.push(format!("{t}: {message}"));
        self.kv("error.code", &code);
        self.kv("error.message", message.replace('\n', " "));
    }
}

pub(crate) struct Context {
    pub depth: usize,
}

/// Whether ANSI styling is wanted on standard output.
pub fn color_enabled() -> bool {
    std::env::var("DML_COLOR").map_or(true, |v| v != "0") && std::io::stdout().is_terminal()
}

/// Runs one command line (`argv[0]` is the program name) without styling.
pub fn run<I, T>(argv: I) -> CommandResult
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_styled(argv, false)
}

pub fn run_styled<I, T>(argv: I, color: bool) -> CommandResult
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let exit_code = if e.use_stderr() { 2 } else { 0 };
            let mut machine_report = Vec::new();
            if exit_code == 2 {
                machine_report.push(("error.code".to_owned(), "UsageError".to_owned()));
            }
            return CommandResult {
                exit_code,
                report: e.render().to_string(),
                machine_report,
            };
        }
    };
    let mut report = Report::new(color);
    let ctx = Context { depth: cli.depth };
    let outcome = match cli.command {
        Command::Validate { file } => commands::validate(&mut report, &file),
        Command::Pushout {
            file,
            span,
            vertex,
            naming,
        } => {
            let policy = match naming {
                PolicyArg::Qualified => dml_core::NamingPolicy::Qualified,
                PolicyArg::Opaque => dml_core::NamingPolicy::Opaque,
            };
            commands::pushout(&mut report, &file, &span, &vertex, policy)
        }
        Command::Verify { file, cone } => commands::verify(&mut report, &file, &cone),
        Command::Classify { file, pushout } => commands::classify(&mut report, &file, &pushout),
        Command::Skeleton { file, dialect, out } => {
            let dialect = match dialect {
                DialectArg::Curly => dml_core::codegen::Dialect::Curly,
                DialectArg::Interface => dml_core::codegen::Dialect::Interface,
            };
            commands::skeleton(&mut report, &file, dialect, &out)
        }
        Command::Dot { file, out } => commands::dot(&mut report, &file, &out),
        Command::Paths { file, lhs, rhs } => commands::paths(&mut report, &ctx, &file, &lhs, &rhs),
        Command::Demo { name, out } => demo::run(&mut report, &ctx, &name, out.as_deref()),
    };
    let exit_code = match outcome {
        Ok(()) if report.failed => 1,
        Ok(()) => 0,
        Err(f) => {
            report.error(&f);
            f.exit_code()
        }
    };
    report.kv("exit", exit_code);
    let text = if cli.machine {
        report
            .pairs
            .iter()
            .map(|(k, v)| format!("{k}={v}\n"))
            .collect()
    } else {
        let mut t = report.lines.join("\n");
        t.push('\n');
        t
    };
    CommandResult {
        exit_code,
        report: text,
        machine_report: report.pairs,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn usage_errors_exit_two() {
        let r = run(["dml", "frobnicate"]);
        assert_eq!(r.exit_code, 2);
        assert_eq!(r.get("error.code"), Some("UsageError"));
        assert_eq!(run(["dml", "--help"]).exit_code, 0);
    }

    #[test]
    fn styling_is_opt_in() {
        let mut r = Report::new(true);
        r.good("x");
        assert!(r.lines[0].contains("\x1b[32m"));
        let mut r = Report::new(false);
        r.good("x");
        assert_eq!(r.lines[0], "ok x");
    }
}
