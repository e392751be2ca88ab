//! `syngauntlet` command-line front end.
//!
//! Exit codes: 0 success; 1 invalid suites or incomparable reports; 2
//! unreadable input or bad usage; 3 scorer failure (any partial report is
//! still written).

mod config;
mod inputs;

use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use syngauntlet::engine::{compare_runs, evaluate_run, CompiledSuite, RunError, RunReport};
use syngauntlet::suite_data::{list_shipped_suites, write_data_dir};

use config::{ConfigFile, RunSettings};
use inputs::{load_suites, LoadedSuite};

const EXIT_INVALID: u8 = 1;
const EXIT_UNREADABLE: u8 = 2;
const EXIT_SCORER: u8 = 3;

#[derive(Parser)]
#[command(
    name = "syngauntlet",
    version,
    about = "Targeted syntactic evaluation of language models"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
#[allow(clippy::large_enum_variant)]
enum Command {
    /// Check suite documents and print every problem found.
    Validate {
        /// Suite files or directories searched for `*.json`.
        #[arg(required = true)]
        paths: Vec<PathBuf>,
    },
    /// Evaluate suites with a scorer and write a report.
    Run(RunArgs),
    /// Line up several JSON run reports side by side.
    Compare {
        #[arg(required = true, num_args = 2..)]
        reports: Vec<PathBuf>,
        #[arg(long, default_value = "table", value_parser = ["table", "json"])]
        format: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the built-in Spanish suites.
    List {
        #[arg(long, default_value = "table", value_parser = ["table", "json"])]
        format: String,
    },
    /// Write the built-in suites and fixtures as documents below a directory.
    ExportSuites { dir: PathBuf },
}

#[derive(Args, Default)]
pub struct RunArgs {
    /// Suite files or directories; the built-in suites when omitted.
    pub paths: Vec<PathBuf>,
    /// JSON file with defaults for any of the flags below.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_parser = ["ngram", "uniform", "remote"])]
    pub scorer: Option<String>,
    /// Scorer id shown in reports.
    #[arg(long)]
    pub id: Option<String>,
    /// Training text for the n-gram scorer, one sentence per line.
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    #[arg(long)]
    pub order: Option<usize>,
    /// Interpolation weights, highest order first, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub lambdas: Option<Vec<f64>>,
    #[arg(long)]
    pub vocab_size: Option<u64>,
    #[arg(long, env = "SYNGAUNTLET_ENDPOINT")]
    pub endpoint: Option<String>,
    #[arg(long)]
    pub timeout_ms: Option<u64>,
    #[arg(long)]
    pub retries: Option<u32>,
    #[arg(long)]
    pub in_flight: Option<usize>,
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long, value_parser = ["table", "json", "csv"])]
    pub format: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Keep only suites in this language.
    #[arg(long)]
    pub language: Option<String>,
    /// Keep only suites of this circuit.
    #[arg(long)]
    pub circuit: Option<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Validate { paths } => validate(&paths),
        Command::Run(args) => run(args),
        Command::Compare {
            reports,
            format,
            out,
        } => compare(&reports, &format, out.as_deref()),
        Command::List { format } => list(&format),
        Command::ExportSuites { dir } => export(&dir),
    };
    ExitCode::from(code)
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), u8> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| {
            eprintln!("error: cannot write {}: {e}", path.display());
            EXIT_UNREADABLE
        }),
        None => {
            let _ = std::io::stdout().write_all(text.as_bytes());
            Ok(())
        }
    }
}

fn validate(paths: &[PathBuf]) -> u8 {
    let loaded = match load_suites(paths) {
        Ok(l) => l,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_UNREADABLE;
        }
    };
    let mut code = 0;
    for entry in loaded {
        match entry {
            LoadedSuite::Malformed { path, error } => {
                println!("{}: {error}", path.display());
                code = EXIT_INVALID;
            }
            LoadedSuite::Loaded { path, suite } => {
                let report = syngauntlet::suite::validate_suite(&suite);
                if report.is_clean() {
                    println!("{}: ok", path.display());
                } else {
                    for e in &report.errors {
                        println!("{}: {e}", path.display());
                    }
                    code = EXIT_INVALID;
                }
            }
        }
    }
    code
}

fn run(args: RunArgs) -> u8 {
    let file = match args.config.as_deref().map(ConfigFile::read).transpose() {
        Ok(f) => f.unwrap_or_default(),
        Err(e) => {
            eprintln!("error: {e:#}");
            return EXIT_UNREADABLE;
        }
    };
    let settings = match RunSettings::resolve(args, file) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e:#}");
            return EXIT_UNREADABLE;
        }
    };
    let suites = match settings.suites() {
        Ok(s) => s,
        Err(code) => return code,
    };
    let compiled: Vec<CompiledSuite> = match suites
        .into_iter()
        .map(|s| {
            let name = s.name.clone();
            CompiledSuite::compile(s).map_err(|r| (name, r))
        })
        .collect()
    {
        Ok(c) => c,
        Err((name, report)) => {
            for e in &report.errors {
                eprintln!("{name}: {e}");
            }
            return EXIT_INVALID;
        }
    };
    let scorer = match settings.build_scorer() {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: scorer: {e:#}");
            return EXIT_SCORER;
        }
    };
    match evaluate_run(&compiled, scorer.as_ref(), settings.workers) {
        Ok(report) => match emit(&report.render(settings.format), settings.out.as_deref()) {
            Ok(()) => 0,
            Err(code) => code,
        },
        Err(RunError::Aborted { error, partial }) => {
            eprintln!("error: {error}");
            let _ = emit(&partial.render(settings.format), settings.out.as_deref());
            EXIT_SCORER
        }
        Err(RunError::DuplicateSuiteName(name)) => {
            eprintln!("error: suite name `{name}` occurs more than once");
            EXIT_INVALID
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_SCORER
        }
    }
}

fn compare(paths: &[PathBuf], format: &str, out: Option<&Path>) -> u8 {
    let mut reports: Vec<RunReport> = Vec::new();
    for path in paths {
        let parsed = std::fs::read_to_string(path)
            .map_err(|e| e.to_string())
            .and_then(|s| serde_json::from_str(&s).map_err(|e| e.to_string()));
        match parsed {
            Ok(r) => reports.push(r),
            Err(e) => {
                eprintln!("error: {}: {e}", path.display());
                return EXIT_UNREADABLE;
            }
        }
    }
    match compare_runs(&reports) {
        Ok(table) => {
            let text = if format == "json" {
                let mut s = serde_json::to_string_pretty(&table).expect("tables serialize");
                s.push('\n');
                s
            } else {
                table.render()
            };
            match emit(&text, out) {
                Ok(()) => 0,
                Err(code) => code,
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INVALID
        }
    }
}

fn list(format: &str) -> u8 {
    let catalog = list_shipped_suites();
    if format == "json" {
        println!(
            "{}",
            serde_json::to_string_pretty(&catalog).expect("catalog serializes")
        );
    } else {
        println!("language\tcircuit\tname\tmodifier\titems");
        for entry in catalog {
            println!("{entry}");
        }
    }
    0
}

fn export(dir: &Path) -> u8 {
    match write_data_dir(dir) {
        Ok(written) => {
            println!(
                "wrote {} suite documents below {}",
                written.len(),
                dir.display()
            );
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_UNREADABLE
        }
    }
}
