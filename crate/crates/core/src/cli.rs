//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage, 2 lex/parse/schema error in an input,
//! 3 ontology error, 4 I/O error, 5 some corpus files failed.

use std::ffi::OsString;
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::frontend::{import_parse_tree, parse_source, ParseTree};
use crate::io::{report_csv_row, report_to_csv, report_to_text, to_dot, to_json, Graph, CSV_HEADER};
use crate::metric::{compare_graphs, SimilarityReport};
use crate::ontology::{base_ontology, load_ontology, PslOntology};
use crate::psg::{build_psg, PsgError};
use crate::spt::{build_spt, LeafMode, PlaceholderMode, SptOptions};

#[derive(Debug, Parser)]
#[command(name = "psgkit", version, about = "Build and compare simplified parse trees and semantics graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse a source file and print its parse tree as JSON.
    Parse {
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build a graph from one input.
    Build {
        file: PathBuf,
        #[command(flatten)]
        config: Config,
    },
    /// Compare two inputs and report their similarity.
    Compare {
        first: PathBuf,
        second: PathBuf,
        #[command(flatten)]
        config: Config,
    },
    /// Compare every pair of files in a directory.
    Corpus {
        dir: PathBuf,
        #[command(flatten)]
        config: Config,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Rep {
    Spt,
    Psg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Dot,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Placeholders {
    Coarse,
    Fine,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Leaves {
    Placeholders,
    All,
}

#[derive(Debug, Clone, Args)]
struct Config {
    #[arg(long, value_enum, default_value = "psg")]
    rep: Rep,
    /// Ontology document; the built-in base ontology when absent.
    #[arg(long, env = "PSGKIT_ONTOLOGY")]
    ontology: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long, value_enum, default_value = "fine")]
    spt_placeholders: Placeholders,
    #[arg(long, value_enum, default_value = "placeholders")]
    spt_leaves: Leaves,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Config {
    fn spt_options(&self) -> SptOptions {
        SptOptions {
            placeholders: match self.spt_placeholders {
                Placeholders::Coarse => PlaceholderMode::Coarse,
                Placeholders::Fine => PlaceholderMode::Fine,
            },
            leaves: match self.spt_leaves {
                Leaves::Placeholders => LeafMode::Placeholders,
                Leaves::All => LeafMode::All,
            },
        }
    }

    fn format(&self, default: Format, allowed: &[Format]) -> Result<Format, CliError> {
        let format = self.format.unwrap_or(default);
        if allowed.contains(&format) {
            Ok(format)
        } else {
            let names: Vec<_> = allowed.iter().map(|f| format!("{f:?}").to_lowercase()).collect();
            Err(CliError::Usage(format!("--format must be one of {}", names.join(", "))))
        }
    }

    fn ontology(&self) -> Result<Option<PslOntology>, CliError> {
        if self.rep == Rep::Spt {
            return Ok(None);
        }
        let Some(path) = &self.ontology else {
            return Ok(Some(base_ontology()));
        };
        let text = read(path)?;
        load_ontology(&text)
            .map(Some)
            .map_err(|e| CliError::Ontology(format!("{}: {e}", path.display())))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CliError {
    Usage(String),
    Input(String),
    Ontology(String),
    Io(String),
    Partial(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Input(_) => 2,
            CliError::Ontology(_) => 3,
            CliError::Io(_) => 4,
            CliError::Partial(_) => 5,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Input(m) | CliError::Ontology(m) | CliError::Io(m) => f.write_str(m),
            CliError::Partial(n) => write!(f, "{n} corpus file(s) failed"),
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Reads source text, or a parse-tree document when the file ends in `.json`.
fn load_tree(path: &Path) -> Result<ParseTree, CliError> {
    let text = read(path)?;
    let at = |e: &dyn fmt::Display| CliError::Input(format!("{}: {e}", path.display()));
    if path.extension().is_some_and(|x| x == "json") {
        import_parse_tree(&text).map_err(|e| at(&e))
    } else {
        parse_source(&text).map_err(|e| at(&e))
    }
}

fn build(tree: &ParseTree, rep: Rep, spt: SptOptions, ontology: Option<&PslOntology>) -> Result<Graph, CliError> {
    match (rep, ontology) {
        (Rep::Spt, _) => Ok(Graph::Spt(build_spt(tree, spt))),
        (Rep::Psg, Some(o)) => build_psg(tree, o).map(Graph::Psg).map_err(|e| match e {
            PsgError::UnmappedCategory(_) | PsgError::Ontology(_) => CliError::Ontology(e.to_string()),
        }),
        (Rep::Psg, None) => Err(CliError::Ontology("no ontology loaded".into())),
    }
}

fn emit(out: Option<&Path>, text: &str, stdout: &mut dyn Write) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => stdout.write_all(text.as_bytes()).map_err(|e| CliError::Io(e.to_string())),
    }
}

fn report_json(r: &SimilarityReport) -> String {
    let value = serde_json::json!({
        "n1": r.n1_card,
        "n2": r.n2_card,
        "i1": r.i1_card,
        "i2": r.i2_card,
        "p1": {"exact": r.p1.to_string(), "percent": r.p1_percent()},
        "p2": {"exact": r.p2.to_string(), "percent": r.p2_percent()},
        "eta": {"exact": r.eta.to_string(), "percent": r.eta_percent()},
        "lower": {"exact": r.lower.to_string(), "percent": r.lower_percent()},
        "range": [
            {"exact": r.range_lo.to_string(), "percent": r.range_lo_percent()},
            {"exact": r.range_hi.to_string(), "percent": r.range_hi_percent()}
        ],
        "average": {"exact": r.average.to_string(), "percent": r.average_percent()},
    });
    let mut text = serde_json::to_string_pretty(&value).expect("json values serialize");
    text.push('\n');
    text
}

/// Regular, non-hidden files of `dir` sorted by file name.
fn corpus_files(dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let entries = fs::read_dir(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    let mut files = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
        let path = entry.path();
        let hidden = entry.file_name().to_string_lossy().starts_with('.');
        if path.is_file() && !hidden {
            files.push(path);
        }
    }
    files.sort_by(|a, b| a.file_name().cmp(&b.file_name()));
    Ok(files)
}

fn run_corpus(dir: &Path, config: &Config, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    config.format(Format::Csv, &[Format::Csv])?;
    let ontology = config.ontology()?;
    let files = corpus_files(dir)?;
    let options = config.spt_options();
    let built: Vec<Result<Graph, CliError>> = files
        .par_iter()
        .map(|path| build(&load_tree(path)?, config.rep, options, ontology.as_ref()))
        .collect();
    let mut failures = 0;
    let mut graphs = Vec::new();
    for (path, result) in files.iter().zip(built) {
        match result {
            Ok(graph) => graphs.push((path, graph)),
            Err(e @ CliError::Ontology(_)) => return Err(e),
            Err(e) => {
                failures += 1;
                let _ = writeln!(stderr, "skipping {}: {e}", path.display());
            }
        }
    }
    let pairs: Vec<(usize, usize)> = (0..graphs.len())
        .flat_map(|i| (i + 1..graphs.len()).map(move |j| (i, j)))
        .collect();
    let rows: Vec<String> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let (a, ga) = &graphs[i];
            let (b, gb) = &graphs[j];
            let r = compare_graphs(ga.as_labeled(), gb.as_labeled());
            format!("{},{},{}", file_name(a), file_name(b), report_csv_row(&r))
        })
        .collect();
    let mut text = format!("a,b,{CSV_HEADER}\n");
    for row in rows {
        text.push_str(&row);
        text.push('\n');
    }
    emit(config.out.as_deref(), &text, stdout)?;
    if failures > 0 {
        Err(CliError::Partial(failures))
    } else {
        Ok(())
    }
}

fn file_name(path: &Path) -> String {
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    if name.contains([',', '"', '\n']) {
        format!("\"{}\"", name.replace('"', "\"\""))
    } else {
        name
    }
}

fn dispatch(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Parse { file, out } => {
            let tree = load_tree(&file)?;
            emit(out.as_deref(), &tree.to_json(), stdout)
        }
        Command::Build { file, config } => {
            let format = config.format(Format::Json, &[Format::Json, Format::Dot])?;
            let ontology = config.ontology()?;
            let graph = build(&load_tree(&file)?, config.rep, config.spt_options(), ontology.as_ref())?;
            let text = match format {
                Format::Dot => to_dot(&graph),
                _ => to_json(&graph),
            };
            emit(config.out.as_deref(), &text, stdout)
        }
        Command::Compare { first, second, config } => {
            let format = config.format(Format::Text, &[Format::Text, Format::Csv, Format::Json])?;
            let ontology = config.ontology()?;
            let options = config.spt_options();
            let a = build(&load_tree(&first)?, config.rep, options, ontology.as_ref())?;
            let b = build(&load_tree(&second)?, config.rep, options, ontology.as_ref())?;
            let report = compare_graphs(a.as_labeled(), b.as_labeled());
            let text = match format {
                Format::Csv => report_to_csv(&report),
                Format::Json => report_json(&report),
                _ => report_to_text(&report),
            };
            emit(config.out.as_deref(), &text, stdout)
        }
        Command::Corpus { dir, config } => run_corpus(&dir, &config, stdout, stderr),
    }
}

/// Runs the tool on `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { stdout.write_all(text.as_bytes()) } else { stderr.write_all(text.as_bytes()) };
            return code;
        }
    };
    match dispatch(cli, stdout, stderr) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(std::iter::once("psgkit").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn unknown_subcommand_is_usage_error() {
        assert_eq!(run_args(&["frobnicate"]).0, 1);
        assert_eq!(run_args(&[]).0, 1);
    }

    #[test]
    fn bad_format_for_command_is_usage_error() {
        let dir = tempfile::tempdir().unwrap();
        let f = dir.path().join("a.c");
        fs::write(&f, "return 1;").unwrap();
        let (code, _, err) = run_args(&["build", f.to_str().unwrap(), "--format", "csv"]);
        assert_eq!(code, 1, "{err}");
    }

    #[test]
    fn help_goes_to_stdout() {
        let (code, out, _) = run_args(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("corpus"));
    }

    #[test]
    fn csv_file_names_are_quoted_when_needed() {
        assert_eq!(file_name(Path::new("/x/a,b.c")), "\"a,b.c\"");
        assert_eq!(file_name(Path::new("/x/plain.c")), "plain.c");
    }
}
