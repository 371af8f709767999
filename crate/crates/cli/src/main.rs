use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use iatc::analogy::AnalogyError;
use iatc::analysis::{
    category_composition, timeline, write_composition_csv, write_counts_csv, write_timeline_csv,
    CommentLabels,
};
use iatc::graph::{export, ExportFormat};
use iatc::parser::validate_document;
use iatc::{
    align, build_graph, count_tags, default_registry, parse_annotation_file, parse_stanza,
    AnnotationDocument, Diagnostic, Dialogue, TagRegistry,
};

/// Lint, graph, count and compare IATC argument annotations.
#[derive(Parser)]
#[command(name = "iatc", version)]
struct Cli {
    #[command(flatten)]
    config: CliConfig,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CliConfig {
    /// Extra tag table merged over the default registry.
    #[arg(long, global = true, env = "IATC_REGISTRY")]
    registry: Option<PathBuf>,
    /// Treat warnings as errors.
    #[arg(long, global = true)]
    strict: bool,
    /// Directory for CSV output.
    #[arg(long, global = true, default_value = ".")]
    output_dir: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate annotation files.
    Lint {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Build the argument graph and print it.
    Graph {
        /// Annotation files followed by the dialogue JSON.
        #[arg(required = true, num_args = 2..)]
        inputs: Vec<PathBuf>,
        #[arg(long, default_value = "dot")]
        format: ExportFormat,
    },
    /// Write timeline.csv, counts.csv and, with labels, composition.csv.
    Stats {
        /// Annotation files followed by the dialogue JSON.
        #[arg(required = true, num_args = 2..)]
        inputs: Vec<PathBuf>,
        #[arg(long, default_value_t = 5)]
        bin_minutes: u32,
        /// CSV with header `locution,label`.
        #[arg(long)]
        labels: Option<PathBuf>,
    },
    /// Align two stanzas; `-` reads one of them from stdin.
    Analogy { a: String, b: String },
}

enum Failure {
    /// Validation or alignment failed; exit 1.
    Domain(anyhow::Error),
    /// Unreadable input or bad usage; exit 2.
    Io(anyhow::Error),
}

impl Failure {
    fn domain(msg: impl std::fmt::Display) -> Failure {
        Failure::Domain(anyhow!("{msg}"))
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let result = registry(&cli.config).and_then(|reg| run(&cli, &reg, &mut out));
    let _ = out.flush();
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Domain(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn registry(config: &CliConfig) -> Result<TagRegistry, Failure> {
    let base = default_registry();
    match &config.registry {
        None => Ok(base),
        Some(path) => base
            .extend_from_file(path)
            .with_context(|| format!("registry {}", path.display()))
            .map_err(Failure::Io),
    }
}

fn run(cli: &Cli, reg: &TagRegistry, out: &mut impl Write) -> Outcome {
    match &cli.command {
        Command::Lint { files } => lint(files, reg, cli.config.strict, out),
        Command::Graph { inputs, format } => {
            let (doc, dialogue) = load_corpus(inputs, reg, cli.config.strict)?;
            let g =
                build_graph(doc.all_stanzas(), Some(&dialogue), reg).map_err(Failure::domain)?;
            write!(out, "{}", export(&g, *format)).map_err(io_failure)
        }
        Command::Stats {
            inputs,
            bin_minutes,
            labels,
        } => {
            let (doc, dialogue) = load_corpus(inputs, reg, cli.config.strict)?;
            stats(
                &doc,
                &dialogue,
                *bin_minutes,
                labels.as_deref(),
                &cli.config.output_dir,
                reg,
                out,
            )
        }
        Command::Analogy { a, b } => analogy(a, b, reg, out),
    }
}

fn io_failure(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Io(e.into())
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(Failure::Io)
}

/// Parses and validates one file, printing its diagnostics.
/// Returns (errors, warnings).
fn check_file(
    path: &Path,
    reg: &TagRegistry,
    sink: &mut impl Write,
) -> Result<(AnnotationDocument, usize, usize), Failure> {
    let text = read(path)?;
    let doc = match parse_annotation_file(&text) {
        Ok(doc) => doc,
        Err(e) => {
            let _ = writeln!(sink, "{}:1:1: error: {e}", path.display());
            return Ok((AnnotationDocument::default(), 1, 0));
        }
    };
    let diags: Vec<Diagnostic> = validate_document(&doc, reg);
    for d in &diags {
        let _ = writeln!(sink, "{}:{d}", path.display());
    }
    let errors = diags.iter().filter(|d| d.is_error()).count();
    Ok((doc, errors, diags.len() - errors))
}

fn lint(files: &[PathBuf], reg: &TagRegistry, strict: bool, out: &mut impl Write) -> Outcome {
    let (mut errors, mut warnings) = (0, 0);
    for f in files {
        let (_, e, w) = check_file(f, reg, out)?;
        errors += e;
        warnings += w;
    }
    let _ = writeln!(out, "{errors} error(s), {warnings} warning(s)");
    if errors > 0 || (strict && warnings > 0) {
        return Err(Failure::domain("lint failed"));
    }
    Ok(())
}

fn load_corpus(
    inputs: &[PathBuf],
    reg: &TagRegistry,
    strict: bool,
) -> Result<(AnnotationDocument, Dialogue), Failure> {
    let (dialogue_path, files) = inputs
        .split_last()
        .ok_or_else(|| Failure::Io(anyhow!("no inputs")))?;
    let dialogue = Dialogue::from_json(
        dialogue_path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default(),
        &read(dialogue_path)?,
    )
    .with_context(|| format!("dialogue {}", dialogue_path.display()))
    .map_err(Failure::Domain)?;
    let mut doc = AnnotationDocument::default();
    let (mut errors, mut warnings) = (0, 0);
    let mut stderr = io::stderr();
    for f in files {
        let (d, e, w) = check_file(f, reg, &mut stderr)?;
        doc.extend(d);
        errors += e;
        warnings += w;
    }
    if errors > 0 || (strict && warnings > 0) {
        return Err(Failure::domain(format!(
            "{errors} error(s), {warnings} warning(s) in annotations"
        )));
    }
    Ok((doc, dialogue))
}

fn stats(
    doc: &AnnotationDocument,
    dialogue: &Dialogue,
    bin_minutes: u32,
    labels: Option<&Path>,
    dir: &Path,
    reg: &TagRegistry,
    out: &mut impl Write,
) -> Outcome {
    fs::create_dir_all(dir).map_err(io_failure)?;
    let mut written = Vec::new();

    let span = dialogue
        .time_span()
        .ok_or_else(|| Failure::domain("dialogue has no locutions"))?;
    let bins =
        timeline(doc.all_stanzas(), dialogue, bin_minutes, span, reg).map_err(Failure::domain)?;
    let path = dir.join("timeline.csv");
    write_timeline_csv(fs::File::create(&path).map_err(io_failure)?, &bins).map_err(io_failure)?;
    written.push(path);

    let path = dir.join("counts.csv");
    write_counts_csv(
        fs::File::create(&path).map_err(io_failure)?,
        &count_tags(doc.all_stanzas(), reg),
    )
    .map_err(io_failure)?;
    written.push(path);

    if let Some(labels) = labels {
        let labels = CommentLabels::from_csv(read(labels)?.as_bytes()).map_err(Failure::domain)?;
        let comp =
            category_composition(doc.all_stanzas(), &labels, reg).map_err(Failure::domain)?;
        let path = dir.join("composition.csv");
        write_composition_csv(fs::File::create(&path).map_err(io_failure)?, &comp)
            .map_err(io_failure)?;
        written.push(path);
    }
    for p in written {
        writeln!(out, "wrote {}", p.display()).map_err(io_failure)?;
    }
    Ok(())
}

fn analogy(a: &str, b: &str, reg: &TagRegistry, out: &mut impl Write) -> Outcome {
    if a == "-" && b == "-" {
        return Err(Failure::Io(anyhow!("only one stanza may come from stdin")));
    }
    let stanza = |arg: &str| -> Result<iatc::Term, Failure> {
        let text = if arg == "-" {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s).map_err(io_failure)?;
            s
        } else {
            arg.to_string()
        };
        let term = parse_stanza(text.trim())
            .map_err(|e| Failure::domain(format!("`{}`: {e}", text.trim())))?;
        Ok(term.canonicalize(reg).0)
    };
    let (ta, tb) = (stanza(a)?, stanza(b)?);
    match align(&ta, &tb) {
        Ok(m) => write!(out, "{}", m.report()).map_err(io_failure),
        Err(AnalogyError::NoAlignment) => {
            let _ = writeln!(out, "no alignment");
            Err(Failure::domain(AnalogyError::NoAlignment))
        }
        Err(e) => Err(Failure::domain(e)),
    }
}
