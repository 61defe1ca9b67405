use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use arann_core::discourse::Gazetteer;
use arann_core::html::{comment_page, inject_comment_node, HtmlDocument, InjectError, STYLESHEET, STYLESHEET_PATH};
use arann_core::ingest::{load_bundle, parse_comment_json};
use arann_core::model::{validate_bundle, IdentifyError};
use arann_core::package::FIXED_TIMESTAMP;
use arann_core::pipeline::{publish, PipelineError};
use arann_core::query::{match_bgp, parse_query, Report, ReportKind};
use arann_core::rdf::{extract_rdfa_with_base, parse_ntriples, serialize_ntriples, Graph, PrefixMap};
use clap::{Args, Parser, Subcommand};

/// Publish article bundles with review comments as HTML+RDFa and analyse
/// the resulting graph.
#[derive(Parser, Debug)]
#[command(name = "arann", version, after_help = EXIT_CODES)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

const EXIT_CODES: &str = "Exit codes: 0 success, 1 usage/I/O/parse error, 2 validation failure, 3 internal invariant breach.";

#[derive(Subcommand, Debug)]
enum Command {
    /// Convert a bundle into a publication directory.
    Convert {
        bundle: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long)]
        base_uri: Option<String>,
        #[command(flatten)]
        gazetteer: GazetteerArg,
        /// Also write publication.zip into the output directory.
        #[arg(long)]
        zip: bool,
        /// Stamp archive entries with 1980-01-01T00:00:00Z instead of now.
        #[arg(long)]
        fixed_timestamp: bool,
        /// Also write triples.nt (and put it in the archive).
        #[arg(long)]
        emit_nt: bool,
    },
    /// Extract the RDFa of an HTML file as N-Triples.
    Extract {
        html: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Base IRI for relative references when the page has no <base>.
        #[arg(long)]
        base_uri: Option<String>,
    },
    /// Run a triple-pattern query against an .nt or .html file.
    Query {
        input: PathBuf,
        query: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Print one of the review reports for an .nt or .html file.
    Report {
        input: PathBuf,
        #[arg(long, value_parser = |s: &str| s.parse::<ReportKind>())]
        kind: ReportKind,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Add a comment to a published article.html.
    Annotate {
        html: PathBuf,
        comment: PathBuf,
        /// Where to write the updated article; its comments/ directory gets
        /// the standalone page. Defaults to stdout.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Check a bundle and list every violation.
    Validate {
        bundle: PathBuf,
        #[arg(long)]
        base_uri: Option<String>,
    },
}

#[derive(Args, Debug)]
struct GazetteerArg {
    /// Gazetteer TSV replacing the bundled one.
    #[arg(long = "gazetteer", env = "ARANN_GAZETTEER")]
    path: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Invalid(Vec<String>),
    Internal(String),
}

impl Failure {
    fn report(self) -> ExitCode {
        let (lines, code) = match self {
            Failure::Usage(m) => (vec![m], 1),
            Failure::Invalid(v) => (v, 2),
            Failure::Internal(m) => (vec![format!("internal error: {m}")], 3),
        };
        let mut stderr = io::stderr().lock();
        for line in lines {
            let _ = writeln!(stderr, "{line}");
        }
        ExitCode::from(code)
    }
}

fn io_err(path: &Path) -> impl Fn(io::Error) -> Failure + '_ {
    move |e| Failure::Usage(format!("{}: {e}", path.display()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => failure.report(),
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Convert { bundle, output, base_uri, gazetteer, zip, fixed_timestamp, emit_nt } => {
            convert(&bundle, &output, base_uri, &gazetteer, zip, fixed_timestamp, emit_nt)
        }
        Command::Extract { html, output, base_uri } => {
            let graph = html_graph(&html, base_uri.as_deref())?;
            emit(output.as_deref(), &serialize_ntriples(&graph))
        }
        Command::Query { input, query, output } => {
            let text = fs::read_to_string(&query).map_err(io_err(&query))?;
            let patterns = parse_query(&text, &PrefixMap::default())
                .map_err(|e| Failure::Usage(format!("{}: {e}", query.display())))?;
            let graph = load_graph(&input)?;
            emit(output.as_deref(), &match_bgp(&graph, &patterns).to_tsv())
        }
        Command::Report { input, kind, output } => {
            let graph = load_graph(&input)?;
            emit(output.as_deref(), &Report::from_graph(kind, &graph).to_tsv())
        }
        Command::Annotate { html, comment, output } => annotate(&html, &comment, output.as_deref()),
        Command::Validate { bundle, base_uri } => {
            let mut bundle = load_bundle(&bundle).map_err(|e| Failure::Usage(e.to_string()))?;
            if let Some(base) = base_uri {
                bundle.metadata.base_uri = base;
            }
            let violations = validate_bundle(&bundle);
            if !violations.is_empty() {
                return Err(Failure::Invalid(violations.iter().map(ToString::to_string).collect()));
            }
            emit(None, &format!("valid blocks={} comments={}\n", bundle.blocks.len(), bundle.comments.len()))
        }
    }
}

fn load_gazetteer(arg: &GazetteerArg) -> Result<Gazetteer, Failure> {
    match &arg.path {
        None => Ok(Gazetteer::bundled()),
        Some(path) => {
            let text = fs::read_to_string(path).map_err(io_err(path))?;
            Gazetteer::parse(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
        }
    }
}

fn convert(
    bundle_path: &Path,
    out: &Path,
    base_uri: Option<String>,
    gazetteer: &GazetteerArg,
    zip: bool,
    fixed_timestamp: bool,
    emit_nt: bool,
) -> Result<(), Failure> {
    let gaz = load_gazetteer(gazetteer)?;
    let mut bundle = load_bundle(bundle_path).map_err(|e| Failure::Usage(e.to_string()))?;
    if let Some(base) = base_uri {
        bundle.metadata.base_uri = base;
    }
    let publication = publish(&bundle, &gaz).map_err(|e| match e {
        PipelineError::Invalid(v) => Failure::Invalid(v.iter().map(ToString::to_string).collect()),
        PipelineError::Identify(IdentifyError::Invalid(v)) => {
            Failure::Invalid(v.iter().map(ToString::to_string).collect())
        }
        PipelineError::Identify(other) => Failure::Invalid(vec![other.to_string()]),
        PipelineError::Invariant(m) => Failure::Internal(m),
    })?;

    let write = |rel: &str, bytes: &[u8]| -> Result<(), Failure> {
        let path = out.join(rel);
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir).map_err(io_err(dir))?;
        }
        fs::write(&path, bytes).map_err(io_err(&path))
    };
    write("article.html", publication.html_text.as_bytes())?;
    for (id, html) in publication.comment_files() {
        write(&format!("comments/{id}.html"), html.as_bytes())?;
    }
    for media in &publication.article.media {
        write(&format!("media/{}", media.name), &media.bytes)?;
    }
    write(STYLESHEET_PATH, STYLESHEET.as_bytes())?;
    if emit_nt {
        write("triples.nt", publication.ntriples().as_bytes())?;
    }
    if zip {
        let timestamp = if fixed_timestamp {
            FIXED_TIMESTAMP.to_string()
        } else {
            chrono::Utc::now().format("%Y-%m-%dT%H:%M:%SZ").to_string()
        };
        let bytes = publication.archive(emit_nt, &timestamp).map_err(|e| Failure::Usage(e.to_string()))?;
        write("publication.zip", &bytes)?;
    }
    emit(
        None,
        &format!(
            "blocks={} comments={} triples={}\n",
            publication.article.blocks.len(),
            publication.article.comments.len(),
            publication.graph.len()
        ),
    )
}

fn read_html(path: &Path) -> Result<HtmlDocument, Failure> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    HtmlDocument::parse(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn html_graph(path: &Path, base: Option<&str>) -> Result<Graph, Failure> {
    let doc = read_html(path)?;
    extract_rdfa_with_base(&doc, base).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

/// `.html`/`.htm` files are extracted first; anything else is read as
/// N-Triples.
fn load_graph(path: &Path) -> Result<Graph, Failure> {
    let is_html = path
        .extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("html") || e.eq_ignore_ascii_case("htm"));
    if is_html {
        return html_graph(path, None);
    }
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    parse_ntriples(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn annotate(html_path: &Path, comment_path: &Path, output: Option<&Path>) -> Result<(), Failure> {
    let doc = read_html(html_path)?;
    let text = fs::read_to_string(comment_path).map_err(io_err(comment_path))?;
    let comment = parse_comment_json(&text).map_err(|e| Failure::Usage(format!("{}: {e}", comment_path.display())))?;
    let (updated, node) = inject_comment_node(&doc, &comment).map_err(|e| match e {
        InjectError::UnrecognizedDocument(_) => Failure::Usage(format!("{}: {e}", html_path.display())),
        other => Failure::Invalid(vec![other.to_string()]),
    })?;
    let html_text = updated.to_html();
    let Some(out) = output else {
        return emit(None, &html_text);
    };
    fs::write(out, &html_text).map_err(io_err(out))?;
    let title = doc
        .root
        .find(&|e| e.name == "title")
        .map(|e| e.text_content())
        .unwrap_or_default();
    let page_dir = out.parent().unwrap_or(Path::new(".")).join("comments");
    fs::create_dir_all(&page_dir).map_err(io_err(&page_dir))?;
    let page_path = page_dir.join(format!("{}.html", node.id));
    fs::write(&page_path, comment_page(&node, &title).to_html()).map_err(io_err(&page_path))
}

fn emit(output: Option<&Path>, text: &str) -> Result<(), Failure> {
    match output {
        Some(path) => fs::write(path, text).map_err(io_err(path)),
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(text.as_bytes()).and_then(|()| stdout.flush()).map_err(|e| Failure::Usage(format!("stdout: {e}")))
        }
    }
}
