//! The end-to-end conversion: validate, identify, classify, generate, and
//! check that the generated RDFa says exactly what the model says.

use thiserror::Error;

use crate::discourse::{classify_units, ClassifiedArticle, Gazetteer};
use crate::html::{comment_pages, generate_html, AnnotationNode, HtmlDocument};
use crate::model::{assign_identifiers, validate_bundle, ArticleBundle, IdentifyError, Violation};
use crate::package::{build_archive, PackageError};
use crate::rdf::{direct_triples, extract_rdfa, serialize_ntriples, Graph};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PipelineError {
    #[error("bundle is invalid ({} violations)", .0.len())]
    Invalid(Vec<Violation>),
    #[error(transparent)]
    Identify(IdentifyError),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

#[derive(Debug, Clone)]
pub struct Publication {
    pub article: ClassifiedArticle,
    pub html: HtmlDocument,
    pub html_text: String,
    pub comment_pages: Vec<(AnnotationNode, String)>,
    pub graph: Graph,
}

/// Runs the pipeline and verifies the round trip: the serialized HTML parses
/// back to the same tree, and its RDFa equals the directly generated graph.
pub fn publish(bundle: &ArticleBundle, gaz: &Gazetteer) -> Result<Publication, PipelineError> {
    let violations = validate_bundle(bundle);
    if !violations.is_empty() {
        return Err(PipelineError::Invalid(violations));
    }
    let identified = assign_identifiers(bundle).map_err(PipelineError::Identify)?;
    let article = classify_units(identified, gaz);
    let html = generate_html(&article);
    let html_text = html.to_html();
    let graph = direct_triples(&article);

    let reparsed = HtmlDocument::parse(&html_text)
        .map_err(|e| PipelineError::Invariant(format!("generated HTML does not parse: {e}")))?;
    if reparsed != html {
        return Err(PipelineError::Invariant("generated HTML does not re-parse to the same tree".into()));
    }
    let extracted = extract_rdfa(&reparsed)
        .map_err(|e| PipelineError::Invariant(format!("generated HTML is not extractable: {e}")))?;
    check_same_graph(&extracted, &graph)?;

    let comment_pages = comment_pages(&article).into_iter().map(|(node, page)| (node, page.to_html())).collect();
    Ok(Publication { article, html, html_text, comment_pages, graph })
}

/// Fails with a short description of the first differences.
pub fn check_same_graph(extracted: &Graph, expected: &Graph) -> Result<(), PipelineError> {
    if extracted == expected {
        return Ok(());
    }
    let missing: Vec<String> = expected.difference(extracted).take(3).map(ToString::to_string).collect();
    let extra: Vec<String> = extracted.difference(expected).take(3).map(ToString::to_string).collect();
    Err(PipelineError::Invariant(format!(
        "extracted graph differs from model graph; missing {missing:?}, unexpected {extra:?}"
    )))
}

impl Publication {
    pub fn ntriples(&self) -> String {
        serialize_ntriples(&self.graph)
    }

    pub fn comment_files(&self) -> Vec<(String, String)> {
        self.comment_pages.iter().map(|(node, html)| (node.id.clone(), html.clone())).collect()
    }

    pub fn archive(&self, with_triples: bool, timestamp: &str) -> Result<Vec<u8>, PackageError> {
        let nt = with_triples.then(|| self.ntriples());
        build_archive(&self.html_text, &self.comment_files(), &self.article.media, nt.as_deref(), timestamp)
    }
}
